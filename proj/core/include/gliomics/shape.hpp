#pragma once

#include <array>
#include <vector>

#include "gliomics/components.hpp"

namespace gliomics {

inline constexpr int kShapeBlockLength = 4;

/// Planar shape descriptors of one region.
struct ShapeBlock {
  double solidity = 0.0;         // area / convex hull area
  double eccentricity = 0.0;     // focal distance / major axis
  double axis_ratio = 0.0;       // major / minor axis
  double perimeter_ratio = 0.0;  // ellipse perimeter / region perimeter

  /// Measured area in mm^2; used as the averaging weight in shape_block.
  double area_mm2 = 0.0;
  /// Axial slice the measurement was taken on.
  int slice = -1;
  /// Single-pixel region: conventions solidity 1, eccentricity 0,
  /// axis_ratio 1, perimeter_ratio 1.
  bool degenerate = false;

  std::array<double, kShapeBlockLength> values() const {
    return {solidity, eccentricity, axis_ratio, perimeter_ratio};
  }
};

/// First Ramanujan approximation of an ellipse perimeter with semi-axes a, b.
double ramanujan_perimeter(double a, double b);

/// Area of the convex hull of the pixel squares, in mm^2.
double convex_hull_area(const PlanarRegion& region, double sx, double sy);

/// Length of the 8-connected outer boundary traced through pixel centres
/// (Moore neighbour tracing), in mm. Zero for a single pixel.
double traced_perimeter(const PlanarRegion& region, double sx, double sy);

/// Shape of a single 8-connected planar region. The equivalent ellipse has
/// the region's second central moments (each pixel contributing its own
/// s^2/12 spread), semi-axes a >= b = 2 sqrt(eigenvalue).
ShapeBlock planar_shape(const PlanarRegion& region, double sx, double sy);

/// Measures a 3D component on the axial slice where its cross-section is
/// largest (lowest z on ties), using the largest 8-connected piece of that
/// cross-section. Throws DegenerateRegion for an empty component.
ShapeBlock shape_features(const Component& component, const std::array<double, 3>& spacing);

}  // namespace gliomics
