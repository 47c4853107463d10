#pragma once

#include <vector>

#include "gliomics/volume.hpp"

namespace gliomics {

/// One connected set of mask voxels. `voxels` is in raster order, so
/// voxels.front() is the component's seed (its lowest linear index).
struct Component {
  std::vector<Index3> voxels;

  std::size_t size() const { return voxels.size(); }
  const Index3& seed() const { return voxels.front(); }
};

/// Maximal 26-connected sets of true voxels, largest first; equal sizes are
/// ordered by seed position in raster order (z, then y, then x).
std::vector<Component> connected_components(const Mask& mask);

/// 2D pixel region on one axial slice, in pixel coordinates.
struct PlanarRegion {
  std::vector<std::array<int, 2>> pixels;  // (x, y), raster order
};

/// 8-connected pieces of a planar pixel set, largest first, ties by seed.
std::vector<PlanarRegion> planar_components(const std::vector<std::array<int, 2>>& pixels);

}  // namespace gliomics
