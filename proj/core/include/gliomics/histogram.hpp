#pragma once

#include <array>
#include <span>

#include "gliomics/volume.hpp"

namespace gliomics {

inline constexpr int kHistogramBins = 10;
inline constexpr int kIntensityBlockLength = kHistogramBins + 4;

using Histogram = std::array<double, kHistogramBins>;

/// Histogram, range and entropy of the intensities inside one region.
/// An empty region is all zeros.
struct IntensityBlock {
  Histogram hist{};
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double entropy = 0.0;  // bits

  /// hist[0..9], min, max, mean, entropy.
  std::array<double, kIntensityBlockLength> values() const;
};

/// 10-bin relative-frequency histogram over the masked voxels. The bin edges
/// divide the region's own [min, max] into equal intervals, the last one
/// closed. A constant region puts all mass in bin 0; an empty one is zero.
/// Throws GeometryMismatch when the mask is on a different grid.
Histogram region_histogram(const Volume& volume, const Mask& mask);

/// Histogram of raw values with the same binning rule.
Histogram value_histogram(std::span<const double> values);

/// -sum p log2 p over the non-zero entries. Throws NegativeProbability for a
/// negative entry; an all-zero input has entropy 0.
double shannon_entropy(std::span<const double> p);

IntensityBlock intensity_block(const Volume& volume, const Mask& mask);
IntensityBlock intensity_block(std::span<const double> values);

}  // namespace gliomics
