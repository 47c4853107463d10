#include "gliomics/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gliomics/error.hpp"

namespace gliomics {
namespace {

void require_same_grid(const Volume& volume, const Mask& mask) {
  if (!volume.geometry().same_grid(mask.geometry) || mask.data.size() != volume.size()) {
    fail(ErrorCode::GeometryMismatch, "mask and volume are not on the same grid");
  }
}

std::vector<double> masked_values(const Volume& volume, const Mask& mask) {
  require_same_grid(volume, mask);
  std::vector<double> values;
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    if (mask.data[i] != 0) values.push_back(volume[i]);
  }
  return values;
}

}  // namespace

std::array<double, kIntensityBlockLength> IntensityBlock::values() const {
  std::array<double, kIntensityBlockLength> out{};
  std::copy(hist.begin(), hist.end(), out.begin());
  out[kHistogramBins] = min;
  out[kHistogramBins + 1] = max;
  out[kHistogramBins + 2] = mean;
  out[kHistogramBins + 3] = entropy;
  return out;
}

Histogram value_histogram(std::span<const double> values) {
  Histogram hist{};
  if (values.empty()) return hist;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) {
    hist[0] = 1.0;
    return hist;
  }
  std::array<std::size_t, kHistogramBins> counts{};
  for (double v : values) {
    const auto b = static_cast<int>(std::floor((v - lo) / range * kHistogramBins));
    ++counts[static_cast<std::size_t>(std::clamp(b, 0, kHistogramBins - 1))];
  }
  const double n = static_cast<double>(values.size());
  for (int b = 0; b < kHistogramBins; ++b) hist[b] = static_cast<double>(counts[b]) / n;
  return hist;
}

Histogram region_histogram(const Volume& volume, const Mask& mask) {
  return value_histogram(masked_values(volume, mask));
}

double shannon_entropy(std::span<const double> p) {
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) {
      fail(ErrorCode::NegativeProbability,
           "entry " + std::to_string(i) + " is " + std::to_string(p[i]));
    }
    if (p[i] > 0.0) e -= p[i] * std::log2(p[i]);
  }
  // -p log p can round to a hair below zero for a single unit mass.
  return std::max(0.0, e);
}

IntensityBlock intensity_block(std::span<const double> values) {
  IntensityBlock block;
  if (values.empty()) return block;
  block.hist = value_histogram(values);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  block.min = *lo;
  block.max = *hi;
  double sum = 0.0;
  for (double v : values) sum += v;
  block.mean = std::clamp(sum / static_cast<double>(values.size()), block.min, block.max);
  block.entropy = shannon_entropy(block.hist);
  return block;
}

IntensityBlock intensity_block(const Volume& volume, const Mask& mask) {
  return intensity_block(masked_values(volume, mask));
}

}  // namespace gliomics
