#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "gliomics/error.hpp"
#include "gliomics/histogram.hpp"

using namespace gliomics;
using namespace gliomics::test;

namespace {

const double kLog2Ten = std::log2(10.0);

Mask full_mask(const GridGeometry& g) { return {g, std::vector<std::uint8_t>(g.voxel_count(), 1)}; }

}  // namespace

TEST(RegionHistogram, TenDistinctValuesFillEveryBin) {
  const auto g = grid(10, 1, 1);
  const Volume v = make_volume(g, [](int x, int, int) { return x; });
  for (double p : region_histogram(v, full_mask(g))) EXPECT_NEAR(p, 0.1, 1e-15);
}

TEST(RegionHistogram, ConstantRegionGoesToFirstBin) {
  const auto g = grid(4, 4, 1);
  const Histogram h = region_histogram(Volume(g, std::vector<double>(16, 3.5)), full_mask(g));
  EXPECT_EQ(h[0], 1.0);
  for (int i = 1; i < kHistogramBins; ++i) EXPECT_EQ(h[i], 0.0);
}

TEST(RegionHistogram, EmptyMaskIsZero) {
  const auto g = grid(4, 4, 1);
  const Mask empty{g, std::vector<std::uint8_t>(16, 0)};
  for (double p : region_histogram(random_volume(g, 1), empty)) EXPECT_EQ(p, 0.0);
}

TEST(RegionHistogram, MaskOnOtherGridIsRejected) {
  try {
    region_histogram(random_volume(grid(4, 4, 1), 1), full_mask(grid(4, 4, 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GeometryMismatch);
  }
}

TEST(RegionHistogram, SumsToOne) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> values(1 + rng.below(200));
    for (double& v : values) v = rng.normal(0, 10);
    const Histogram h = value_histogram(values);
    EXPECT_NEAR(std::accumulate(h.begin(), h.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(ShannonEntropy, ReferenceDistributions) {
  Histogram uniform;
  uniform.fill(0.1);
  EXPECT_NEAR(shannon_entropy(uniform), kLog2Ten, 1e-12);
  const Histogram delta{1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(shannon_entropy(delta), 0.0);
  const Histogram two{0.5, 0.5, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_NEAR(shannon_entropy(two), 1.0, 1e-15);
  EXPECT_EQ(shannon_entropy(Histogram{}), 0.0);
}

TEST(ShannonEntropy, NegativeEntryIsRejected) {
  const Histogram bad{1.1, -0.1, 0, 0, 0, 0, 0, 0, 0, 0};
  try {
    shannon_entropy(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeProbability);
  }
}

TEST(ShannonEntropy, BoundedByUniform) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    Histogram p;
    double sum = 0;
    for (double& x : p) sum += (x = rng.uniform());
    for (double& x : p) x /= sum;
    EXPECT_LT(shannon_entropy(p), kLog2Ten);
  }
}

TEST(IntensityBlock, TwoValueRegion) {
  const std::vector<double> values{2, 2, 4, 4};
  const IntensityBlock b = intensity_block(values);
  EXPECT_EQ(b.min, 2.0);
  EXPECT_EQ(b.max, 4.0);
  EXPECT_EQ(b.mean, 3.0);
  EXPECT_EQ(b.hist[0], 0.5);
  EXPECT_EQ(b.hist[9], 0.5);
  EXPECT_NEAR(b.entropy, 1.0, 1e-15);
}

TEST(IntensityBlock, EmptyAndConstantRegions) {
  for (double v : intensity_block(std::span<const double>{}).values()) EXPECT_EQ(v, 0.0);
  const std::vector<double> c(7, -1.25);
  const IntensityBlock b = intensity_block(c);
  EXPECT_EQ(b.min, -1.25);
  EXPECT_EQ(b.max, -1.25);
  EXPECT_EQ(b.mean, -1.25);
  EXPECT_EQ(b.entropy, 0.0);
}

TEST(IntensityBlock, LayoutIsHistThenStats) {
  const std::vector<double> values{0, 1, 2, 3};
  const IntensityBlock b = intensity_block(values);
  const auto v = b.values();
  for (int i = 0; i < kHistogramBins; ++i) EXPECT_EQ(v[i], b.hist[i]);
  EXPECT_EQ(v[10], b.min);
  EXPECT_EQ(v[11], b.max);
  EXPECT_EQ(v[12], b.mean);
  EXPECT_EQ(v[13], b.entropy);
}

TEST(IntensityBlock, BinPreservingAffineRemap) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> levels(5 + rng.below(100));
    for (double& v : levels) v = static_cast<double>(rng.below(10));
    // Power-of-two scale and integer offset keep every bin assignment exact.
    const double alpha = std::ldexp(1.0, static_cast<int>(rng.below(5)) - 2);
    const double beta = static_cast<double>(rng.below(41)) - 20.0;
    std::vector<double> mapped;
    for (double v : levels) mapped.push_back(alpha * v + beta);
    const IntensityBlock a = intensity_block(levels), b = intensity_block(mapped);
    EXPECT_NEAR(b.min, alpha * a.min + beta, 1e-9);
    EXPECT_NEAR(b.max, alpha * a.max + beta, 1e-9);
    EXPECT_NEAR(b.mean, alpha * a.mean + beta, 1e-9);
    EXPECT_NEAR(b.entropy, a.entropy, 1e-12);
  }
}
