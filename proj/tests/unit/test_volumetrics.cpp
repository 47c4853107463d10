#include <gtest/gtest.h>

#include <numeric>

#include "fixtures.hpp"
#include "gliomics/volumetrics.hpp"

using namespace gliomics;
using namespace gliomics::test;

namespace {

LabelMap counts(const GridGeometry& g, std::array<int, 5> n) {
  std::vector<std::uint8_t> data(g.voxel_count(), 0);
  std::size_t i = 0;
  for (int l = 1; l <= 5; ++l)
    for (int k = 0; k < n[l - 1]; ++k) data.at(i++) = static_cast<std::uint8_t>(l);
  return LabelMap(g, std::move(data));
}

}  // namespace

TEST(ComponentVolumes, UnitSpacing) {
  const ComponentVolumes v = component_volumes(counts(grid(10, 2, 1), {0, 10, 0, 0, 0}));
  EXPECT_EQ(v.volume_mm3[1], 10.0);
  EXPECT_EQ(v.total_mm3, 10.0);
}

TEST(ComponentVolumes, AnisotropicSpacing) {
  const ComponentVolumes v = component_volumes(counts(grid(4, 4, 1, {0.5, 0.5, 5}), {0, 8, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(v.volume_mm3[1], 10.0);
}

TEST(ComponentVolumes, EmptyMap) {
  const ComponentVolumes v = component_volumes(counts(grid(3, 3, 3), {}));
  for (double x : v.volume_mm3) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(v.total_mm3, 0.0);
  const VolumeRatios r = volume_ratios(v);
  EXPECT_TRUE(r.degenerate_total);
  for (double x : r.percent) EXPECT_EQ(x, 0.0);
}

TEST(VolumeRatios, SingleLabelIsHundred) {
  const VolumeRatios r = volume_ratios(component_volumes(counts(grid(5, 5, 5), {0, 0, 17, 0, 0})));
  EXPECT_EQ(r.percent[2], 100.0);
  for (int i : {0, 1, 3, 4}) EXPECT_EQ(r.percent[i], 0.0);
}

TEST(VolumeRatios, EqualVolumesAreTwentyEach) {
  const VolumeRatios r = volume_ratios(component_volumes(counts(grid(5, 5, 5), {9, 9, 9, 9, 9})));
  for (double x : r.percent) EXPECT_NEAR(x, 20.0, 1e-12);
}

TEST(VolumeRatios, SumToHundredAndIgnoreSpacingScale) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    std::array<int, 5> n{};
    for (int& k : n) k = static_cast<int>(rng.below(40));
    n[2] += 1;
    const VolumeRatios a = volume_ratios(component_volumes(counts(grid(10, 10, 2), n)));
    const VolumeRatios b = volume_ratios(component_volumes(counts(grid(10, 10, 2, {2.5, 2.5, 2.5}), n)));
    EXPECT_NEAR(std::accumulate(a.percent.begin(), a.percent.end(), 0.0), 100.0, 1e-6);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(a.percent[i], b.percent[i], 1e-9);
  }
}

TEST(VolumeRatios, EdemaCanBeLeftOutOfTotal) {
  VolumetricsOptions opts;
  opts.edema_in_total = false;
  const ComponentVolumes v = component_volumes(counts(grid(5, 5, 5), {10, 5, 5, 0, 0}), opts);
  EXPECT_EQ(v.total_mm3, 10.0);
  const VolumeRatios r = volume_ratios(v);
  EXPECT_EQ(r.percent[0], 100.0);
  EXPECT_EQ(r.percent[1], 50.0);
}
