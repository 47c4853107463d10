#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "gliomics/error.hpp"
#include "gliomics/resample.hpp"

using namespace gliomics;
using namespace gliomics::test;

TEST(Resample, IdentityGeometryKeepsData) {
  const auto g = GridGeometry::axis_aligned({7, 6, 5}, {1.2, 0.8, 2.0}, {3, -2, 1});
  const Volume v = random_volume(g, 11);
  for (auto mode : {Interpolation::Linear, Interpolation::Nearest}) {
    const Volume r = resample(v, g, mode);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(r[i], v[i], 1e-6);
  }
}

TEST(Resample, OneVoxelShiftMatchesIndexShift) {
  const auto src = grid(6, 4, 3);
  const Volume v = random_volume(src, 12);
  const auto target = GridGeometry::axis_aligned({6, 4, 3}, {1, 1, 1}, {1, 0, 0});
  const Volume r = resample(v, target);
  for (int z = 0; z < 3; ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 6; ++x) {
        const double expected = x + 1 < 6 ? v.at(x + 1, y, z) : 0.0;
        EXPECT_NEAR(r.at(x, y, z), expected, 1e-12);
      }
}

TEST(Resample, LinearInterpolatesMidpoints) {
  const auto src = grid(2, 1, 1);
  const Volume v(src, {10.0, 20.0});
  EXPECT_NEAR(*sample_linear(v, Eigen::Vector3d(0.25, 0, 0)), 12.5, 1e-12);
  EXPECT_FALSE(sample_linear(v, Eigen::Vector3d(1.5, 0, 0)).has_value());
}

TEST(Resample, LabelMapNearestIntroducesNoNewLabels) {
  const auto src = grid(8, 8, 8);
  Rng rng(4);
  const LabelMap lm = make_labels(src, [&](int, int, int) { return static_cast<int>(rng.below(3)) * 2; });
  const auto target = GridGeometry::axis_aligned({11, 9, 7}, {0.7, 0.9, 1.3}, {0.3, -0.4, 0.2});
  const LabelMap r = resample(lm, target);
  std::set<int> seen(r.data().begin(), r.data().end());
  for (int l : seen) EXPECT_TRUE(l == 0 || l == 2 || l == 4) << l;
}

TEST(Resample, LinearOnLabelMapIsRejected) {
  const LabelMap lm(grid(2, 2, 2), std::vector<std::uint8_t>(8, 1));
  try {
    resample(lm, lm.geometry(), Interpolation::Linear);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModeMismatch);
  }
}
