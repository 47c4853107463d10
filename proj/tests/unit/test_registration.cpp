#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "gliomics/error.hpp"
#include "gliomics/histogram.hpp"
#include "gliomics/phantom.hpp"
#include "gliomics/registration.hpp"

using namespace gliomics;
using namespace gliomics::test;

namespace {

MiConfig hard(int bins = 32) {
  MiConfig c;
  c.bins = bins;
  c.binning = MiConfig::Binning::Hard;
  return c;
}

Volume integer_levels(const GridGeometry& g, std::uint64_t seed, int levels) {
  Rng rng(seed);
  return make_volume(g, [&](int, int, int) { return static_cast<double>(rng.below(levels)); });
}

/// Entropy in bits of the hard-binned intensities (edges over the image's own range).
double binned_entropy(const Volume& v, int bins) {
  const auto [lo, hi] = std::minmax_element(v.data().begin(), v.data().end());
  std::vector<double> p(bins, 0.0);
  for (double x : v.data()) {
    const int b = std::clamp(static_cast<int>((x - *lo) * (bins / (*hi - *lo))), 0, bins - 1);
    p[b] += 1.0 / static_cast<double>(v.size());
  }
  double h = 0.0;
  for (double q : p)
    if (q > 0) h -= q * std::log2(q);
  return h;
}

RigidTransform identity_of(const Volume& v) { return RigidTransform::identity(v.geometry().center_world()); }

}  // namespace

TEST(RigidTransform, MatrixMatchesApplyAndInverse) {
  RigidTransform t;
  t.rotation = {0.1, -0.2, 0.3};
  t.translation = {1, 2, -3};
  t.center = {5, 6, 7};
  const Eigen::Vector3d p(1.5, -2, 4);
  const Eigen::Vector4d h = t.matrix() * p.homogeneous();
  EXPECT_LT((h.head<3>() - t.apply(p)).norm(), 1e-12);
  EXPECT_LT((t.inverse().apply(t.apply(p)) - p).norm(), 1e-12);
  const Eigen::Vector3d c(5, 6, 7);
  EXPECT_LT((t.apply(c) - (c + Eigen::Vector3d(1, 2, -3))).norm(), 1e-12);
}

TEST(RigidTransform, JsonRoundTrip) {
  RigidTransform t;
  t.rotation = {0.01, 0.02, -0.03};
  t.translation = {3, -2, 0.5};
  t.center = {1, 1, 1};
  const RigidTransform back = rigid_transform_from_json(to_json(t));
  EXPECT_EQ(back.rotation, t.rotation);
  EXPECT_EQ(back.translation, t.translation);
  EXPECT_EQ(back.center, t.center);
}

TEST(MutualInformation, SelfInformationEqualsMarginalEntropy) {
  const Volume f = integer_levels(grid(16, 16, 16), 1, 20);
  EXPECT_NEAR(mutual_information(f, f, identity_of(f), hard()), binned_entropy(f, 32), 1e-12);
}

TEST(MutualInformation, AffineIntensityRemapKeepsMi) {
  const auto g = grid(16, 16, 16);
  const Volume f = integer_levels(g, 2, 32);
  const Volume m = make_volume(g, [&](int x, int y, int z) { return 2.0 * f.at(x, y, z) + 5.0; });
  for (const MiConfig& cfg : {hard(), MiConfig{}}) {
    EXPECT_NEAR(mutual_information(f, m, identity_of(f), cfg), mutual_information(f, f, identity_of(f), cfg), 1e-12);
  }
}

TEST(MutualInformation, IndependentNoiseIsNearZero) {
  const auto g = grid(64, 64, 64);
  const Volume a = random_volume(g, 5);
  const Volume b = random_volume(g, 6);
  EXPECT_LT(mutual_information(a, b, identity_of(a)), 0.1);
  EXPECT_LT(mutual_information(a, b, identity_of(a), hard()), 0.1);
}

TEST(MutualInformation, SymmetricWithHardBinning) {
  const auto g = grid(16, 16, 16);
  const Volume a = random_volume(g, 7);
  const Volume b = make_volume(g, [&](int x, int y, int z) { return a.at(x, y, z) + 0.3 * std::sin(x + y * z); });
  EXPECT_NEAR(mutual_information(a, b, identity_of(a), hard()), mutual_information(b, a, identity_of(b), hard()),
              1e-9);
}

TEST(MutualInformation, NoOverlapThrows) {
  const Volume a = random_volume(grid(16, 16, 16), 8);
  RigidTransform t = identity_of(a);
  t.translation = {100, 0, 0};
  try {
    mutual_information(a, a, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientOverlap);
  }
}

class Registration : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    geometry_ = phantom_geometry({40, 40, 40}, {1, 1, 1});
    field_ = new SmoothField(geometry_, 21, 24);
  }
  static void TearDownTestSuite() { delete field_; }
  static GridGeometry geometry_;
  static SmoothField* field_;
};
GridGeometry Registration::geometry_;
SmoothField* Registration::field_ = nullptr;

TEST_F(Registration, RecoversKnownTranslation) {
  RigidTransform truth = RigidTransform::identity(geometry_.center_world());
  truth.translation = {3.0, -2.0, 0.0};
  const Volume fixed = field_->rasterize(geometry_);
  const Volume moving = field_->rasterize_moved(geometry_, truth);
  const RegistrationResult r = register_rigid(fixed, moving);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(r.transform.translation[a], truth.translation[a], 0.5) << a;
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(r.transform.rotation[a], 0.0, std::numbers::pi / 180) << a;
}

TEST_F(Registration, AcceptedMiIsNonDecreasingAndDeterministic) {
  RigidTransform truth = RigidTransform::identity(geometry_.center_world());
  truth.rotation = {0.03, 0.0, -0.02};
  truth.translation = {1.0, 0.5, -1.5};
  const Volume fixed = field_->rasterize(geometry_);
  const Volume moving = field_->rasterize_moved(geometry_, truth);
  EsConfig es;
  es.seed = 99;
  es.max_iters = 300;
  const RegistrationResult a = register_rigid(fixed, moving, {}, es);
  const RegistrationResult b = register_rigid(fixed, moving, {}, es);
  EXPECT_GE(a.final_mi, a.initial_mi);
  for (std::size_t i = 1; i < a.accepted_mi.size(); ++i) EXPECT_GE(a.accepted_mi[i], a.accepted_mi[i - 1]);
  EXPECT_EQ(a.transform.rotation, b.transform.rotation);
  EXPECT_EQ(a.transform.translation, b.transform.translation);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST_F(Registration, IdenticalImagesStayAtIdentity) {
  const Volume fixed = field_->rasterize(geometry_);
  const RegistrationResult r = register_rigid(fixed, fixed);
  for (int a = 0; a < 3; ++a) {
    EXPECT_LE(std::abs(r.transform.translation[a]), EsConfig{}.epsilon);
    EXPECT_LE(std::abs(r.transform.rotation[a]), EsConfig{}.epsilon);
  }
}

TEST_F(Registration, CollapsedRadiusIsNoImprovement) {
  const Volume fixed = field_->rasterize(geometry_);
  EsConfig es;
  es.initial_radius = 1e-4;
  try {
    register_rigid(fixed, field_->rasterize_moved(geometry_, RigidTransform::identity()), {}, es);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoImprovement);
  }
}

TEST(SubtractionMap, ClampRules) {
  const auto g = grid(6, 5, 4);
  const Volume pre = random_volume(g, 13, 0, 100);
  const auto id = identity_of(pre);
  const auto shifted = [&](double d) {
    return make_volume(g, [&](int x, int y, int z) { return pre.at(x, y, z) + d; });
  };
  const Volume same = subtraction_map(pre, pre, id);
  const Volume brighter = subtraction_map(pre, shifted(10), id);
  const Volume darker = subtraction_map(pre, shifted(-5), id);
  for (double v : same.data()) EXPECT_EQ(v, 0.0);
  for (double v : brighter.data()) EXPECT_NEAR(v, 10.0, 1e-9);
  for (double v : darker.data()) EXPECT_EQ(v, 0.0);
}

TEST(SubtractionMap, NonNegativeUnderMotion) {
  const auto g = grid(12, 12, 12);
  const Volume pre = random_volume(g, 14, -50, 50);
  const Volume post = random_volume(g, 15, -50, 50);
  RigidTransform t = identity_of(pre);
  t.rotation = {0.1, 0.05, -0.2};
  t.translation = {1.3, -0.7, 2.1};
  const Volume sub = subtraction_map(pre, post, t);
  for (double v : sub.data()) EXPECT_GE(v, 0.0);
}
