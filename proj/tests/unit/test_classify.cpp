#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Cholesky>

#include "fixtures.hpp"
#include "gliomics/error.hpp"
#include "gliomics/mlp.hpp"
#include "gliomics/model_io.hpp"
#include "gliomics/standardizer.hpp"
#include "gliomics/svm.hpp"

using namespace gliomics;
using gliomics::Rng;

namespace {

struct Blobs {
  Eigen::MatrixXd x;
  std::vector<int> label;  // index into centers
};

Blobs blobs(const std::vector<Eigen::Vector2d>& centers, int per_class, double sd, std::uint64_t seed) {
  Rng rng(seed);
  Blobs b;
  b.x.resize(static_cast<Eigen::Index>(centers.size()) * per_class, 2);
  Eigen::Index r = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < per_class; ++i, ++r) {
      b.x(r, 0) = centers[c].x() + sd * rng.normal();
      b.x(r, 1) = centers[c].y() + sd * rng.normal();
      b.label.push_back(static_cast<int>(c));
    }
  }
  return b;
}

const std::vector<Eigen::Vector2d> kTriangle{{0, 0}, {5, 0}, {2.5, 4.33}};

Eigen::MatrixXd xor_points() {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 1, 1, 0, 1, 1, 0;
  return x;
}
const std::vector<int> kXorLabels{-1, -1, 1, 1};

int training_errors(const SvmModel& m, const Eigen::MatrixXd& x, const std::vector<int>& y) {
  int errors = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) errors += m.predict(x.row(i).transpose()) != y[static_cast<std::size_t>(i)];
  return errors;
}

}  // namespace

TEST(Standardizer, ColumnOneTwoThree) {
  Eigen::MatrixXd x(3, 2);
  x << 1, 5, 2, 5, 3, 5;
  const Standardizer s = Standardizer::fit(x);
  EXPECT_DOUBLE_EQ(s.mean()(0), 2.0);
  EXPECT_DOUBLE_EQ(s.sd()(0), 1.0);
  EXPECT_EQ(s.sd()(1), 0.0);
  const Eigen::MatrixXd z = s.apply(x);
  EXPECT_DOUBLE_EQ(z(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(z(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(z(2, 0), 1.0);
  for (int r = 0; r < 3; ++r) EXPECT_EQ(z(r, 1), 0.0);
}

TEST(Standardizer, UnseenRowUsesTrainingStatistics) {
  Eigen::MatrixXd x(2, 1);
  x << 0, 2;
  const Standardizer s = Standardizer::fit(x);
  Eigen::VectorXd row(1);
  row << 10;
  EXPECT_NEAR(s.apply_row(row)(0), (10 - 1) / std::sqrt(2.0), 1e-12);
}

TEST(Standardizer, EmptyMatrixIsRejected) {
  try {
    Standardizer::fit(Eigen::MatrixXd(0, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyMatrix);
  }
}

TEST(Kernel, RbfGramIsSymmetricPsd) {
  Rng rng(1);
  Eigen::MatrixXd x(30, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const Eigen::MatrixXd k = Kernel::rbf(0.7).gram(x);
  EXPECT_LT((k - k.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd jittered = k + 1e-10 * Eigen::MatrixXd::Identity(30, 30);
  EXPECT_EQ(jittered.llt().info(), Eigen::Success);
  EXPECT_DOUBLE_EQ(k(3, 3), 1.0);
}

TEST(Svm, SeparableBlobsLinear) {
  const Blobs b = blobs({{-3, -3}, {3, 3}}, 40, 1.0, 2);
  std::vector<int> y;
  for (int l : b.label) y.push_back(l == 0 ? -1 : 1);
  const SvmModel m = train_svm_binary(b.x, y, Kernel::linear(), {.C = 1.0});
  EXPECT_EQ(training_errors(m, b.x, y), 0);
}

TEST(Svm, XorNeedsRbf) {
  const Eigen::MatrixXd x = xor_points();
  EXPECT_EQ(training_errors(train_svm_binary(x, kXorLabels, Kernel::rbf(1.0)), x, kXorLabels), 0);
  EXPECT_GE(training_errors(train_svm_binary(x, kXorLabels, Kernel::linear()), x, kXorLabels), 1);
}

TEST(Svm, XorDualMatchesClosedForm) {
  // By symmetry every alpha is equal: alpha = 1 / (1 - e^-1)^2, capped at C.
  const double closed = 1.0 / std::pow(1.0 - std::exp(-1.0), 2);
  for (double c : {1.0, 10.0}) {
    const SvmSolution s = solve_svm_dual(xor_points(), kXorLabels, Kernel::rbf(1.0), {.C = c, .tolerance = 1e-9});
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(s.alpha(i), std::min(c, closed), 1e-6) << c;
    EXPECT_NEAR(s.bias, 0.0, 1e-6);
  }
}

TEST(Svm, DualConstraintAndKkt) {
  Rng rng(3);
  Eigen::MatrixXd x(60, 3);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < 60; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    y.push_back(x(i, 0) + 0.5 * x(i, 1) + 0.3 * rng.normal() > 0 ? 1 : -1);
  }
  const SvmParams params{.C = 2.0, .tolerance = 1e-4};
  const Kernel k = Kernel::rbf(0.5);
  const SvmSolution s = solve_svm_dual(x, y, k, params);
  double balance = 0;
  for (Eigen::Index i = 0; i < 60; ++i) balance += s.alpha(i) * y[static_cast<std::size_t>(i)];
  EXPECT_NEAR(balance, 0.0, 1e-6);
  const Eigen::MatrixXd gram = k.gram(x);
  const double tol = 1e-3;
  for (Eigen::Index i = 0; i < 60; ++i) {
    double f = s.bias;
    for (Eigen::Index j = 0; j < 60; ++j) f += s.alpha(j) * y[static_cast<std::size_t>(j)] * gram(i, j);
    const double margin = y[static_cast<std::size_t>(i)] * f;
    const double a = s.alpha(i);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, params.C);
    if (a <= 1e-12) EXPECT_GE(margin, 1 - tol);
    else if (a >= params.C - 1e-12) EXPECT_LE(margin, 1 + tol);
    else EXPECT_NEAR(margin, 1.0, tol);
  }
}

TEST(Svm, SingleClassIsRejected) {
  try {
    train_svm_binary(xor_points(), {1, 1, 1, 1}, Kernel::linear());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
}

TEST(Svm, TinyBudgetIsNoConvergence) {
  const Blobs b = blobs({{0, 0}, {0.5, 0}}, 50, 1.0, 4);
  std::vector<int> y;
  for (int l : b.label) y.push_back(l == 0 ? -1 : 1);
  try {
    solve_svm_dual(b.x, y, Kernel::rbf(1.0), {.C = 100.0, .tolerance = 1e-9, .max_passes = 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
}

TEST(OvaSvm, ThreeBlobs) {
  const Blobs train = blobs(kTriangle, 40, 0.8, 5);
  const Blobs test = blobs(kTriangle, 40, 0.8, 6);
  std::vector<int> grades;
  for (int l : train.label) grades.push_back(l + 2);
  const OvaSvm ova = train_ova(train.x, grades, Kernel::rbf(0.5), {.C = 10.0});
  int correct = 0;
  for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
    correct += ova.predict(test.x.row(i).transpose()) == test.label[static_cast<std::size_t>(i)] + 2;
  }
  EXPECT_GE(correct, static_cast<int>(0.95 * test.x.rows()));
}

TEST(OvaSelect, DominantShiftAndTies) {
  const std::array<int, 3> prevalence{5, 5, 5};
  EXPECT_EQ(ova_select({-1.0, 2.0, 0.5}, prevalence), 3);
  EXPECT_EQ(ova_select({-1.0 + 7, 2.0 + 7, 0.5 + 7}, prevalence), 3);
  EXPECT_EQ(ova_select({0.3, 0.3, -1.0}, prevalence), 2);
  EXPECT_EQ(ova_select({0.3, 0.3, -1.0}, {4, 9, 1}), 3);
  EXPECT_EQ(ova_select({0.3, 0.3, 0.3}, {4, 4, 9}), 4);
}

TEST(Mlp, SoftmaxIsPositiveAndNormalized) {
  const MlpModel m = MlpModel::initialize(4, 6, 3, 1);
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(4);
    for (int i = 0; i < 4; ++i) x(i) = 5 * rng.normal();
    const Eigen::VectorXd p = m.forward(x);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GT(p.minCoeff(), 0.0);
  }
}

TEST(Mlp, ZeroWeightsGiveLogK) {
  const MlpModel m = MlpModel::zeros(3, 4, 3);
  Eigen::MatrixXd x(3, 3);
  x << 1, 2, 3, -1, 0, 1, 4, 4, 4;
  EXPECT_NEAR(cross_entropy(m, x, {0, 1, 2}), std::log(3.0), 1e-12);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  Rng rng(7);
  Eigen::MatrixXd x(12, 5);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  std::vector<int> labels;
  for (int i = 0; i < 12; ++i) labels.push_back(i % 3);
  EXPECT_LT(mlp_gradient_check(MlpModel::initialize(5, 7, 3, 8), x, labels), 1e-5);
}

TEST(Mlp, DuplicatedSampleDoublesItsContribution) {
  const MlpModel m = MlpModel::initialize(2, 3, 2, 9);
  Eigen::MatrixXd ab(2, 2), aab(3, 2), a(1, 2);
  ab << 0.5, -1, 2, 0.25;
  aab << 0.5, -1, 0.5, -1, 2, 0.25;
  a << 0.5, -1;
  Eigen::VectorXd g_ab, g_aab, g_a;
  cross_entropy_gradient(m, ab, {0, 1}, g_ab);
  cross_entropy_gradient(m, aab, {0, 0, 1}, g_aab);
  cross_entropy_gradient(m, a, {0}, g_a);
  // Gradients are means, so compare the summed contributions.
  EXPECT_LT((3 * g_aab - 2 * g_ab - g_a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Mlp, FlattenAssignRoundTrip) {
  const MlpModel m = MlpModel::initialize(3, 4, 2, 10);
  MlpModel z = MlpModel::zeros(3, 4, 2);
  z.assign(m.flatten());
  EXPECT_EQ(z.flatten(), m.flatten());
  EXPECT_EQ(m.parameter_count(), 3 * 4 + 4 + 4 * 2 + 2);
}

class MlpTraining : public ::testing::Test {
 protected:
  Blobs train = blobs(kTriangle, 100, 1.0, 11);
  Blobs val = blobs(kTriangle, 20, 1.0, 12);
  Blobs test = blobs(kTriangle, 100, 1.0, 13);
};

TEST_F(MlpTraining, ThreeBlobsAccuracy) {
  MlpTrainConfig cfg;
  cfg.seed = 1;
  const MlpTrainResult r = train_mlp(train.x, train.label, val.x, val.label, 3, cfg);
  int correct = 0;
  for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
    correct += r.model.predict(test.x.row(i).transpose()) == test.label[static_cast<std::size_t>(i)];
  }
  EXPECT_GE(correct, 285);
}

TEST_F(MlpTraining, LossDecreasesAndStepsNeverIncreaseIt) {
  MlpTrainConfig cfg;
  cfg.seed = 2;
  cfg.max_iters = 50;
  const MlpTrainResult r = train_mlp(train.x, train.label, Eigen::MatrixXd(0, 2), {}, 3, cfg);
  ASSERT_GE(r.training_loss.size(), 2u);
  EXPECT_LT(r.training_loss.back(), r.training_loss.front());
  for (std::size_t i = 1; i < r.training_loss.size(); ++i) EXPECT_LE(r.training_loss[i], r.training_loss[i - 1]);
}

TEST_F(MlpTraining, SameSeedSameWeights) {
  MlpTrainConfig cfg;
  cfg.seed = 3;
  cfg.max_iters = 40;
  const auto a = train_mlp(train.x, train.label, val.x, val.label, 3, cfg);
  const auto b = train_mlp(train.x, train.label, val.x, val.label, 3, cfg);
  EXPECT_EQ(a.model.flatten(), b.model.flatten());
  cfg.seed = 4;
  const auto c = train_mlp(train.x, train.label, val.x, val.label, 3, cfg);
  EXPECT_NE(a.model.flatten(), c.model.flatten());
}

TEST_F(MlpTraining, SingleClassIsRejected) {
  try {
    train_mlp(train.x, std::vector<int>(300, 1), val.x, val.label, 3, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClass);
  }
}

TEST_F(MlpTraining, NanInputDiverges) {
  Eigen::MatrixXd x = train.x;
  x(0, 0) = std::nan("");
  try {
    train_mlp(x, train.label, val.x, val.label, 3, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivergedLoss);
  }
}

TEST(ModelIo, RoundTripEveryKind) {
  const Blobs b = blobs(kTriangle, 10, 0.5, 14);
  std::vector<int> grades, y;
  for (int l : b.label) {
    grades.push_back(l + 2);
    y.push_back(l == 0 ? 1 : -1);
  }
  const Standardizer s = Standardizer::fit(b.x);
  const Eigen::MatrixXd z = s.apply(b.x);
  const std::vector<StoredModel> models{
      {train_svm_binary(z, y, Kernel::rbf(0.3)), s, 5},
      {train_ova(z, grades, Kernel::linear()), s, 6},
      {MlpModel::initialize(2, 3, 3, 7), s, 7},
  };
  for (const StoredModel& m : models) {
    const std::string json = to_json(m);
    const StoredModel back = model_from_json(json);
    EXPECT_EQ(back.seed, m.seed);
    EXPECT_EQ(back.model.index(), m.model.index());
    EXPECT_EQ(to_json(back), json);
  }
  try {
    model_from_json("{\"type\": 3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(Standardizer, NonFiniteIsRejected) {
  Eigen::MatrixXd x(2, 1);
  x << 1, std::nan("");
  EXPECT_THROW(Standardizer::fit(x), Error);
}
