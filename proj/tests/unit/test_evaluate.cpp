#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "gliomics/error.hpp"
#include "gliomics/evaluate.hpp"

using namespace gliomics;

namespace {

std::vector<int> balanced(int per_class, std::initializer_list<int> classes) {
  std::vector<int> out;
  for (int i = 0; i < per_class; ++i)
    for (int c : classes) out.push_back(c);
  return out;
}

/// Pairwise count: P(score+ > score-) with half credit for ties.
double mann_whitney_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

}  // namespace

TEST(StratifiedSplit, TenPerClassGivesEightOneOne) {
  const auto classes = balanced(10, {2, 3, 4});
  const Split s = stratified_split(classes, {.seed = 1});
  for (int c : {2, 3, 4}) {
    const auto count = [&](const std::vector<std::size_t>& idx) {
      return std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return classes[i] == c; });
    };
    EXPECT_EQ(count(s.train), 8);
    EXPECT_EQ(count(s.validation), 1);
    EXPECT_EQ(count(s.test), 1);
  }
}

TEST(StratifiedSplit, DisjointExhaustiveSortedAndDeterministic) {
  Rng rng(2);
  std::vector<int> classes;
  for (int i = 0; i < 57; ++i) classes.push_back(2 + static_cast<int>(rng.below(3)));
  const Split a = stratified_split(classes, {.seed = 7});
  const Split b = stratified_split(classes, {.seed = 7});
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::set<std::size_t> all;
  for (const auto* part : {&a.train, &a.validation, &a.test}) {
    EXPECT_TRUE(std::is_sorted(part->begin(), part->end()));
    for (std::size_t i : *part) EXPECT_TRUE(all.insert(i).second);
  }
  EXPECT_EQ(all.size(), classes.size());
  const Split c = stratified_split(classes, {.seed = 8});
  EXPECT_NE(a.test, c.test);
}

TEST(StratifiedSplit, TinyClassIsRejected) {
  const std::vector<int> classes{2, 2, 2, 2, 3, 3};
  try {
    stratified_split(classes, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ClassTooSmall);
  }
}

TEST(StratifiedSplit, FractionsMustSumToOne) {
  EXPECT_THROW((SplitSpec{.train = 0.5, .validation = 0.1, .test = 0.1}.validate()), Error);
}

TEST(RocAuc, PerfectSeparation) {
  const std::vector<double> s{0.1, 0.2, 0.8, 0.9};
  const std::vector<int> y{0, 0, 1, 1};
  const RocCurve r = roc_auc(s, y);
  EXPECT_EQ(r.auc, 1.0);
  EXPECT_EQ(r.points.front().fpr, 0.0);
  EXPECT_EQ(r.points.back().tpr, 1.0);
}

TEST(RocAuc, MatchesMannWhitneyWithTies) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(8));
      y[i] = static_cast<int>(rng.below(2));
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_NEAR(roc_auc(s, y).auc, mann_whitney_auc(s, y), 1e-12);
  }
}

TEST(RocAuc, PermutedLabelsNearHalf) {
  Rng rng(4);
  std::vector<double> s(1000);
  std::vector<int> y(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    s[i] = rng.uniform();
    y[i] = i % 2;
  }
  rng.shuffle(std::span<int>(y));
  const double auc = roc_auc(s, y).auc;
  EXPECT_GE(auc, 0.45);
  EXPECT_LE(auc, 0.55);
}

TEST(RocAuc, MonotoneTransformAndSignFlip) {
  Rng rng(5);
  std::vector<double> s(200), t(200), neg(200);
  std::vector<int> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    y[i] = static_cast<int>(rng.below(2));
    s[i] = rng.normal(y[i], 1.0);
    t[i] = std::exp(3 * s[i]) + 2;
    neg[i] = -s[i];
  }
  const double auc = roc_auc(s, y).auc;
  EXPECT_EQ(roc_auc(t, y).auc, auc);
  EXPECT_NEAR(roc_auc(neg, y).auc, 1 - auc, 1e-12);
}

TEST(RocAuc, SingleClassIsRejected) {
  const std::vector<double> s{1, 2};
  const std::vector<int> y{1, 1};
  EXPECT_THROW(roc_auc(s, y), Error);
}

TEST(ClassificationReport, PerfectPrediction) {
  const std::vector<int> t{2, 3, 4, 4, 3};
  const EvalReport r = classification_report(t, t);
  EXPECT_EQ(r.accuracy, 1.0);
  for (double s : r.sensitivity) EXPECT_EQ(s, 1.0);
}

TEST(ClassificationReport, EverythingOneClass) {
  const auto truth = balanced(5, {2, 3, 4});
  const std::vector<int> pred(truth.size(), 3);
  const EvalReport r = classification_report(pred, truth);
  EXPECT_NEAR(r.accuracy, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(r.sensitivity[1], 1.0);
  EXPECT_EQ(r.specificity[1], 0.0);
  EXPECT_EQ(r.sensitivity[0], 0.0);
}

TEST(ClassificationReport, BinaryArithmetic) {
  std::vector<int> truth, pred;
  const auto add = [&](int t, int p, int n) {
    for (int i = 0; i < n; ++i) {
      truth.push_back(t);
      pred.push_back(p);
    }
  };
  add(1, 1, 8);
  add(1, 0, 2);
  add(0, 0, 9);
  add(0, 1, 1);
  const std::vector<int> classes{0, 1};
  const EvalReport r = classification_report(pred, truth, classes);
  EXPECT_DOUBLE_EQ(r.sensitivity[1], 0.8);
  EXPECT_DOUBLE_EQ(r.specificity[1], 0.9);
  EXPECT_EQ(r.confusion[1][0], 2);
  EXPECT_EQ(r.total(), 20);
}

TEST(ClassificationReport, UndefinedRateIsNan) {
  const std::vector<int> truth{2, 2, 2}, pred{2, 3, 2}, classes{2, 3};
  const EvalReport r = classification_report(pred, truth, classes);
  EXPECT_TRUE(std::isnan(r.sensitivity[1]));
}

TEST(ClassificationReport, LengthMismatch) {
  const std::vector<int> a{1, 2}, b{1};
  try {
    classification_report(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(RefreshRates, PooledConfusion) {
  EvalReport r;
  r.classes = {0, 1};
  r.confusion = {{9, 1}, {2, 8}};
  refresh_rates(r);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.85);
  EXPECT_DOUBLE_EQ(r.sensitivity[1], 0.8);
}

TEST(Summaries, MeanAndBest) {
  const RunSummary c = summarize({0.6, 0.6, 0.6});
  EXPECT_EQ(c.mean, c.best);
  const RunSummary s = summarize({0.9, 0.7});
  EXPECT_DOUBLE_EQ(s.mean, 0.8);
  EXPECT_EQ(s.best, 0.9);
  EXPECT_GE(summarize({0.1, 0.2, 0.30000000000000004}).best, summarize({0.1, 0.2, 0.30000000000000004}).mean);
}

TEST(RepeatRuns, DeterministicAcrossJobCounts) {
  const auto trainer = [](std::uint64_t seed) { return Rng(seed).uniform(); };
  const RunSummary a = repeat_runs(trainer, 100, 42, 1);
  const RunSummary b = repeat_runs(trainer, 100, 42, 4);
  EXPECT_EQ(a.per_run, b.per_run);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.first_seed, 42u);
  EXPECT_EQ(a.n_runs(), 100u);
}

TEST(RepeatRuns, FailureNamesRunAndSeed) {
  try {
    repeat_runs([](std::uint64_t seed) -> double {
      if (seed == 13) fail(ErrorCode::NoConvergence, "stuck");
      return 1.0;
    }, 10, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RunFailed);
    EXPECT_NE(std::string(e.what()).find("run 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("seed 13"), std::string::npos);
  }
}
