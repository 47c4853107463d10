#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gliomics/error.hpp"
#include "gliomics/parallel.hpp"

namespace gliomics {

struct SplitSpec {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Disjoint, exhaustive index sets, each sorted ascending.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Splits each class separately: validation and test get round(f * n_c)
/// members but at least one, training gets the rest. Classes with fewer than
/// three members raise ClassTooSmall. Deterministic for a given seed.
Split stratified_split(std::span<const int> classes, const SplitSpec& spec);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1)
  double auc = 0.0;
};

/// ROC over every distinct score threshold (higher score = more positive).
/// Equal scores form one diagonal step; the trapezoidal area is therefore
/// the Mann-Whitney U / (n+ n-) with half credit for ties. labels: 1 marks
/// a positive, 0 a negative. Throws SingleClass.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

struct EvalReport {
  std::vector<int> classes;
  /// confusion[truth][predicted], indexed like `classes`.
  std::vector<std::vector<long>> confusion;
  /// One-vs-rest per class; NaN when the denominator is empty.
  std::vector<double> sensitivity;
  std::vector<double> specificity;
  double accuracy = 0.0;
  std::vector<RocPoint> roc;
  double auc = 0.0;

  long total() const;
};

/// Confusion matrix and per-class rates. `classes` fixes the row order; when
/// empty it is the sorted union of both inputs. Throws LengthMismatch.
EvalReport classification_report(std::span<const int> predicted, std::span<const int> truth,
                                 std::span<const int> classes = {});

/// Rebuilds rates and accuracy from an (accumulated) confusion matrix.
void refresh_rates(EvalReport& report);

struct RunSummary {
  std::vector<double> per_run;  // in seed order
  double mean = 0.0;
  double best = 0.0;
  std::uint64_t first_seed = 0;

  std::size_t n_runs() const { return per_run.size(); }
};

RunSummary summarize(std::vector<double> per_run, std::uint64_t first_seed = 0);

/// Calls fn(seed0 + i) for i in [0, n), possibly on `jobs` threads, and
/// returns the results in seed order. A failing run is rethrown as
/// RunFailed naming its index and seed.
template <typename Fn>
auto run_seeded(Fn&& fn, int n, std::uint64_t seed0, unsigned jobs = 1)
    -> std::vector<decltype(fn(std::uint64_t{}))> {
  using Result = decltype(fn(std::uint64_t{}));
  if (n < 1) fail(ErrorCode::InvalidArgument, "at least one run is required");
  std::vector<Result> out(static_cast<std::size_t>(n));
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    const std::uint64_t seed = seed0 + i;
    try {
      out[i] = fn(seed);
    } catch (const std::exception& e) {
      fail(ErrorCode::RunFailed, "run " + std::to_string(i) + " (seed " + std::to_string(seed) +
                                     "): " + e.what());
    }
  });
  return out;
}

/// n runs of a seeded trainer returning the chosen test metric; mean and max.
RunSummary repeat_runs(const std::function<double(std::uint64_t)>& trainer, int n = 100,
                       std::uint64_t seed0 = 0, unsigned jobs = 1);

}  // namespace gliomics
