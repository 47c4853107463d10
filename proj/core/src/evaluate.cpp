#include "gliomics/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "gliomics/rng.hpp"

namespace gliomics {

void SplitSpec::validate() const {
  if (!(train > 0 && validation > 0 && test > 0)) {
    fail(ErrorCode::InvalidArgument, "split fractions must all be positive");
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9) {
    fail(ErrorCode::InvalidArgument, "split fractions must sum to 1");
  }
}

Split stratified_split(std::span<const int> classes, const SplitSpec& spec) {
  spec.validate();
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < classes.size(); ++i) members[classes[i]].push_back(i);

  Rng rng(spec.seed);
  Split out;
  for (auto& [label, idx] : members) {
    const std::size_t n = idx.size();
    if (n < 3) {
      fail(ErrorCode::ClassTooSmall, "class " + std::to_string(label) + " has " +
                                         std::to_string(n) + " samples; at least 3 are needed");
    }
    const auto portion = [n](double f) {
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(f * n + 0.5)));
    };
    const std::size_t n_val = portion(spec.validation);
    const std::size_t n_test = portion(spec.test);
    if (n_val + n_test >= n) {
      fail(ErrorCode::ClassTooSmall,
           "class " + std::to_string(label) + " leaves no training samples");
    }
    rng.shuffle(std::span<std::size_t>(idx));
    out.validation.insert(out.validation.end(), idx.begin(), idx.begin() + n_val);
    out.test.insert(out.test.end(), idx.begin() + n_val, idx.begin() + n_val + n_test);
    out.train.insert(out.train.end(), idx.begin() + n_val + n_test, idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorCode::LengthMismatch, "scores and labels differ in length");
  }
  long pos = 0, neg = 0;
  for (int l : labels) {
    if (l == 1) ++pos;
    else if (l == 0) ++neg;
    else fail(ErrorCode::InvalidArgument, "ROC labels must be 0 or 1");
  }
  if (pos == 0 || neg == 0) fail(ErrorCode::SingleClass, "ROC needs positives and negatives");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve out;
  out.points.push_back({0.0, 0.0});
  long tp = 0, fp = 0;
  // Twice the area in units of one (positive, negative) pair; exact in integers.
  long long twice_area = 0;
  for (std::size_t k = 0; k < order.size();) {
    long dtp = 0, dfp = 0;
    const double s = scores[order[k]];
    for (; k < order.size() && scores[order[k]] == s; ++k) {
      if (labels[order[k]] == 1) ++dtp;
      else ++dfp;
    }
    twice_area += static_cast<long long>(dfp) * (2LL * tp + dtp);
    tp += dtp;
    fp += dfp;
    out.points.push_back({static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
  }
  out.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return out;
}

long EvalReport::total() const {
  long t = 0;
  for (const auto& row : confusion) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

void refresh_rates(EvalReport& report) {
  const std::size_t k = report.classes.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const long total = report.total();
  report.sensitivity.assign(k, nan);
  report.specificity.assign(k, nan);
  long trace = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const long tp = report.confusion[c][c];
    long fn = 0, fp = 0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fn += report.confusion[c][o];
      fp += report.confusion[o][c];
    }
    const long tn = total - tp - fn - fp;
    trace += tp;
    if (tp + fn > 0) report.sensitivity[c] = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (tn + fp > 0) report.specificity[c] = static_cast<double>(tn) / static_cast<double>(tn + fp);
  }
  report.accuracy = total > 0 ? static_cast<double>(trace) / static_cast<double>(total) : 0.0;
}

EvalReport classification_report(std::span<const int> predicted, std::span<const int> truth,
                                 std::span<const int> classes) {
  if (predicted.size() != truth.size()) {
    fail(ErrorCode::LengthMismatch, "predictions and truth differ in length");
  }
  EvalReport r;
  if (classes.empty()) {
    std::set<int> all(truth.begin(), truth.end());
    all.insert(predicted.begin(), predicted.end());
    r.classes.assign(all.begin(), all.end());
  } else {
    r.classes.assign(classes.begin(), classes.end());
  }
  std::map<int, std::size_t> slot;
  for (std::size_t c = 0; c < r.classes.size(); ++c) slot[r.classes[c]] = c;
  r.confusion.assign(r.classes.size(), std::vector<long>(r.classes.size(), 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = slot.find(truth[i]);
    const auto p = slot.find(predicted[i]);
    if (t == slot.end() || p == slot.end()) {
      fail(ErrorCode::InvalidArgument, "label outside the declared class list");
    }
    ++r.confusion[t->second][p->second];
  }
  refresh_rates(r);
  r.auc = std::numeric_limits<double>::quiet_NaN();
  return r;
}

RunSummary summarize(std::vector<double> per_run, std::uint64_t first_seed) {
  if (per_run.empty()) fail(ErrorCode::InvalidArgument, "no runs to summarize");
  RunSummary s;
  s.first_seed = first_seed;
  s.per_run = std::move(per_run);
  double sum = 0.0;
  s.best = -std::numeric_limits<double>::infinity();
  for (double v : s.per_run) {
    sum += v;
    s.best = std::max(s.best, v);
  }
  s.mean = sum / static_cast<double>(s.per_run.size());
  // Rounding in the mean can nudge it past a constant maximum.
  s.mean = std::min(s.mean, s.best);
  return s;
}

RunSummary repeat_runs(const std::function<double(std::uint64_t)>& trainer, int n,
                       std::uint64_t seed0, unsigned jobs) {
  return summarize(run_seeded(trainer, n, seed0, jobs), seed0);
}

}  // namespace gliomics
