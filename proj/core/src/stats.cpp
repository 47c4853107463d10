#include "gliomics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gliomics/error.hpp"

namespace gliomics {
namespace {

struct Pooled {
  std::vector<double> ranks;           // aligned with concatenated groups
  std::vector<std::size_t> offsets;    // group starts, plus the end
  double tie_sum = 0.0;                // sum of t^3 - t over tie blocks
  std::size_t n = 0;
};

Pooled pool(const GroupSamples& groups) {
  Pooled p;
  std::vector<double> all;
  p.offsets.push_back(0);
  for (const auto& g : groups) {
    if (g.empty()) fail(ErrorCode::InvalidArgument, "every group needs at least one observation");
    all.insert(all.end(), g.begin(), g.end());
    p.offsets.push_back(all.size());
  }
  p.n = all.size();
  p.ranks = midranks(all);
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    const double t = static_cast<double>(j - i);
    p.tie_sum += t * t * t - t;
    i = j;
  }
  return p;
}

double rank_sum(const Pooled& p, std::size_t g) {
  return std::accumulate(p.ranks.begin() + static_cast<std::ptrdiff_t>(p.offsets[g]),
                         p.ranks.begin() + static_cast<std::ptrdiff_t>(p.offsets[g + 1]), 0.0);
}

// Series for P(a, x); converges for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) (modified Lentz); converges for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-17) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

KwResult kruskal_wallis(const GroupSamples& groups) {
  if (groups.size() < 2) fail(ErrorCode::TooFewGroups, "Kruskal-Wallis needs at least two groups");
  const Pooled p = pool(groups);
  if (p.n < 3) fail(ErrorCode::InvalidArgument, "Kruskal-Wallis needs at least three observations");
  KwResult out;
  out.df = static_cast<int>(groups.size()) - 1;
  const double n = static_cast<double>(p.n);
  const double correction = 1.0 - p.tie_sum / (n * n * n - n);
  if (correction <= 0.0) {
    out.all_identical = true;
    return out;
  }
  double s = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double r = rank_sum(p, g);
    s += r * r / static_cast<double>(groups[g].size());
  }
  const double h = (12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0)) / correction;
  out.h = std::max(0.0, h);
  out.p = chi2_sf(out.h, out.df);
  return out;
}

DunnResult dunn_posthoc(const GroupSamples& groups, double alpha) {
  if (groups.size() < 3) fail(ErrorCode::TooFewGroups, "Dunn's test needs at least three groups");
  const Pooled p = pool(groups);
  const double n = static_cast<double>(p.n);
  const std::size_t k = groups.size();
  const double comparisons = static_cast<double>(k * (k - 1) / 2);
  const double base_var = n * (n + 1.0) / 12.0 - p.tie_sum / (12.0 * (n - 1.0));

  std::vector<double> mean_rank(k);
  for (std::size_t g = 0; g < k; ++g) {
    mean_rank[g] = rank_sum(p, g) / static_cast<double>(groups[g].size());
  }
  DunnResult out;
  out.alpha = alpha;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      DunnPair pair;
      pair.first = static_cast<int>(i);
      pair.second = static_cast<int>(j);
      const double var = base_var * (1.0 / static_cast<double>(groups[i].size()) +
                                     1.0 / static_cast<double>(groups[j].size()));
      const double diff = mean_rank[i] - mean_rank[j];
      if (var > 0.0 && diff != 0.0) {
        pair.z = diff / std::sqrt(var);
        pair.p = std::min(1.0, 2.0 * normal_sf(std::abs(pair.z)));
      }
      pair.p_adjusted = std::min(1.0, pair.p * comparisons);
      pair.significant = pair.p_adjusted < alpha;
      out.pairs.push_back(pair);
    }
  }
  return out;
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) fail(ErrorCode::InvalidArgument, "gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
  return std::clamp(gamma_q_fraction(a, x), 0.0, 1.0);
}

double chi2_sf(double x, int df) {
  if (df < 1) fail(ErrorCode::InvalidArgument, "chi-square needs df >= 1");
  if (x < 0.0) fail(ErrorCode::InvalidArgument, "chi-square statistic must be >= 0");
  return gamma_q(0.5 * df, 0.5 * x);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace gliomics
