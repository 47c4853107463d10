#pragma once

#include <span>
#include <vector>

namespace gliomics {

using GroupSamples = std::vector<std::vector<double>>;

/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> midranks(std::span<const double> values);

struct KwResult {
  double h = 0.0;
  int df = 0;
  double p = 1.0;
  /// Every observation equal: H is defined as 0 and p as 1.
  bool all_identical = false;
};

/// Kruskal-Wallis H with the tie correction, p from the chi-square upper
/// tail at k-1 degrees of freedom. Needs k >= 2 non-empty groups and N >= 3.
KwResult kruskal_wallis(const GroupSamples& groups);

struct DunnPair {
  int first = 0;   // group index i
  int second = 0;  // group index j > i
  double z = 0.0;  // (mean rank i - mean rank j) / se
  double p = 1.0;  // two-sided, unadjusted
  double p_adjusted = 1.0;  // Bonferroni, capped at 1
  bool significant = false;
};

struct DunnResult {
  std::vector<DunnPair> pairs;  // (0,1), (0,2), ..., (k-2,k-1)
  double alpha = 0.05;
};

/// Dunn's pairwise test on the pooled mid-ranks with the tie-corrected
/// variance and Bonferroni adjustment over k(k-1)/2 pairs. Needs k >= 3.
DunnResult dunn_posthoc(const GroupSamples& groups, double alpha = 0.05);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Chi-square survival function Q(df/2, x/2).
double chi2_sf(double x, int df);

/// Upper tail of the standard normal.
double normal_sf(double z);

}  // namespace gliomics
