#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

namespace gliomics {

struct Kernel {
  enum class Type { Linear, Rbf };
  Type type = Type::Linear;
  double gamma = 1.0;  // RBF only: exp(-gamma |a - b|^2)

  static Kernel linear() { return {Type::Linear, 0.0}; }
  static Kernel rbf(double gamma) { return {Type::Rbf, gamma}; }

  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  Eigen::MatrixXd gram(const Eigen::MatrixXd& x) const;
};

struct SvmParams {
  double C = 1.0;
  /// Stop when the maximal KKT violation (m - M) drops below this.
  double tolerance = 1e-3;
  /// Iteration budget, in multiples of the training-set size.
  int max_passes = 10000;
};

/// Soft-margin dual solution on the training set.
struct SvmSolution {
  Eigen::VectorXd alpha;  // one per training row, 0 <= alpha <= C
  double bias = 0.0;
  long iterations = 0;
  /// m(alpha) - M(alpha) at termination.
  double gap = 0.0;
};

/// Sequential minimal optimization with maximal-violating-pair working-set
/// selection. y must be +1/-1. Throws SingleClass when a class is missing
/// and NoConvergence when the pass budget runs out.
SvmSolution solve_svm_dual(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const Kernel& kernel, const SvmParams& params);

/// Binary SVM: decision(x) = sum_i coef_i K(sv_i, x) + bias, coef_i = alpha_i y_i.
struct SvmModel {
  Kernel kernel;
  double C = 1.0;
  Eigen::MatrixXd support_vectors;  // one row per support vector
  Eigen::VectorXd dual_coef;        // alpha_i * y_i
  double bias = 0.0;

  double decision(const Eigen::VectorXd& x) const;
  Eigen::VectorXd decision(const Eigen::MatrixXd& x) const;
  int predict(const Eigen::VectorXd& x) const { return decision(x) >= 0.0 ? 1 : -1; }
};

SvmModel train_svm_binary(const Eigen::MatrixXd& x, const std::vector<int>& y,
                          const Kernel& kernel, const SvmParams& params = {});

/// One-against-all over grades II, III, IV.
struct OvaSvm {
  static constexpr std::array<int, 3> kGrades{2, 3, 4};
  std::array<SvmModel, 3> members;
  /// Training counts per grade; used to break decision ties.
  std::array<int, 3> prevalence{};

  std::array<double, 3> decision_values(const Eigen::VectorXd& x) const;
  int predict(const Eigen::VectorXd& x) const;
};

/// Grade with the largest decision value. Values within 1e-12 of the
/// maximum tie; ties go to the higher training prevalence, then the lower grade.
int ova_select(const std::array<double, 3>& decisions, const std::array<int, 3>& prevalence);

/// grades must be in {2,3,4} with at least two samples of each.
OvaSvm train_ova(const Eigen::MatrixXd& x, const std::vector<int>& grades, const Kernel& kernel,
                 const SvmParams& params = {});

}  // namespace gliomics
