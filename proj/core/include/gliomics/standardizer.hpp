#pragma once

#include <Eigen/Core>

namespace gliomics {

/// Per-column z-score learned from training rows. Uses the sample (n-1)
/// standard deviation; constant columns map to 0.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(Eigen::VectorXd mean, Eigen::VectorXd sd);

  /// Throws EmptyMatrix for a matrix without rows or columns and
  /// InvalidArgument for NaN or infinite entries (apply rejects them too).
  static Standardizer fit(const Eigen::MatrixXd& x);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply_row(const Eigen::VectorXd& row) const;

  const Eigen::VectorXd& mean() const { return mean_; }
  /// 0 marks a constant column.
  const Eigen::VectorXd& sd() const { return sd_; }
  Eigen::Index dimension() const { return mean_.size(); }

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd sd_;
};

}  // namespace gliomics
