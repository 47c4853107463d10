#include "gliomics/standardizer.hpp"

#include <cmath>
#include <string>

#include "gliomics/error.hpp"

namespace gliomics {

Standardizer::Standardizer(Eigen::VectorXd mean, Eigen::VectorXd sd)
    : mean_(std::move(mean)), sd_(std::move(sd)) {
  if (mean_.size() != sd_.size()) {
    fail(ErrorCode::LengthMismatch, "standardizer mean and sd lengths differ");
  }
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  if (x.rows() == 0 || x.cols() == 0) fail(ErrorCode::EmptyMatrix, "cannot fit on an empty matrix");
  if (!x.allFinite()) fail(ErrorCode::InvalidArgument, "cannot fit on non-finite values");
  const Eigen::VectorXd mean = x.colwise().mean().transpose();
  Eigen::VectorXd sd = Eigen::VectorXd::Zero(x.cols());
  if (x.rows() > 1) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double ss = (x.col(c).array() - mean(c)).square().sum();
      const double s = std::sqrt(ss / static_cast<double>(x.rows() - 1));
      // Relative threshold: a column that only varies in its last bits is constant.
      const double scale = std::max(1.0, x.col(c).cwiseAbs().maxCoeff());
      sd(c) = s > 1e-12 * scale ? s : 0.0;
    }
  }
  return Standardizer(mean, sd);
}

Eigen::VectorXd Standardizer::apply_row(const Eigen::VectorXd& row) const {
  if (row.size() != mean_.size()) {
    fail(ErrorCode::LengthMismatch, "row has " + std::to_string(row.size()) +
                                        " features, standardizer expects " +
                                        std::to_string(mean_.size()));
  }
  if (!row.allFinite()) fail(ErrorCode::InvalidArgument, "cannot standardize non-finite values");
  Eigen::VectorXd out(row.size());
  for (Eigen::Index c = 0; c < row.size(); ++c) {
    out(c) = sd_(c) > 0.0 ? (row(c) - mean_(c)) / sd_(c) : 0.0;
  }
  return out;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean_.size()) {
    fail(ErrorCode::LengthMismatch, "matrix has " + std::to_string(x.cols()) +
                                        " columns, standardizer expects " +
                                        std::to_string(mean_.size()));
  }
  if (!x.allFinite()) fail(ErrorCode::InvalidArgument, "cannot standardize non-finite values");
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (sd_(c) > 0.0) {
      out.col(c) = (x.col(c).array() - mean_(c)) / sd_(c);
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

}  // namespace gliomics
