#include "gliomics/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gliomics/error.hpp"

namespace gliomics {

double Kernel::operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  if (type == Type::Linear) return a.dot(b);
  return std::exp(-gamma * (a - b).squaredNorm());
}

Eigen::MatrixXd Kernel::gram(const Eigen::MatrixXd& x) const {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      k(i, j) = (*this)(x.row(i).transpose(), x.row(j).transpose());
      k(j, i) = k(i, j);
    }
  }
  return k;
}

SvmSolution solve_svm_dual(const Eigen::MatrixXd& x, const std::vector<int>& y,
                           const Kernel& kernel, const SvmParams& params) {
  const auto n = static_cast<Eigen::Index>(y.size());
  if (x.rows() != n) fail(ErrorCode::LengthMismatch, "SVM rows and labels differ in length");
  if (!(params.C > 0.0)) fail(ErrorCode::InvalidArgument, "SVM C must be positive");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else fail(ErrorCode::InvalidArgument, "SVM labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) fail(ErrorCode::SingleClass, "SVM training needs both classes");

  const double C = params.C;
  constexpr double tau = 1e-12;
  const Eigen::MatrixXd K = kernel.gram(x);
  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv(i) = y[static_cast<std::size_t>(i)];
  // Q_ij = y_i y_j K_ij; gradient of 1/2 a'Qa - e'a.
  const Eigen::MatrixXd Q = yv.asDiagonal() * K * yv.asDiagonal();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd G = -Eigen::VectorXd::Ones(n);

  auto in_up = [&](Eigen::Index t) {
    return (yv(t) > 0 && alpha(t) < C) || (yv(t) < 0 && alpha(t) > 0);
  };
  auto in_low = [&](Eigen::Index t) {
    return (yv(t) > 0 && alpha(t) > 0) || (yv(t) < 0 && alpha(t) < C);
  };

  const long budget = static_cast<long>(params.max_passes) * std::max<long>(n, 1);
  SvmSolution out;
  long iter = 0;
  for (;; ++iter) {
    double m = -std::numeric_limits<double>::infinity();
    double M = std::numeric_limits<double>::infinity();
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -yv(t) * G(t);
      if (in_up(t) && v > m) {
        m = v;
        i = t;
      }
      if (in_low(t) && v < M) {
        M = v;
        j = t;
      }
    }
    out.gap = m - M;
    if (i < 0 || j < 0 || m - M < params.tolerance) break;
    if (iter >= budget) {
      fail(ErrorCode::NoConvergence, "SMO did not converge within " +
                                         std::to_string(params.max_passes) +
                                         " passes (gap " + std::to_string(m - M) + ")");
    }

    const double old_i = alpha(i);
    const double old_j = alpha(j);
    if (yv(i) != yv(j)) {
      double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (-G(i) - G(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > C) {
          alpha(i) = C;
          alpha(j) = C - diff;
        }
      } else if (alpha(j) > C) {
        alpha(j) = C;
        alpha(i) = C + diff;
      }
    } else {
      double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
      if (quad <= 0) quad = tau;
      const double delta = (G(i) - G(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > C) {
        if (alpha(i) > C) {
          alpha(i) = C;
          alpha(j) = sum - C;
        }
      } else if (alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > C) {
        if (alpha(j) > C) {
          alpha(j) = C;
          alpha(i) = sum - C;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }
    const double di = alpha(i) - old_i;
    const double dj = alpha(j) - old_j;
    G += Q.col(i) * di + Q.col(j) * dj;
  }

  // Bias from the free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = yv(t) * G(t);
    if (alpha(t) >= C) {
      if (yv(t) < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha(t) <= 0) {
      if (yv(t) > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  out.alpha = alpha;
  out.bias = -rho;
  out.iterations = iter;
  return out;
}

double SvmModel::decision(const Eigen::VectorXd& x) const {
  double f = bias;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    f += dual_coef(i) * kernel(support_vectors.row(i).transpose(), x);
  }
  return f;
}

Eigen::VectorXd SvmModel::decision(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) out(r) = decision(Eigen::VectorXd(x.row(r).transpose()));
  return out;
}

SvmModel train_svm_binary(const Eigen::MatrixXd& x, const std::vector<int>& y,
                          const Kernel& kernel, const SvmParams& params) {
  const SvmSolution sol = solve_svm_dual(x, y, kernel, params);
  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < sol.alpha.size(); ++i) {
    if (sol.alpha(i) > 0.0) sv.push_back(i);
  }
  SvmModel model;
  model.kernel = kernel;
  model.C = params.C;
  model.bias = sol.bias;
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
  model.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    model.support_vectors.row(r) = x.row(sv[k]);
    model.dual_coef(r) = sol.alpha(sv[k]) * y[static_cast<std::size_t>(sv[k])];
  }
  return model;
}

std::array<double, 3> OvaSvm::decision_values(const Eigen::VectorXd& x) const {
  return {members[0].decision(x), members[1].decision(x), members[2].decision(x)};
}

int OvaSvm::predict(const Eigen::VectorXd& x) const {
  return ova_select(decision_values(x), prevalence);
}

int ova_select(const std::array<double, 3>& decisions, const std::array<int, 3>& prevalence) {
  const double best = *std::max_element(decisions.begin(), decisions.end());
  int pick = -1;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(decisions[k] - best) > 1e-12) continue;
    // Scanning grades upward keeps the lower grade on equal prevalence.
    if (pick < 0 || prevalence[k] > prevalence[pick]) pick = k;
  }
  return OvaSvm::kGrades[pick];
}

OvaSvm train_ova(const Eigen::MatrixXd& x, const std::vector<int>& grades, const Kernel& kernel,
                 const SvmParams& params) {
  OvaSvm ova;
  for (int g : grades) {
    const auto it = std::find(OvaSvm::kGrades.begin(), OvaSvm::kGrades.end(), g);
    if (it == OvaSvm::kGrades.end()) {
      fail(ErrorCode::InvalidArgument, "grade " + std::to_string(g) + " is not II, III or IV");
    }
    ++ova.prevalence[static_cast<std::size_t>(it - OvaSvm::kGrades.begin())];
  }
  for (int k = 0; k < 3; ++k) {
    if (ova.prevalence[k] < 2) {
      fail(ErrorCode::ClassTooSmall, "grade " + std::to_string(OvaSvm::kGrades[k]) +
                                         " has fewer than two training samples");
    }
  }
  for (int k = 0; k < 3; ++k) {
    std::vector<int> y(grades.size());
    for (std::size_t i = 0; i < grades.size(); ++i) y[i] = grades[i] == OvaSvm::kGrades[k] ? 1 : -1;
    ova.members[k] = train_svm_binary(x, y, kernel, params);
  }
  return ova;
}

}  // namespace gliomics
