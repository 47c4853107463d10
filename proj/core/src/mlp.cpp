#include "gliomics/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "gliomics/error.hpp"
#include "gliomics/rng.hpp"

namespace gliomics {
namespace {

void softmax_in_place(Eigen::Ref<Eigen::VectorXd> z) {
  const double m = z.maxCoeff();
  z = (z.array() - m).exp();
  z /= z.sum();
}

void check_labels(const MlpModel& model, const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  if (x.rows() != static_cast<Eigen::Index>(labels.size())) {
    fail(ErrorCode::LengthMismatch, "rows and labels differ in length");
  }
  if (x.cols() != model.inputs()) {
    fail(ErrorCode::LengthMismatch, "input width " + std::to_string(x.cols()) +
                                        " does not match the model's " +
                                        std::to_string(model.inputs()));
  }
  for (int l : labels) {
    if (l < 0 || l >= model.outputs()) {
      fail(ErrorCode::InvalidArgument, "label " + std::to_string(l) + " is out of range");
    }
  }
}

}  // namespace

MlpModel MlpModel::zeros(int inputs, int hidden, int outputs) {
  MlpModel m;
  m.w1 = Eigen::MatrixXd::Zero(hidden, inputs);
  m.b1 = Eigen::VectorXd::Zero(hidden);
  m.w2 = Eigen::MatrixXd::Zero(outputs, hidden);
  m.b2 = Eigen::VectorXd::Zero(outputs);
  return m;
}

MlpModel MlpModel::initialize(int inputs, int hidden, int outputs, std::uint64_t seed) {
  if (inputs <= 0 || hidden <= 0 || outputs < 2) {
    fail(ErrorCode::InvalidArgument, "network needs positive widths and at least two outputs");
  }
  MlpModel m = zeros(inputs, hidden, outputs);
  Rng rng(seed);
  const double r1 = 1.0 / std::sqrt(static_cast<double>(inputs));
  const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Eigen::Index c = 0; c < m.w1.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.w1.rows(); ++r) m.w1(r, c) = rng.uniform(-r1, r1);
  }
  for (Eigen::Index r = 0; r < m.b1.size(); ++r) m.b1(r) = rng.uniform(-r1, r1);
  for (Eigen::Index c = 0; c < m.w2.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.w2.rows(); ++r) m.w2(r, c) = rng.uniform(-r2, r2);
  }
  for (Eigen::Index r = 0; r < m.b2.size(); ++r) m.b2(r) = rng.uniform(-r2, r2);
  return m;
}

Eigen::VectorXd MlpModel::forward(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd h = (w1 * x + b1).array().tanh().matrix();
  Eigen::VectorXd z = w2 * h + b2;
  softmax_in_place(z);
  return z;
}

Eigen::MatrixXd MlpModel::predict_proba(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), outputs());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    out.row(r) = forward(x.row(r).transpose()).transpose();
  }
  return out;
}

int MlpModel::predict(const Eigen::VectorXd& x) const {
  Eigen::Index k = 0;
  forward(x).maxCoeff(&k);
  return static_cast<int>(k);
}

Eigen::Index MlpModel::parameter_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

Eigen::VectorXd MlpModel::flatten() const {
  Eigen::VectorXd p(parameter_count());
  Eigen::Index o = 0;
  p.segment(o, w1.size()) = Eigen::Map<const Eigen::VectorXd>(w1.data(), w1.size());
  o += w1.size();
  p.segment(o, b1.size()) = b1;
  o += b1.size();
  p.segment(o, w2.size()) = Eigen::Map<const Eigen::VectorXd>(w2.data(), w2.size());
  o += w2.size();
  p.segment(o, b2.size()) = b2;
  return p;
}

void MlpModel::assign(const Eigen::VectorXd& p) {
  if (p.size() != parameter_count()) {
    fail(ErrorCode::LengthMismatch, "parameter vector has the wrong length");
  }
  Eigen::Index o = 0;
  Eigen::Map<Eigen::VectorXd>(w1.data(), w1.size()) = p.segment(o, w1.size());
  o += w1.size();
  b1 = p.segment(o, b1.size());
  o += b1.size();
  Eigen::Map<Eigen::VectorXd>(w2.data(), w2.size()) = p.segment(o, w2.size());
  o += w2.size();
  b2 = p.segment(o, b2.size());
}

double cross_entropy(const MlpModel& model, const Eigen::MatrixXd& x, const std::vector<int>& labels) {
  check_labels(model, x, labels);
  if (x.rows() == 0) return 0.0;
  double loss = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Eigen::VectorXd p = model.forward(x.row(r).transpose());
    loss -= std::log(std::max(p(labels[static_cast<std::size_t>(r)]), 1e-300));
  }
  return loss / static_cast<double>(x.rows());
}

double cross_entropy_gradient(const MlpModel& model, const Eigen::MatrixXd& x,
                              const std::vector<int>& labels, Eigen::VectorXd& gradient) {
  check_labels(model, x, labels);
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd gw1 = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
  Eigen::VectorXd gb1 = Eigen::VectorXd::Zero(model.b1.size());
  Eigen::MatrixXd gw2 = Eigen::MatrixXd::Zero(model.w2.rows(), model.w2.cols());
  Eigen::VectorXd gb2 = Eigen::VectorXd::Zero(model.b2.size());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::VectorXd xi = x.row(r).transpose();
    const Eigen::VectorXd h = (model.w1 * xi + model.b1).array().tanh().matrix();
    Eigen::VectorXd p = model.w2 * h + model.b2;
    softmax_in_place(p);
    const int label = labels[static_cast<std::size_t>(r)];
    loss -= std::log(std::max(p(label), 1e-300));
    // dL/dz = p - onehot
    Eigen::VectorXd dz = p;
    dz(label) -= 1.0;
    gw2.noalias() += dz * h.transpose();
    gb2 += dz;
    const Eigen::VectorXd dh =
        (model.w2.transpose() * dz).array() * (1.0 - h.array().square());
    gw1.noalias() += dh * xi.transpose();
    gb1 += dh;
  }
  const double inv = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  MlpModel g;
  g.w1 = gw1 * inv;
  g.b1 = gb1 * inv;
  g.w2 = gw2 * inv;
  g.b2 = gb2 * inv;
  gradient = g.flatten();
  return loss * inv;
}

double mlp_gradient_check(const MlpModel& model, const Eigen::MatrixXd& x,
                          const std::vector<int>& labels, double h) {
  if (x.rows() == 0) fail(ErrorCode::EmptyMatrix, "gradient check needs a non-empty batch");
  Eigen::VectorXd analytic;
  cross_entropy_gradient(model, x, labels, analytic);
  const Eigen::VectorXd base = model.flatten();
  MlpModel probe = model;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < base.size(); ++k) {
    Eigen::VectorXd p = base;
    p(k) = base(k) + h;
    probe.assign(p);
    const double up = cross_entropy(probe, x, labels);
    p(k) = base(k) - h;
    probe.assign(p);
    const double down = cross_entropy(probe, x, labels);
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic(k)), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic(k) - numeric) / denom);
  }
  return worst;
}

MlpTrainResult train_mlp(const Eigen::MatrixXd& x_train, const std::vector<int>& y_train,
                         const Eigen::MatrixXd& x_val, const std::vector<int>& y_val,
                         int num_classes, const MlpTrainConfig& cfg) {
  if (num_classes < 2) fail(ErrorCode::SingleClass, "network training needs two or more classes");
  if (x_train.rows() == 0) fail(ErrorCode::EmptyMatrix, "empty training set");
  if (std::set<int>(y_train.begin(), y_train.end()).size() < 2) {
    fail(ErrorCode::SingleClass, "training labels contain a single class");
  }
  if (cfg.max_iters <= 0 || cfg.hidden <= 0 || cfg.validation_patience <= 0 ||
      cfg.check_every <= 0 || cfg.restart_interval < 0) {
    fail(ErrorCode::InvalidArgument, "network training settings must be positive");
  }

  MlpModel model = MlpModel::initialize(static_cast<int>(x_train.cols()), cfg.hidden, num_classes,
                                        cfg.seed);
  const bool has_val = x_val.rows() > 0;
  const Eigen::Index restart =
      cfg.restart_interval > 0 ? cfg.restart_interval : model.parameter_count();

  Eigen::VectorXd theta = model.flatten();
  Eigen::VectorXd g;
  double loss = cross_entropy_gradient(model, x_train, y_train, g);
  if (!std::isfinite(loss)) fail(ErrorCode::DivergedLoss, "initial loss is not finite");

  MlpTrainResult result;
  result.training_loss.push_back(loss);
  MlpModel best = model;
  double best_val = has_val ? cross_entropy(model, x_val, y_val) : loss;
  int bad_checks = 0;

  Eigen::VectorXd d = -g;
  double prev_step = 0.0;
  double prev_slope = 0.0;
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -g;
      slope = -g.squaredNorm();
    }
    if (slope == 0.0) break;  // zero gradient: stationary point

    // Initial trial step: previous step scaled by the change in slope.
    double step = prev_step > 0.0 ? prev_step * prev_slope / slope : 1.0 / std::sqrt(-slope);
    step = std::clamp(step, 1e-10, 1e3);

    constexpr double c1 = 1e-4;
    bool accepted = false;
    double new_loss = loss;
    Eigen::VectorXd new_theta;
    Eigen::VectorXd new_g;
    for (int ls = 0; ls < 60; ++ls) {
      new_theta = theta + step * d;
      model.assign(new_theta);
      new_loss = cross_entropy_gradient(model, x_train, y_train, new_g);
      if (std::isnan(new_loss)) fail(ErrorCode::DivergedLoss, "loss became NaN");
      if (new_loss <= loss + c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      model.assign(theta);
      // A failed search along a conjugate direction gets one steepest-descent retry.
      if (d != -g) {
        d = -g;
        prev_step = 0.0;
        continue;
      }
      break;
    }

    const double beta_raw = new_g.dot(new_g - g) / g.squaredNorm();
    const bool do_restart = (iter + 1) % restart == 0;
    const double beta = do_restart ? 0.0 : std::max(0.0, beta_raw);
    theta = new_theta;
    loss = new_loss;
    g = new_g;
    prev_step = step;
    prev_slope = slope;
    d = -g + beta * d;
    result.training_loss.push_back(loss);

    if ((iter + 1) % cfg.check_every == 0) {
      const double val = has_val ? cross_entropy(model, x_val, y_val) : loss;
      if (val < best_val) {
        best_val = val;
        best = model;
        bad_checks = 0;
      } else if (has_val && ++bad_checks >= cfg.validation_patience) {
        result.early_stopped = true;
        ++iter;
        break;
      }
    }
  }
  if (!has_val) {
    best = model;
    best_val = loss;
  }
  result.model = best;
  result.iterations = iter;
  result.best_validation_loss = best_val;
  return result;
}

}  // namespace gliomics
