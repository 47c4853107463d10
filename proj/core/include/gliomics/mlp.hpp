#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace gliomics {

/// Single hidden layer network: tanh hidden units, softmax output.
struct MlpModel {
  Eigen::MatrixXd w1;  // hidden x inputs
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // outputs x hidden
  Eigen::VectorXd b2;  // outputs

  /// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases likewise.
  static MlpModel initialize(int inputs, int hidden, int outputs, std::uint64_t seed);
  static MlpModel zeros(int inputs, int hidden, int outputs);

  int inputs() const { return static_cast<int>(w1.cols()); }
  int hidden() const { return static_cast<int>(w1.rows()); }
  int outputs() const { return static_cast<int>(w2.rows()); }

  /// Class probabilities for one row.
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  /// One row of probabilities per input row.
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const;
  int predict(const Eigen::VectorXd& x) const;

  Eigen::Index parameter_count() const;
  /// w1 (column-major), b1, w2 (column-major), b2.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& params);
};

/// Mean cross-entropy over the rows of x; labels are class indices.
double cross_entropy(const MlpModel& model, const Eigen::MatrixXd& x, const std::vector<int>& labels);

/// Mean cross-entropy and its gradient w.r.t. the flattened parameters
/// (backpropagation).
double cross_entropy_gradient(const MlpModel& model, const Eigen::MatrixXd& x,
                              const std::vector<int>& labels, Eigen::VectorXd& gradient);

/// Largest relative difference between the backprop gradient and central
/// differences with step h over every parameter. The denominator is
/// max(|analytic|, |numeric|, 1e-6) so components that are zero in both do
/// not blow up the ratio.
double mlp_gradient_check(const MlpModel& model, const Eigen::MatrixXd& x,
                          const std::vector<int>& labels, double h = 1e-5);

struct MlpTrainConfig {
  std::uint64_t seed = 0;
  int hidden = 20;
  int max_iters = 500;
  /// Conjugate-gradient restart period; 0 means the parameter count.
  int restart_interval = 0;
  /// Validation checks without improvement before stopping.
  int validation_patience = 6;
  /// Iterations between validation checks.
  int check_every = 5;
};

struct MlpTrainResult {
  MlpModel model;  // weights with the best validation loss
  int iterations = 0;
  double best_validation_loss = 0.0;
  bool early_stopped = false;
  /// Training loss after every accepted step (index 0 = initial weights).
  std::vector<double> training_loss;
};

/// Full-batch Polak-Ribiere+ conjugate gradient on the mean cross-entropy
/// with Armijo backtracking. Early stopping watches the validation loss;
/// with an empty validation set the final weights are returned. Throws
/// SingleClass and DivergedLoss.
MlpTrainResult train_mlp(const Eigen::MatrixXd& x_train, const std::vector<int>& y_train,
                         const Eigen::MatrixXd& x_val, const std::vector<int>& y_val,
                         int num_classes, const MlpTrainConfig& cfg);

}  // namespace gliomics
