#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gliomics/evaluate.hpp"
#include "gliomics/mlp.hpp"
#include "gliomics/svm.hpp"

namespace gliomics {

/// Grade comparisons: three binary pairs and the three-class problem.
enum class ExperimentKind { II_IV, III_IV, II_III, AllGroups };

inline constexpr std::array<ExperimentKind, 4> kAllExperiments{
    ExperimentKind::II_IV, ExperimentKind::III_IV, ExperimentKind::II_III, ExperimentKind::AllGroups};

std::string_view to_string(ExperimentKind kind);  // "II-IV", ..., "all"
std::optional<ExperimentKind> parse_experiment(std::string_view name);
/// Ascending grades taking part.
std::vector<int> experiment_grades(ExperimentKind kind);

enum class ClassifierKind { SvmLinear, SvmRbf, Ann };

std::string_view to_string(ClassifierKind kind);  // "svm_linear", "svm_rbf", "ann"
std::optional<ClassifierKind> parse_classifier(std::string_view name);

/// One feature row per subject with its grade.
struct Dataset {
  Eigen::MatrixXd x;
  std::vector<int> grades;
};

struct ExperimentConfig {
  SplitSpec split;
  /// SVM grid, chosen by validation accuracy (first best in grid order).
  std::vector<double> c_grid{0.1, 1.0, 10.0, 100.0};
  /// RBF gamma = scale / feature count.
  std::vector<double> gamma_scale{0.25, 1.0, 4.0};
  SvmParams svm;
  MlpTrainConfig mlp;
  int runs = 100;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  void validate() const;
};

struct RunOutcome {
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  /// Binary: higher grade is the positive class. Three classes: macro
  /// one-vs-rest over the classes present in the test set.
  double auc = 0.0;
  std::vector<std::vector<long>> confusion;
  std::string selected;  // chosen hyperparameters
  std::vector<RocPoint> roc;  // binary only
};

struct ExperimentResult {
  ExperimentKind experiment = ExperimentKind::II_IV;
  ClassifierKind classifier = ClassifierKind::Ann;
  std::vector<RunOutcome> runs;
  RunSummary accuracy;
  RunSummary auc;
  /// Confusion summed over runs, with its rates; roc of the first run.
  EvalReport pooled;
  /// SVM on all groups: a one-vs-all extension beyond the binary table.
  bool extension = false;
};

/// One run: fresh stratified split (seeded), z-scoring fit on the training
/// rows, classifier training with validation-based selection, test metrics.
RunOutcome run_single(const Dataset& data, ExperimentKind experiment, ClassifierKind classifier,
                      const ExperimentConfig& cfg, std::uint64_t seed);

/// cfg.runs runs with seeds cfg.seed, cfg.seed + 1, ...
ExperimentResult run_experiment(const Dataset& data, ExperimentKind experiment,
                                ClassifierKind classifier, const ExperimentConfig& cfg);

}  // namespace gliomics
