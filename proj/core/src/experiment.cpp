#include "gliomics/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include "gliomics/error.hpp"
#include "gliomics/rng.hpp"
#include "gliomics/standardizer.hpp"

namespace gliomics {
namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

template <typename T>
std::vector<T> take(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

double accuracy_of(const std::vector<int>& pred, const std::vector<int>& truth) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == truth[i] ? 1 : 0;
  return pred.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(pred.size());
}

// Per-class scores (rows = samples, cols = classes) -> macro one-vs-rest AUC.
double macro_auc(const Eigen::MatrixXd& scores, const std::vector<int>& truth_index) {
  double sum = 0.0;
  int used = 0;
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    std::vector<int> positive(truth_index.size());
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < truth_index.size(); ++i) {
      positive[i] = truth_index[i] == c ? 1 : 0;
      (positive[i] ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg) continue;
    std::vector<double> s(truth_index.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = scores(static_cast<Eigen::Index>(i), c);
    sum += roc_auc(s, positive).auc;
    ++used;
  }
  return used > 0 ? sum / used : std::numeric_limits<double>::quiet_NaN();
}

struct Fitted {
  std::vector<int> predicted;     // grades
  Eigen::MatrixXd scores;         // binary: one column (higher grade); else one per class
};

Fitted svm_predict(const std::variant<SvmModel, OvaSvm>& model, const Eigen::MatrixXd& x,
                   const std::vector<int>& grades) {
  Fitted f;
  if (const auto* bin = std::get_if<SvmModel>(&model)) {
    f.scores = bin->decision(x);
    for (Eigen::Index i = 0; i < x.rows(); ++i) f.predicted.push_back(f.scores(i, 0) >= 0.0 ? grades[1] : grades[0]);
  } else {
    const auto& ova = std::get<OvaSvm>(model);
    f.scores.resize(x.rows(), 3);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const auto d = ova.decision_values(x.row(i).transpose());
      for (int k = 0; k < 3; ++k) f.scores(i, k) = d[static_cast<std::size_t>(k)];
      f.predicted.push_back(ova_select(d, ova.prevalence));
    }
  }
  return f;
}

std::variant<SvmModel, OvaSvm> svm_train(const Eigen::MatrixXd& x, const std::vector<int>& g,
                                         const std::vector<int>& grades, const Kernel& kernel,
                                         const SvmParams& params) {
  if (grades.size() == 3) return train_ova(x, g, kernel, params);
  std::vector<int> y(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) y[i] = g[i] == grades[1] ? 1 : -1;
  return train_svm_binary(x, y, kernel, params);
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::II_IV: return "II-IV";
    case ExperimentKind::III_IV: return "III-IV";
    case ExperimentKind::II_III: return "II-III";
    case ExperimentKind::AllGroups: return "all";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) {
  for (auto k : kAllExperiments) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::vector<int> experiment_grades(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::II_IV: return {2, 4};
    case ExperimentKind::III_IV: return {3, 4};
    case ExperimentKind::II_III: return {2, 3};
    case ExperimentKind::AllGroups: return {2, 3, 4};
  }
  return {};
}

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::SvmLinear: return "svm_linear";
    case ClassifierKind::SvmRbf: return "svm_rbf";
    case ClassifierKind::Ann: return "ann";
  }
  return "?";
}

std::optional<ClassifierKind> parse_classifier(std::string_view name) {
  for (auto k : {ClassifierKind::SvmLinear, ClassifierKind::SvmRbf, ClassifierKind::Ann}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  split.validate();
  if (runs < 1) fail(ErrorCode::InvalidArgument, "runs must be at least 1");
  if (c_grid.empty() || gamma_scale.empty()) fail(ErrorCode::InvalidArgument, "SVM grid is empty");
  for (double c : c_grid) {
    if (!(c > 0)) fail(ErrorCode::InvalidArgument, "C values must be positive");
  }
  for (double g : gamma_scale) {
    if (!(g > 0)) fail(ErrorCode::InvalidArgument, "gamma scales must be positive");
  }
  if (mlp.hidden < 1 || mlp.max_iters < 1) fail(ErrorCode::InvalidArgument, "invalid network settings");
}

RunOutcome run_single(const Dataset& data, ExperimentKind experiment, ClassifierKind classifier,
                      const ExperimentConfig& cfg, std::uint64_t seed) {
  if (static_cast<std::size_t>(data.x.rows()) != data.grades.size()) {
    fail(ErrorCode::LengthMismatch, "feature rows and grades differ in count");
  }
  const std::vector<int> grades = experiment_grades(experiment);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.grades.size(); ++i) {
    if (std::find(grades.begin(), grades.end(), data.grades[i]) != grades.end()) rows.push_back(i);
  }
  const Eigen::MatrixXd x_all = take_rows(data.x, rows);
  const std::vector<int> g_all = take(data.grades, rows);

  SplitSpec split_spec = cfg.split;
  split_spec.seed = seed;
  const Split split = stratified_split(g_all, split_spec);

  const Standardizer z = Standardizer::fit(take_rows(x_all, split.train));
  const Eigen::MatrixXd x_tr = z.apply(take_rows(x_all, split.train));
  const Eigen::MatrixXd x_va = z.apply(take_rows(x_all, split.validation));
  const Eigen::MatrixXd x_te = z.apply(take_rows(x_all, split.test));
  const std::vector<int> g_tr = take(g_all, split.train);
  const std::vector<int> g_va = take(g_all, split.validation);
  const std::vector<int> g_te = take(g_all, split.test);

  RunOutcome out;
  out.seed = seed;
  Fitted test;
  if (classifier == ClassifierKind::Ann) {
    const auto to_index = [&](const std::vector<int>& g) {
      std::vector<int> idx(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) {
        idx[i] = static_cast<int>(std::find(grades.begin(), grades.end(), g[i]) - grades.begin());
      }
      return idx;
    };
    MlpTrainConfig mc = cfg.mlp;
    mc.seed = derive_seed(seed, 1);
    const MlpTrainResult trained =
        train_mlp(x_tr, to_index(g_tr), x_va, to_index(g_va), static_cast<int>(grades.size()), mc);
    const Eigen::MatrixXd proba = trained.model.predict_proba(x_te);
    for (Eigen::Index i = 0; i < proba.rows(); ++i) {
      Eigen::Index best = 0;
      proba.row(i).maxCoeff(&best);
      test.predicted.push_back(grades[static_cast<std::size_t>(best)]);
    }
    test.scores = grades.size() == 2 ? Eigen::MatrixXd(proba.col(1)) : proba;
    out.selected = "hidden=" + std::to_string(mc.hidden) + " iterations=" + std::to_string(trained.iterations);
  } else {
    const double d = static_cast<double>(x_tr.cols());
    std::vector<Kernel> kernels;
    if (classifier == ClassifierKind::SvmLinear) {
      kernels.push_back(Kernel::linear());
    } else {
      for (double s : cfg.gamma_scale) kernels.push_back(Kernel::rbf(s / d));
    }
    std::optional<std::variant<SvmModel, OvaSvm>> best;
    double best_acc = -1.0;
    std::string last_error;
    for (const Kernel& k : kernels) {
      for (double c : cfg.c_grid) {
        SvmParams p = cfg.svm;
        p.C = c;
        try {
          auto model = svm_train(x_tr, g_tr, grades, k, p);
          const double acc = accuracy_of(svm_predict(model, x_va, grades).predicted, g_va);
          if (acc > best_acc) {
            best_acc = acc;
            best = std::move(model);
            out.selected = "C=" + format_double(c) +
                           (k.type == Kernel::Type::Rbf ? " gamma=" + format_double(k.gamma) : "");
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NoConvergence) throw;
          last_error = e.what();
        }
      }
    }
    if (!best) fail(ErrorCode::NoConvergence, "no SVM grid point converged: " + last_error);
    test = svm_predict(*best, x_te, grades);
  }

  const EvalReport report = classification_report(test.predicted, g_te, grades);
  out.accuracy = report.accuracy;
  out.confusion = report.confusion;
  if (grades.size() == 2) {
    std::vector<int> positive(g_te.size());
    for (std::size_t i = 0; i < g_te.size(); ++i) positive[i] = g_te[i] == grades[1] ? 1 : 0;
    std::vector<double> s(test.scores.col(0).data(), test.scores.col(0).data() + test.scores.rows());
    const RocCurve roc = roc_auc(s, positive);
    out.auc = roc.auc;
    out.roc = roc.points;
  } else {
    std::vector<int> idx(g_te.size());
    for (std::size_t i = 0; i < g_te.size(); ++i) idx[i] = g_te[i] - grades[0];
    out.auc = macro_auc(test.scores, idx);
  }
  return out;
}

ExperimentResult run_experiment(const Dataset& data, ExperimentKind experiment,
                                ClassifierKind classifier, const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.experiment = experiment;
  result.classifier = classifier;
  result.extension = classifier != ClassifierKind::Ann && experiment == ExperimentKind::AllGroups;
  result.runs = run_seeded(
      [&](std::uint64_t seed) { return run_single(data, experiment, classifier, cfg, seed); }, cfg.runs,
      cfg.seed, cfg.jobs);

  std::vector<double> acc, auc;
  for (const auto& r : result.runs) {
    acc.push_back(r.accuracy);
    auc.push_back(r.auc);
  }
  result.accuracy = summarize(acc, cfg.seed);
  result.auc = summarize(auc, cfg.seed);

  EvalReport& pooled = result.pooled;
  pooled.classes = experiment_grades(experiment);
  const std::size_t k = pooled.classes.size();
  pooled.confusion.assign(k, std::vector<long>(k, 0));
  for (const auto& r : result.runs) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) pooled.confusion[a][b] += r.confusion[a][b];
    }
  }
  refresh_rates(pooled);
  pooled.roc = result.runs.front().roc;
  pooled.auc = result.auc.mean;
  return result;
}

}  // namespace gliomics
