#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <json.hpp>

#include "csv.hpp"
#include "gliomics/error.hpp"
#include "gliomics/experiment.hpp"
#include "gliomics/features.hpp"
#include "gliomics/nifti.hpp"
#include "gliomics/parallel.hpp"
#include "gliomics/phantom.hpp"
#include "gliomics/registration.hpp"
#include "gliomics/stats.hpp"
#include "gliomics/volumetrics.hpp"

namespace gliomics::cli {
namespace {

using Json = nlohmann::json;

// ---- provenance and output ---------------------------------------------------

std::string sha256_hex(const std::string& text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::IoFailure, "SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

struct Provenance {
  std::string digest;
  std::uint64_t seed = 0;

  Json json() const {
    return {{"tool", "gliomics"}, {"version", GLIOMICS_VERSION}, {"config_digest", digest}, {"seed", seed}};
  }
  std::string comment() const {
    return "# tool=gliomics version=" GLIOMICS_VERSION " config_digest=" + digest +
           " seed=" + std::to_string(seed);
  }
};

Provenance provenance_of(const Json& effective_config) {
  return {sha256_hex(effective_config.dump()), effective_config.value("seed", std::uint64_t{0})};
}

Json load_config(const CommonOptions& common) {
  Json cfg = Json::object();
  if (common.config) {
    std::ifstream in(*common.config);
    if (!in) fail(ErrorCode::MissingFile, "cannot open config " + common.config->string());
    try {
      cfg = Json::parse(in);
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, "config " + common.config->string() + ": " + e.what());
    }
    if (!cfg.is_object()) fail(ErrorCode::ParseError, "config must be a JSON object");
  }
  if (common.seed) cfg["seed"] = *common.seed;
  if (!cfg.contains("seed")) cfg["seed"] = 0;
  return cfg;
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(ErrorCode::InvalidArgument, "unknown key '" + key + "' in " + where);
    }
  }
}

fs::path partial_path(const fs::path& target) {
  return target.parent_path() / (".partial-" + target.filename().string());
}

void commit(const fs::path& tmp, const fs::path& target) {
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot move " + tmp.string() + " to " + target.string() + ": " + ec.message());
}

void write_text(const fs::path& target, const std::string& text) {
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = partial_path(target);
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << text;
    if (!out) fail(ErrorCode::IoFailure, "write failed for " + tmp.string());
  }
  commit(tmp, target);
}

void write_volume(const Volume& v, const fs::path& target) {
  const fs::path tmp = partial_path(target);
  save_volume(v, tmp);
  commit(tmp, target);
}

void write_labels(const LabelMap& l, const fs::path& target) {
  const fs::path tmp = partial_path(target);
  save_labelmap(l, tmp);
  commit(tmp, target);
}

// ---- error handling -----------------------------------------------------------

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InsufficientOverlap:
    case ErrorCode::NoImprovement:
      return kRegistrationError;
    case ErrorCode::SingleClass:
    case ErrorCode::NoConvergence:
    case ErrorCode::DivergedLoss:
    case ErrorCode::RunFailed:
      return kTrainingError;
    default:
      return kInputError;
  }
}

template <typename Body>
int guarded(const char* command, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    spdlog::error("{}: {}", command, e.what());
    return exit_for(e.code());
  } catch (const Json::exception& e) {
    spdlog::error("{}: config: {}", command, e.what());
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}: {}", command, e.what());
    return kInputError;
  }
}

// ---- manifests ------------------------------------------------------------------

int parse_grade(const std::string& text, const std::string& context) {
  static const std::map<std::string, int> roman{{"II", 2}, {"III", 3}, {"IV", 4}};
  if (const auto it = roman.find(text); it != roman.end()) return it->second;
  const int g = parse_int(text, context);
  if (g < 2 || g > 4) fail(ErrorCode::InvalidArgument, context + ": grade must be 2, 3 or 4");
  return g;
}

std::string grade_name(int grade) {
  switch (grade) {
    case 2: return "II";
    case 3: return "III";
    case 4: return "IV";
  }
  return std::to_string(grade);
}

struct ManifestRow {
  std::string id;
  int grade = 0;
  fs::path labels;
  std::map<std::string, fs::path> modalities;
};

struct Manifest {
  std::vector<std::string> modality_names;
  std::vector<ManifestRow> rows;
};

Manifest read_manifest(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t id_col = t.require("subject_id");
  const std::size_t grade_col = t.require("grade");
  const std::size_t label_col = t.require("labels");
  Manifest m;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c != id_col && c != grade_col && c != label_col) m.modality_names.push_back(t.header[c]);
  }
  const fs::path base = path.parent_path();
  const auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  for (const auto& row : t.rows) {
    ManifestRow r;
    r.id = row[id_col];
    r.grade = parse_grade(row[grade_col], "manifest subject " + r.id);
    r.labels = resolve(row[label_col]);
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (c != id_col && c != grade_col && c != label_col) r.modalities[t.header[c]] = resolve(row[c]);
    }
    m.rows.push_back(std::move(r));
  }
  if (m.rows.empty()) fail(ErrorCode::InvalidArgument, "manifest " + path.string() + " lists no subjects");
  return m;
}

std::string feature_header(std::size_t length) {
  std::string h = "subject_id,modality,grade,kind";
  char buf[32];
  for (std::size_t i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, ",f%03zu", i);
    h += buf;
  }
  return h;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

void configure_logging(const char* level_from_env) {
  auto logger = spdlog::stderr_logger_mt("gliomics");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (level_from_env != nullptr && *level_from_env != '\0') {
    const auto level = spdlog::level::from_str(level_from_env);
    // from_str maps unknown names to off; only accept it when asked for.
    if (level != spdlog::level::off || std::string(level_from_env) == "off") {
      spdlog::set_level(level);
    } else {
      spdlog::warn("unknown GLIOMICS_LOG level '{}', using warn", level_from_env);
    }
  }
}

// ---- subtract ---------------------------------------------------------------------

int cmd_subtract(const CommonOptions& common, const SubtractOptions& opts) {
  return guarded("subtract", [&] {
    Json cfg = load_config(common);
    check_keys(cfg, {"seed", "registration"}, "config");
    Json reg = cfg.value("registration", Json::object());
    check_keys(reg, {"bins", "binning", "sample_fraction", "min_overlap_fraction", "initial_radius", "growth",
                     "shrink", "max_iters", "epsilon", "rotation_scale"},
               "registration");
    MiConfig mi;
    mi.bins = reg.value("bins", mi.bins);
    const std::string binning = reg.value("binning", std::string("linear"));
    if (binning != "linear" && binning != "hard") fail(ErrorCode::InvalidArgument, "binning must be linear or hard");
    mi.binning = binning == "hard" ? MiConfig::Binning::Hard : MiConfig::Binning::Linear;
    mi.sample_fraction = reg.value("sample_fraction", mi.sample_fraction);
    mi.min_overlap_fraction = reg.value("min_overlap_fraction", mi.min_overlap_fraction);
    EsConfig es;
    es.initial_radius = reg.value("initial_radius", es.initial_radius);
    es.growth = reg.value("growth", es.growth);
    es.shrink = reg.value("shrink", es.shrink);
    es.max_iters = reg.value("max_iters", es.max_iters);
    es.epsilon = reg.value("epsilon", es.epsilon);
    es.rotation_scale = reg.value("rotation_scale", es.rotation_scale);
    es.seed = cfg["seed"].get<std::uint64_t>();
    mi.validate();
    es.validate();
    cfg["registration"] = {{"bins", mi.bins},
                           {"binning", binning},
                           {"sample_fraction", mi.sample_fraction},
                           {"min_overlap_fraction", mi.min_overlap_fraction},
                           {"initial_radius", es.initial_radius},
                           {"growth", es.growth},
                           {"shrink", es.shrink},
                           {"max_iters", es.max_iters},
                           {"epsilon", es.epsilon},
                           {"rotation_scale", es.rotation_scale}};
    const Provenance prov = provenance_of(cfg);

    const Volume pre = load_volume(opts.pre);
    const Volume post = load_volume(opts.post);
    spdlog::info("registering {} onto {}", opts.pre.string(), opts.post.string());
    // The transform maps post-contrast (fixed) points into the pre-contrast image.
    const RegistrationResult result = register_rigid(post, pre, mi, es);
    const Volume sub = subtraction_map(pre, post, result.transform);

    fs::create_directories(common.out);
    write_volume(sub, common.out / "subtraction.nii.gz");
    Json t = Json::parse(to_json(result.transform));
    t["mi_initial"] = result.initial_mi;
    t["mi_final"] = result.final_mi;
    t["iterations"] = result.iterations;
    t["final_radius"] = result.final_radius;
    t["fixed"] = opts.post.filename().string();
    t["moving"] = opts.pre.filename().string();
    t["provenance"] = prov.json();
    write_text(common.out / "transform.json", t.dump(2) + "\n");
    spdlog::info("MI {:.4f} -> {:.4f} after {} iterations", result.initial_mi, result.final_mi, result.iterations);
    return int{kSuccess};
  });
}

// ---- features ----------------------------------------------------------------------

int cmd_features(const CommonOptions& common, const FeaturesOptions& opts) {
  return guarded("features", [&] {
    Json cfg = load_config(common);
    check_keys(cfg, {"seed", "kinds", "modalities"}, "config");
    std::vector<std::string> kind_names = cfg.value("kinds", opts.kinds);
    std::vector<FeatureKind> kinds;
    for (const auto& k : kind_names) {
      const auto parsed = parse_feature_kind(k);
      if (!parsed) fail(ErrorCode::InvalidArgument, "unknown feature kind '" + k + "'");
      kinds.push_back(*parsed);
    }
    if (kinds.empty()) fail(ErrorCode::InvalidArgument, "no feature kinds requested");

    const Manifest manifest = read_manifest(opts.manifest);
    std::vector<std::string> modalities = cfg.value("modalities", opts.modalities);
    if (modalities.empty()) modalities = manifest.modality_names;
    for (const auto& m : modalities) {
      if (std::find(manifest.modality_names.begin(), manifest.modality_names.end(), m) ==
          manifest.modality_names.end()) {
        fail(ErrorCode::InvalidArgument, "manifest has no modality column '" + m + "'");
      }
    }
    cfg["kinds"] = kind_names;
    cfg["modalities"] = modalities;
    const Provenance prov = provenance_of(cfg);

    // lines[subject][kind] holds that subject's CSV rows for the kind.
    const std::size_t n = manifest.rows.size();
    std::vector<std::vector<std::string>> lines(n, std::vector<std::string>(kinds.size()));
    std::vector<std::string> errors(n);
    parallel_for(n, common.jobs, [&](std::size_t i) {
      const ManifestRow& row = manifest.rows[i];
      try {
        const LabelMap labels = load_labelmap(row.labels);
        std::optional<FeatureVector> shape;
        for (const auto& modality : modalities) {
          const Volume volume = load_volume(row.modalities.at(modality));
          for (std::size_t k = 0; k < kinds.size(); ++k) {
            FeatureVector fv = kinds[k] == FeatureKind::Shape
                                   ? (shape ? *shape : *(shape = shape_block(labels)))
                                   : build_features(kinds[k], volume, labels);
            if (kinds[k] == FeatureKind::Shape && !volume.geometry().same_grid(labels.geometry())) {
              fail(ErrorCode::GeometryMismatch, modality + " and labels differ in geometry");
            }
            std::string line = row.id + "," + modality + "," + std::to_string(row.grade) + "," +
                               std::string(to_string(kinds[k]));
            for (double v : fv.values()) line += "," + format_number(v);
            lines[i][k] += line + "\n";
          }
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });

    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (errors[i].empty()) {
        ++kept;
        continue;
      }
      if (!common.skip_errors) fail(ErrorCode::IoFailure, "subject " + manifest.rows[i].id + ": " + errors[i]);
      spdlog::warn("skipping subject {}: {}", manifest.rows[i].id, errors[i]);
    }
    if (kept == 0) fail(ErrorCode::InvalidArgument, "no subject could be processed");

    fs::create_directories(common.out);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      const std::size_t len = feature_length(kinds[k]);
      std::string text = prov.comment() + "\n";
      text += "# kind=" + std::string(to_string(kinds[k])) + " length=" + std::to_string(len) +
              " columns=" + std::to_string(4 + len) + "\n";
      text += feature_header(len) + "\n";
      for (std::size_t i = 0; i < n; ++i) {
        if (errors[i].empty()) text += lines[i][k];
      }
      write_text(common.out / ("features_" + std::string(to_string(kinds[k])) + ".csv"), text);
    }
    spdlog::info("wrote features for {} of {} subjects", kept, n);
    return int{kSuccess};
  });
}

// ---- volumetrics -------------------------------------------------------------------

int cmd_volumetrics(const CommonOptions& common, const VolumetricsCmdOptions& opts) {
  return guarded("volumetrics", [&] {
    Json cfg = load_config(common);
    check_keys(cfg, {"seed", "edema_in_total"}, "config");
    VolumetricsOptions vo;
    vo.edema_in_total = cfg.value("edema_in_total", !opts.exclude_edema);
    cfg["edema_in_total"] = vo.edema_in_total;
    const Provenance prov = provenance_of(cfg);
    const Manifest manifest = read_manifest(opts.manifest);

    const std::size_t n = manifest.rows.size();
    std::vector<std::string> lines(n), errors(n);
    parallel_for(n, common.jobs, [&](std::size_t i) {
      const ManifestRow& row = manifest.rows[i];
      try {
        const ComponentVolumes v = component_volumes(load_labelmap(row.labels), vo);
        const VolumeRatios r = volume_ratios(v);
        std::string line = row.id + "," + std::to_string(row.grade);
        for (double x : v.volume_mm3) line += "," + format_number(x);
        line += "," + format_number(v.total_mm3);
        for (double x : r.percent) line += "," + format_number(x);
        lines[i] = line + "\n";
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    std::string text = prov.comment() + "\n";
    text += "subject_id,grade,vol_mm3_label1,vol_mm3_label2,vol_mm3_label3,vol_mm3_label4,vol_mm3_label5,"
            "total_mm3,ratio_pct_label1,ratio_pct_label2,ratio_pct_label3,ratio_pct_label4,ratio_pct_label5\n";
    for (std::size_t i = 0; i < n; ++i) {
      if (!errors[i].empty()) {
        if (!common.skip_errors) fail(ErrorCode::IoFailure, "subject " + manifest.rows[i].id + ": " + errors[i]);
        spdlog::warn("skipping subject {}: {}", manifest.rows[i].id, errors[i]);
        continue;
      }
      text += lines[i];
    }
    write_text(common.out, text);
    return int{kSuccess};
  });
}

// ---- train-eval ----------------------------------------------------------------------

int cmd_train_eval(const CommonOptions& common, const TrainEvalOptions& opts) {
  return guarded("train-eval", [&] {
    Json cfg = load_config(common);
    check_keys(cfg, {"seed", "runs", "experiments", "classifiers", "modalities", "split", "svm", "ann"}, "config");

    ExperimentConfig ec;
    ec.seed = cfg["seed"].get<std::uint64_t>();
    ec.runs = cfg.value("runs", ec.runs);
    ec.jobs = common.jobs;
    const Json split = cfg.value("split", Json::object());
    check_keys(split, {"train", "validation", "test"}, "split");
    ec.split.train = split.value("train", ec.split.train);
    ec.split.validation = split.value("validation", ec.split.validation);
    ec.split.test = split.value("test", ec.split.test);
    const Json svm = cfg.value("svm", Json::object());
    check_keys(svm, {"c_grid", "gamma_scale", "tolerance", "max_passes"}, "svm");
    ec.c_grid = svm.value("c_grid", ec.c_grid);
    ec.gamma_scale = svm.value("gamma_scale", ec.gamma_scale);
    ec.svm.tolerance = svm.value("tolerance", ec.svm.tolerance);
    ec.svm.max_passes = svm.value("max_passes", ec.svm.max_passes);
    const Json ann = cfg.value("ann", Json::object());
    check_keys(ann, {"hidden", "max_iters", "patience", "check_every"}, "ann");
    ec.mlp.hidden = ann.value("hidden", ec.mlp.hidden);
    ec.mlp.max_iters = ann.value("max_iters", ec.mlp.max_iters);
    ec.mlp.validation_patience = ann.value("patience", ec.mlp.validation_patience);
    ec.mlp.check_every = ann.value("check_every", ec.mlp.check_every);
    ec.validate();

    std::vector<ExperimentKind> experiments;
    for (const auto& name : cfg.value("experiments", std::vector<std::string>{"II-IV", "III-IV", "II-III", "all"})) {
      const auto e = parse_experiment(name);
      if (!e) fail(ErrorCode::InvalidArgument, "unknown experiment '" + name + "'");
      experiments.push_back(*e);
    }
    std::vector<ClassifierKind> classifiers;
    for (const auto& name : cfg.value("classifiers", std::vector<std::string>{"svm_linear", "svm_rbf", "ann"})) {
      const auto c = parse_classifier(name);
      if (!c) fail(ErrorCode::InvalidArgument, "unknown classifier '" + name + "'");
      classifiers.push_back(*c);
    }
    if (experiments.empty() || classifiers.empty()) fail(ErrorCode::InvalidArgument, "nothing to run");

    // Features table: subject_id, modality, grade, kind, f000...
    const CsvTable table = read_csv(opts.features);
    const std::size_t mod_col = table.require("modality");
    const std::size_t grade_col = table.require("grade");
    const std::size_t kind_col = table.require("kind");
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c].size() == 4 && table.header[c][0] == 'f') feature_cols.push_back(c);
    }
    if (table.rows.empty() || feature_cols.empty()) fail(ErrorCode::InvalidArgument, "features table is empty");
    const std::string kind = table.rows.front()[kind_col];
    std::vector<std::string> present;
    for (const auto& row : table.rows) {
      if (row[kind_col] != kind) fail(ErrorCode::InvalidArgument, "features table mixes kinds");
      if (std::find(present.begin(), present.end(), row[mod_col]) == present.end()) present.push_back(row[mod_col]);
    }
    const std::vector<std::string> modalities = cfg.value("modalities", present);
    cfg["runs"] = ec.runs;
    cfg["split"] = {{"train", ec.split.train}, {"validation", ec.split.validation}, {"test", ec.split.test}};
    cfg["svm"] = {{"c_grid", ec.c_grid}, {"gamma_scale", ec.gamma_scale}, {"tolerance", ec.svm.tolerance},
                  {"max_passes", ec.svm.max_passes}};
    cfg["ann"] = {{"hidden", ec.mlp.hidden}, {"max_iters", ec.mlp.max_iters},
                  {"patience", ec.mlp.validation_patience}, {"check_every", ec.mlp.check_every}};
    std::vector<std::string> exp_names, clf_names;
    for (auto e : experiments) exp_names.emplace_back(to_string(e));
    for (auto c : classifiers) clf_names.emplace_back(to_string(c));
    cfg["experiments"] = exp_names;
    cfg["classifiers"] = clf_names;
    cfg["modalities"] = modalities;
    const Provenance prov = provenance_of(cfg);

    std::map<std::string, Dataset> datasets;
    for (const auto& m : modalities) {
      if (std::find(present.begin(), present.end(), m) == present.end()) {
        fail(ErrorCode::InvalidArgument, "features table has no rows for modality '" + m + "'");
      }
      Dataset d;
      std::vector<std::vector<double>> rows;
      for (const auto& row : table.rows) {
        if (row[mod_col] != m) continue;
        std::vector<double> x;
        for (std::size_t c : feature_cols) x.push_back(parse_number(row[c], "feature " + table.header[c]));
        rows.push_back(std::move(x));
        d.grades.push_back(parse_grade(row[grade_col], "features row"));
      }
      d.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feature_cols.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < feature_cols.size(); ++c) d.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
      for (auto e : experiments) {
        for (int g : experiment_grades(e)) {
          const auto count = std::count(d.grades.begin(), d.grades.end(), g);
          if (count < 3) {
            fail(ErrorCode::InvalidArgument, "experiment " + std::string(to_string(e)) + " needs at least 3 grade " +
                                                 grade_name(g) + " subjects for modality " + m + ", found " +
                                                 std::to_string(count));
          }
        }
      }
      datasets.emplace(m, std::move(d));
    }

    fs::create_directories(common.out);
    std::string summary = prov.comment() + "\n";
    summary += "feature_kind,modality,experiment,classifier,runs,accuracy_mean,accuracy_best,auc_mean,auc_best,extension\n";
    for (const auto& m : modalities) {
      for (auto e : experiments) {
        for (auto c : classifiers) {
          spdlog::info("{} {} {} {}: {} runs", kind, m, to_string(e), to_string(c), ec.runs);
          const ExperimentResult r = run_experiment(datasets.at(m), e, c, ec);
          Json report;
          report["provenance"] = prov.json();
          report["feature_kind"] = kind;
          report["modality"] = m;
          report["experiment"] = to_string(e);
          report["classifier"] = to_string(c);
          report["extension"] = r.extension;
          report["runs"] = r.runs.size();
          const auto metric = [](const RunSummary& s) {
            Json per = Json::array();
            for (double v : s.per_run) per.push_back(number_or_null(v));
            return Json{{"mean", number_or_null(s.mean)}, {"best", number_or_null(s.best)},
                        {"first_seed", s.first_seed}, {"per_run", per}};
          };
          report["accuracy"] = metric(r.accuracy);
          report["auc"] = metric(r.auc);
          Json classes = Json::array();
          for (int g : r.pooled.classes) classes.push_back(grade_name(g));
          Json sens = Json::array(), spec = Json::array(), roc = Json::array(), selected = Json::array();
          for (double v : r.pooled.sensitivity) sens.push_back(number_or_null(v));
          for (double v : r.pooled.specificity) spec.push_back(number_or_null(v));
          for (const auto& p : r.pooled.roc) roc.push_back({p.fpr, p.tpr});
          for (const auto& run : r.runs) selected.push_back({{"seed", run.seed}, {"hyperparameters", run.selected}});
          report["pooled"] = {{"classes", classes},
                              {"confusion", r.pooled.confusion},
                              {"sensitivity", sens},
                              {"specificity", spec},
                              {"accuracy", r.pooled.accuracy},
                              {"roc_first_run", roc}};
          report["selection"] = selected;
          const std::string name = "report_" + kind + "_" + m + "_" + std::string(to_string(e)) + "_" +
                                   std::string(to_string(c)) + ".json";
          write_text(common.out / name, report.dump(2) + "\n");
          summary += kind + "," + m + "," + std::string(to_string(e)) + "," + std::string(to_string(c)) + "," +
                     std::to_string(r.runs.size()) + "," + format_number(r.accuracy.mean) + "," +
                     format_number(r.accuracy.best) + "," + format_number(r.auc.mean) + "," +
                     format_number(r.auc.best) + "," + (r.extension ? "true" : "false") + "\n";
        }
      }
    }
    write_text(common.out / "summary.csv", summary);
    return int{kSuccess};
  });
}

// ---- stats ----------------------------------------------------------------------------

int cmd_stats(const CommonOptions& common, const StatsOptions& opts) {
  return guarded("stats", [&] {
    Json cfg = load_config(common);
    check_keys(cfg, {"seed", "alpha", "columns"}, "config");
    const double alpha = cfg.value("alpha", opts.alpha);
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");

    const CsvTable table = read_csv(opts.ratios);
    const std::size_t grade_col = table.require("grade");
    // measure -> grade -> values
    std::vector<std::string> measures;
    std::map<std::string, std::map<int, std::vector<double>>> samples;
    if (table.column("measure") >= 0 && table.column("value") >= 0) {
      const std::size_t mc = table.require("measure"), vc = table.require("value");
      for (const auto& row : table.rows) {
        if (!samples.count(row[mc])) measures.push_back(row[mc]);
        samples[row[mc]][parse_grade(row[grade_col], "stats row")].push_back(parse_number(row[vc], row[mc]));
      }
    } else {
      std::vector<std::string> wanted = cfg.value("columns", std::vector<std::string>{});
      if (wanted.empty()) {
        for (const auto& h : table.header) {
          if (h.rfind("ratio_", 0) == 0) wanted.push_back(h);
        }
      }
      if (wanted.empty()) fail(ErrorCode::ParseError, "no ratio_* columns and no measure/value columns");
      for (const auto& name : wanted) {
        const std::size_t c = table.require(name);
        measures.push_back(name);
        for (const auto& row : table.rows) {
          samples[name][parse_grade(row[grade_col], "stats row")].push_back(parse_number(row[c], name));
        }
      }
      cfg["columns"] = wanted;
    }
    cfg["alpha"] = alpha;
    const Provenance prov = provenance_of(cfg);

    Json out;
    out["provenance"] = prov.json();
    out["alpha"] = alpha;
    out["measures"] = Json::array();
    std::string csv = prov.comment() + "\n";
    csv += "measure,test,group_a,group_b,statistic,df,p,p_adjusted,significant\n";
    for (const auto& name : measures) {
      const auto& by_grade = samples[name];
      if (by_grade.size() < 2) {
        fail(ErrorCode::TooFewGroups, "measure " + name + " has " + std::to_string(by_grade.size()) +
                                          " grade group(s); at least 2 are needed");
      }
      GroupSamples groups;
      std::vector<int> grades;
      Json group_info = Json::array();
      for (const auto& [g, v] : by_grade) {
        grades.push_back(g);
        groups.push_back(v);
        group_info.push_back({{"grade", grade_name(g)}, {"n", v.size()}});
      }
      const KwResult kw = kruskal_wallis(groups);
      Json m{{"name", name},
             {"groups", group_info},
             {"kruskal_wallis",
              {{"h", kw.h}, {"df", kw.df}, {"p", kw.p}, {"all_identical", kw.all_identical},
               {"significant", kw.p < alpha}}}};
      csv += name + ",kruskal_wallis,all,all," + format_number(kw.h) + "," + std::to_string(kw.df) + "," +
             format_number(kw.p) + "," + format_number(kw.p) + "," + (kw.p < alpha ? "true" : "false") + "\n";
      Json pairs = Json::array();
      if (groups.size() >= 3) {
        for (const DunnPair& p : dunn_posthoc(groups, alpha).pairs) {
          const std::string a = grade_name(grades[static_cast<std::size_t>(p.first)]);
          const std::string b = grade_name(grades[static_cast<std::size_t>(p.second)]);
          pairs.push_back({{"group_a", a}, {"group_b", b}, {"z", p.z}, {"p", p.p},
                           {"p_adjusted", p.p_adjusted}, {"significant", p.significant}});
          csv += name + ",dunn," + a + "," + b + "," + format_number(p.z) + ",," + format_number(p.p) + "," +
                 format_number(p.p_adjusted) + "," + (p.significant ? "true" : "false") + "\n";
        }
      }
      m["dunn"] = pairs;
      out["measures"].push_back(m);
    }
    fs::create_directories(common.out);
    write_text(common.out / "stats.json", out.dump(2) + "\n");
    write_text(common.out / "stats.csv", csv);
    return int{kSuccess};
  });
}

// ---- phantom -----------------------------------------------------------------------------

int cmd_phantom(const CommonOptions& common, const PhantomOptions& opts) {
  return guarded("phantom", [&] {
    Json cfg = load_config(common);
    check_keys(cfg, {"seed", "n_per_grade", "dim", "jitter"}, "config");
    CohortSpec spec;
    spec.n_per_grade = cfg.value("n_per_grade", opts.n_per_grade);
    const int dim = cfg.value("dim", opts.dim);
    spec.dims = {dim, dim, dim};
    spec.jitter = cfg.value("jitter", opts.jitter);
    spec.base_seed = cfg["seed"].get<std::uint64_t>();
    spec.jobs = common.jobs;
    cfg["n_per_grade"] = spec.n_per_grade;
    cfg["dim"] = dim;
    cfg["jitter"] = spec.jitter;
    const Provenance prov = provenance_of(cfg);

    const Cohort cohort = generate_cohort(spec);
    fs::create_directories(common.out);
    std::string manifest = prov.comment() + "\n";
    manifest += "subject_id,grade,labels";
    for (const auto& m : cohort.modality_names) manifest += "," + m;
    manifest += "\n";
    parallel_for(cohort.subjects.size(), common.jobs, [&](std::size_t i) {
      const Subject& s = cohort.subjects[i];
      const fs::path dir = common.out / s.id;
      fs::create_directories(dir);
      write_labels(s.phantom.labels, dir / "labels.nii.gz");
      for (std::size_t m = 0; m < cohort.modality_names.size(); ++m) {
        write_volume(s.phantom.volumes[m], dir / (cohort.modality_names[m] + ".nii.gz"));
      }
    });
    for (const Subject& s : cohort.subjects) {
      manifest += s.id + "," + std::to_string(s.grade) + "," + s.id + "/labels.nii.gz";
      for (const auto& m : cohort.modality_names) manifest += "," + s.id + "/" + m + ".nii.gz";
      manifest += "\n";
    }
    write_text(common.out / "manifest.csv", manifest);
    spdlog::info("wrote {} subjects to {}", cohort.subjects.size(), common.out.string());
    return int{kSuccess};
  });
}

}  // namespace gliomics::cli
