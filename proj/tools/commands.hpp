#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gliomics::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kRegistrationError = 3,
  kTrainingError = 4,
};

/// Flags shared by every subcommand.
struct CommonOptions {
  std::optional<fs::path> config;
  /// Overrides the config file's "seed" when given.
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool skip_errors = false;
  fs::path out;
};

struct SubtractOptions {
  fs::path pre;
  fs::path post;
};

struct FeaturesOptions {
  fs::path manifest;
  std::vector<std::string> kinds{"V1", "V2", "V3", "SHAPE"};
  /// Empty: every modality column of the manifest.
  std::vector<std::string> modalities;
};

struct VolumetricsCmdOptions {
  fs::path manifest;
  bool exclude_edema = false;
};

struct TrainEvalOptions {
  fs::path features;
};

struct StatsOptions {
  fs::path ratios;
  double alpha = 0.05;
};

struct PhantomOptions {
  std::array<int, 3> n_per_grade{18, 14, 25};
  int dim = 32;
  double jitter = 0.4;
};

/// Registers pre onto post, writes <out>/subtraction.nii.gz and
/// <out>/transform.json.
int cmd_subtract(const CommonOptions& common, const SubtractOptions& opts);
/// Writes <out>/features_<KIND>.csv for each requested kind.
int cmd_features(const CommonOptions& common, const FeaturesOptions& opts);
/// Writes the ratio table to <out> (a file path).
int cmd_volumetrics(const CommonOptions& common, const VolumetricsCmdOptions& opts);
/// Writes one report JSON per (modality, experiment, classifier) and
/// <out>/summary.csv.
int cmd_train_eval(const CommonOptions& common, const TrainEvalOptions& opts);
/// Writes <out>/stats.json and <out>/stats.csv.
int cmd_stats(const CommonOptions& common, const StatsOptions& opts);
/// Writes a synthetic cohort and <out>/manifest.csv.
int cmd_phantom(const CommonOptions& common, const PhantomOptions& opts);

/// Level names: trace, debug, info, warn, error, off.
void configure_logging(const char* level_from_env);

}  // namespace gliomics::cli
