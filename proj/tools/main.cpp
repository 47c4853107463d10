#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace gliomics::cli;

int main(int argc, char** argv) {
  configure_logging(std::getenv("GLIOMICS_LOG"));

  CLI::App app{"Glioma grading toolkit: registration, radiomic features, classifiers and statistics."};
  app.set_version_flag("--version", GLIOMICS_VERSION);
  app.require_subcommand(1);

  CommonOptions common;
  std::string config;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides the config)");
  app.add_option("--jobs", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--skip-errors", common.skip_errors, "Skip subjects that fail to load");
  app.add_option("--out", common.out, "Output directory (a file for volumetrics)")->required();

  SubtractOptions sub;
  auto* c_sub = app.add_subcommand("subtract", "Register pre onto post and write the subtraction map");
  c_sub->add_option("--pre", sub.pre, "Pre-contrast NIfTI")->required();
  c_sub->add_option("--post", sub.post, "Post-contrast NIfTI")->required();

  FeaturesOptions feat;
  auto* c_feat = app.add_subcommand("features", "Extract V1/V2/V3/SHAPE feature vectors");
  c_feat->add_option("--manifest", feat.manifest, "CSV: subject_id,grade,labels,<modality>...")->required();
  c_feat->add_option("--kinds", feat.kinds, "Feature kinds")->delimiter(',');
  c_feat->add_option("--modalities", feat.modalities, "Modality columns to use (default: all)")->delimiter(',');

  VolumetricsCmdOptions vol;
  auto* c_vol = app.add_subcommand("volumetrics", "Per-label volumes and ratios");
  c_vol->add_option("--manifest", vol.manifest, "CSV: subject_id,grade,labels,...")->required();
  c_vol->add_flag("--exclude-edema", vol.exclude_edema, "Leave edema out of the tumor total");

  TrainEvalOptions te;
  auto* c_te = app.add_subcommand("train-eval", "Repeated split, train and test of the classifiers");
  c_te->add_option("--features", te.features, "Feature CSV written by 'features'")->required();

  StatsOptions st;
  auto* c_st = app.add_subcommand("stats", "Kruskal-Wallis and Dunn tests over grade groups");
  c_st->add_option("--ratios", st.ratios, "CSV with a grade column and ratio_* or measure/value columns")
      ->required();
  c_st->add_option("--alpha", st.alpha, "Family-wise significance level");

  PhantomOptions ph;
  auto* c_ph = app.add_subcommand("phantom", "Generate a synthetic labelled cohort");
  c_ph->add_option("--n-per-grade", ph.n_per_grade, "Subjects for grades II III IV");
  c_ph->add_option("--dim", ph.dim, "Grid size per axis")->check(CLI::Range(32, 512));
  c_ph->add_option("--jitter", ph.jitter, "Composition jitter factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }
  if (!config.empty()) common.config = config;
  if (*seed_opt) common.seed = seed;

  if (*c_sub) return cmd_subtract(common, sub);
  if (*c_feat) return cmd_features(common, feat);
  if (*c_vol) return cmd_volumetrics(common, vol);
  if (*c_te) return cmd_train_eval(common, te);
  if (*c_st) return cmd_stats(common, st);
  return cmd_phantom(common, ph);
}
