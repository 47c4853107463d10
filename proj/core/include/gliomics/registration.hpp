#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gliomics/volume.hpp"

namespace gliomics {

/// Rigid world-space transform: p' = R (p - center) + center + translation,
/// R = Rz(rz) * Ry(ry) * Rx(rx). In registration it maps fixed-image world
/// points to moving-image world points.
struct RigidTransform {
  std::array<double, 3> rotation{0, 0, 0};     // radians
  std::array<double, 3> translation{0, 0, 0};  // mm
  std::array<double, 3> center{0, 0, 0};       // mm

  static RigidTransform identity(const Eigen::Vector3d& center = Eigen::Vector3d::Zero());
  /// Recovers Euler angles and translation from a rigid 4x4 for a given center.
  static RigidTransform from_matrix(const Eigen::Matrix4d& m, const Eigen::Vector3d& center);

  Eigen::Matrix3d rotation_matrix() const;
  Eigen::Matrix4d matrix() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const;
  RigidTransform inverse() const;
};

/// outer(inner(p)), expressed about inner's center.
RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner);

std::string to_json(const RigidTransform& t);
RigidTransform rigid_transform_from_json(std::string_view json);

struct MiConfig {
  /// How a moving intensity enters the joint histogram. Linear splits its
  /// unit weight between the two nearest bin centres, which keeps MI
  /// continuous in the transform parameters; Hard drops it into one bin.
  enum class Binning { Linear, Hard };

  int bins = 32;
  Binning binning = Binning::Linear;
  /// Fraction of fixed voxels used; a deterministic low-discrepancy subset.
  double sample_fraction = 1.0;
  /// Evaluation fails when fewer than this fraction of the sampled fixed
  /// voxels land inside the moving image.
  double min_overlap_fraction = 0.25;

  void validate() const;
};

/// (1+1) evolution strategy settings. Rotations are scaled by
/// `rotation_scale` (degrees per radian) so one parameter unit is about one
/// millimetre or one degree and the isotropic mutation treats them alike.
struct EsConfig {
  double initial_radius = 1.5;
  double growth = 1.05;
  double shrink = 0.98;
  int max_iters = 2000;
  double epsilon = 1e-3;
  std::uint64_t seed = 0;
  double rotation_scale = 57.3;

  void validate() const;
};

/// Mutual information in bits between `fixed` and `moving` sampled through
/// `t`, from a bins x bins joint histogram whose edges span each image's own
/// min/max. Moving values are trilinearly interpolated, then binned per
/// cfg.binning; fixed values are always hard-binned. With Hard binning the
/// self-information of an image equals its binned marginal entropy.
/// Throws InsufficientOverlap.
double mutual_information(const Volume& fixed, const Volume& moving, const RigidTransform& t,
                          const MiConfig& cfg = {});

/// Reusable metric: caches the fixed image's bin indices and the sample set.
class MutualInformationMetric {
 public:
  MutualInformationMetric(const Volume& fixed, const Volume& moving, MiConfig cfg);

  double operator()(const RigidTransform& t) const;
  std::size_t sample_count() const { return samples_.size(); }

 private:
  const Volume& fixed_;
  const Volume& moving_;
  MiConfig cfg_;
  std::vector<std::size_t> samples_;
  std::vector<int> fixed_bins_;
  double moving_min_ = 0.0;
  double moving_scale_ = 0.0;
};

struct RegistrationResult {
  RigidTransform transform;
  double initial_mi = 0.0;
  double final_mi = 0.0;
  int iterations = 0;
  double final_radius = 0.0;
  /// MI after each accepted mutation, in order.
  std::vector<double> accepted_mi;
};

/// Maximizes MI over the six rigid parameters with a (1+1)-ES starting from
/// `initial` (identity about the fixed image's center by default). A
/// mutation is kept only if it strictly improves MI; the step radius grows
/// on success and shrinks on failure, stopping below `epsilon` or at
/// `max_iters`. Deterministic for a given seed.
/// Without an explicit start, bit-identical images on one grid return the
/// identity at once.
RegistrationResult register_rigid(const Volume& fixed, const Volume& moving,
                                  const MiConfig& mi = {}, const EsConfig& es = {});
RegistrationResult register_rigid(const Volume& fixed, const Volume& moving,
                                  const RigidTransform& initial, const MiConfig& mi,
                                  const EsConfig& es);

/// max(0, post - pre(t(p))) on post's grid; pre is trilinearly sampled and
/// treated as 0 outside its field of view.
Volume subtraction_map(const Volume& pre, const Volume& post, const RigidTransform& t);

}  // namespace gliomics
