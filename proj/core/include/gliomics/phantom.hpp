#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gliomics/registration.hpp"
#include "gliomics/volume.hpp"

namespace gliomics {

/// Reference composition per grade: median, minimum and maximum percentage
/// of each label (edema, enhancing, non-enhancing, cyst, necrosis).
struct GradeComposition {
  std::array<double, 5> median;
  std::array<double, 5> min;
  std::array<double, 5> max;
};

/// grade in {2, 3, 4}.
const GradeComposition& grade_composition(int grade);

/// Intensity model of one synthetic modality. Index 0 is background,
/// 1..5 the tumor labels. When `base` names another modality the voxel is
/// that modality's value plus N(mean, sd) (e.g. a contrast-enhanced scan
/// built on its pre-contrast partner).
struct ModalityProfile {
  std::string name;
  std::array<double, 6> mean{};
  std::array<double, 6> sd{};
  std::string base;
};

/// t1_pre, t1_post, t2, flair, adc.
std::vector<ModalityProfile> default_modalities();

struct PhantomSpec {
  int grade = 4;
  /// Target percent per label 1..5, summing to at most 100. Any shortfall
  /// is filled with non-enhancing tissue (label 3).
  std::array<double, 5> ratios{};
  Index3 dims{32, 32, 32};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  /// Tumor (all labels) as a fraction of the grid.
  double tumor_fraction = 0.12;
  std::vector<ModalityProfile> modalities;
  /// Weight of the second intensity component inside the tumor.
  double heterogeneity = 0.1;
  /// Second component: mean + shift * sd, spread 1.5 * sd.
  double heterogeneity_shift = 3.0;
  /// Angular boundary irregularity (0 = smooth ellipsoid).
  double irregularity = 0.1;
  std::uint64_t seed = 0;

  /// Grade defaults: median ratios, heterogeneity 0.1 / 0.25 / 0.45.
  static PhantomSpec for_grade(int grade, std::uint64_t seed = 0);

  /// Throws InvalidArgument / InfeasibleRatios.
  void validate() const;
};

/// Common grid of every phantom: axis-aligned, centered on the world origin.
GridGeometry phantom_geometry(Index3 dims, std::array<double, 3> spacing);

struct Phantom {
  std::vector<std::string> modality_names;
  std::vector<Volume> volumes;  // aligned with modality_names
  LabelMap labels;
  int grade = 0;

  const Volume& modality(const std::string& name) const;
};

/// Star-shaped tumor around a jittered center. Voxels are ranked by a
/// warped ellipsoidal radius; the inner core holds necrosis, then enhancing
/// rim, then non-enhancing tissue, a cyst lobe bulges from the core and
/// edema forms the outer shell. Label counts match the targets up to
/// rounding. Deterministic for a given seed.
Phantom generate_phantom(const PhantomSpec& spec);

/// Table-range jitter of the median composition:
/// clamp(median + f * scale * U(-1, 1), min, max), where scale is the
/// label's largest median over the grades (at least 1). A total above 100 is
/// rescaled to 100; a shortfall goes to non-enhancing tissue.
std::array<double, 5> jitter_ratios(int grade, double f, std::uint64_t seed);

struct CohortSpec {
  std::array<int, 3> n_per_grade{18, 14, 25};  // grades II, III, IV
  std::uint64_t base_seed = 0;
  Index3 dims{32, 32, 32};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  double jitter = 0.4;
  unsigned jobs = 1;
};

struct Subject {
  std::string id;
  int grade = 0;
  Phantom phantom;
};

struct Cohort {
  std::vector<std::string> modality_names;
  std::vector<Subject> subjects;  // grade II first, then III, then IV
};

/// Subject i uses derive_seed(base_seed, i). Throws InvalidArgument when a
/// grade has fewer than 3 subjects.
Cohort generate_cohort(const CohortSpec& spec);
Cohort generate_cohort(std::array<int, 3> n_per_grade, std::uint64_t base_seed);

/// Smooth synthetic image (sum of Gaussian blobs on a low baseline) that
/// can be evaluated anywhere in world space, for registration tests.
class SmoothField {
 public:
  explicit SmoothField(const GridGeometry& grid, std::uint64_t seed, int blobs = 24);

  double operator()(const Eigen::Vector3d& world) const;

  Volume rasterize(const GridGeometry& grid) const;
  /// The field moved by t: value at p is field(t^-1(p)), so registering
  /// rasterize(grid) against this image recovers t.
  Volume rasterize_moved(const GridGeometry& grid, const RigidTransform& t) const;

 private:
  struct Blob {
    Eigen::Vector3d center;
    double inv_two_sigma2;
    double amplitude;
  };
  std::vector<Blob> blobs_;
  double baseline_ = 10.0;
};

}  // namespace gliomics
