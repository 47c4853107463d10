#include "gliomics/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include <Eigen/Geometry>

#include "gliomics/error.hpp"
#include "gliomics/parallel.hpp"
#include "gliomics/rng.hpp"

namespace gliomics {
namespace {

constexpr std::array<GradeComposition, 3> kComposition{{
    // grade II
    {{0.0, 0.16, 96.91, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.0}, {20.93, 21.35, 100.0, 100.0, 8.29}},
    // grade III
    {{2.75, 7.03, 86.67, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.0}, {81.14, 34.01, 100.0, 12.08, 2.52}},
    // grade IV
    {{43.47, 41.18, 7.83, 0.0, 1.30}, {0.83, 12.99, 0.0, 0.0, 0.0}, {80.54, 85.97, 48.79, 6.50, 17.63}},
}};

void check_grade(int grade) {
  if (grade < 2 || grade > 4) fail(ErrorCode::InvalidArgument, "grade must be 2, 3 or 4");
}

// Percentages short of 100 are made up with non-enhancing tissue.
std::array<double, 5> fill_to_hundred(std::array<double, 5> ratios) {
  const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  if (sum < 100.0) ratios[2] += 100.0 - sum;
  return ratios;
}

// Largest-remainder rounding of percentages to integer counts summing to total.
std::array<std::size_t, 5> label_counts(const std::array<double, 5>& target, std::size_t total) {
  const auto ratios = fill_to_hundred(target);
  const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
  std::array<std::size_t, 5> counts{};
  std::array<double, 5> remainder{};
  std::size_t assigned = 0;
  for (int k = 0; k < 5; ++k) {
    const double exact = ratios[k] / sum * static_cast<double>(total);
    counts[k] = static_cast<std::size_t>(std::floor(exact));
    remainder[k] = exact - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  std::array<int, 5> order{0, 1, 2, 3, 4};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++counts[order[i % 5]];
  return counts;
}

}  // namespace

const GradeComposition& grade_composition(int grade) {
  check_grade(grade);
  return kComposition[static_cast<std::size_t>(grade - 2)];
}

std::vector<ModalityProfile> default_modalities() {
  const std::array<double, 6> sd{6, 10, 10, 10, 10, 10};
  return {
      {"t1_pre", {100, 85, 80, 80, 50, 60}, {6, 8, 8, 8, 8, 8}, ""},
      {"t1_post", {2, 6, 80, 4, 0, 1}, {2, 3, 8, 3, 2, 2}, "t1_pre"},
      {"t2", {90, 160, 130, 150, 200, 170}, sd, ""},
      {"flair", {95, 170, 140, 155, 70, 120}, sd, ""},
      {"adc", {80, 140, 90, 110, 250, 180}, sd, ""},
  };
}

PhantomSpec PhantomSpec::for_grade(int grade, std::uint64_t seed) {
  check_grade(grade);
  PhantomSpec s;
  s.grade = grade;
  s.ratios = grade_composition(grade).median;
  s.modalities = default_modalities();
  s.heterogeneity = std::array{0.1, 0.25, 0.45}[static_cast<std::size_t>(grade - 2)];
  s.irregularity = std::array{0.05, 0.12, 0.2}[static_cast<std::size_t>(grade - 2)];
  s.seed = seed;
  return s;
}

void PhantomSpec::validate() const {
  check_grade(grade);
  for (int d = 0; d < 3; ++d) {
    if (dims[d] < 32) fail(ErrorCode::InvalidArgument, "phantom dims must be at least 32 per axis");
    if (!(spacing[d] > 0)) fail(ErrorCode::InvalidArgument, "phantom spacing must be positive");
  }
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0)) fail(ErrorCode::InfeasibleRatios, "component ratios must be non-negative");
    sum += r;
  }
  if (sum <= 0.0 || sum > 100.0 + 1e-6) {
    fail(ErrorCode::InfeasibleRatios, "component ratios must sum to a value in (0, 100]");
  }
  if (!(tumor_fraction > 0.0) || tumor_fraction > 0.5) {
    fail(ErrorCode::InfeasibleRatios, "tumor cannot be nested within the grid at this size");
  }
  if (!(heterogeneity >= 0.0 && heterogeneity <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "heterogeneity must lie in [0, 1]");
  }
  if (!(irregularity >= 0.0 && irregularity < 0.7)) {
    fail(ErrorCode::InvalidArgument, "irregularity must lie in [0, 0.7)");
  }
  if (modalities.empty()) fail(ErrorCode::InvalidArgument, "at least one modality is required");
  for (std::size_t m = 0; m < modalities.size(); ++m) {
    const auto& base = modalities[m].base;
    if (base.empty()) continue;
    const bool earlier = std::any_of(modalities.begin(), modalities.begin() + static_cast<std::ptrdiff_t>(m),
                                     [&](const ModalityProfile& p) { return p.name == base; });
    if (!earlier) fail(ErrorCode::InvalidArgument, "modality " + modalities[m].name +
                                                       " must follow its base " + base);
  }
}

GridGeometry phantom_geometry(Index3 dims, std::array<double, 3> spacing) {
  std::array<double, 3> origin{};
  for (int d = 0; d < 3; ++d) origin[d] = -0.5 * (dims[d] - 1) * spacing[d];
  return GridGeometry::axis_aligned(dims, spacing, origin);
}

const Volume& Phantom::modality(const std::string& name) const {
  for (std::size_t m = 0; m < modality_names.size(); ++m) {
    if (modality_names[m] == name) return volumes[m];
  }
  fail(ErrorCode::InvalidArgument, "phantom has no modality " + name);
}

Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  const GridGeometry grid = phantom_geometry(spec.dims, spec.spacing);
  const std::size_t n = grid.voxel_count();
  const auto tumor = static_cast<std::size_t>(std::llround(spec.tumor_fraction * static_cast<double>(n)));
  if (tumor == 0) fail(ErrorCode::InfeasibleRatios, "tumor fraction rounds to zero voxels");
  const auto counts = label_counts(spec.ratios, tumor);

  Rng rng(spec.seed);
  Eigen::Vector3d center;
  for (int d = 0; d < 3; ++d) center[d] = 0.5 * (spec.dims[d] - 1) + rng.uniform(-2.0, 2.0);
  const Eigen::Vector3d axes(1.0, rng.uniform(0.8, 1.0), rng.uniform(0.75, 0.95));
  const Eigen::Matrix3d orient =
      Eigen::AngleAxisd(rng.uniform(0.0, std::numbers::pi), Eigen::Vector3d::UnitZ()).toRotationMatrix();
  const double phase1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double phase2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double tilt = rng.uniform(-1.0, 1.0);

  const Eigen::Vector3d sp(spec.spacing[0], spec.spacing[1], spec.spacing[2]);
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Index3 v = grid.coords(i);
    const Eigen::Vector3d offset =
        (Eigen::Vector3d(v[0], v[1], v[2]) - center).cwiseProduct(sp);
    const Eigen::Vector3d q = (orient.transpose() * offset).cwiseQuotient(axes);
    const double r = q.norm();
    double warp = 1.0;
    if (r > 0.0) {
      const Eigen::Vector3d u = q / r;
      const double theta = std::atan2(u.y(), u.x());
      const double s = std::sqrt(std::max(0.0, 1.0 - u.z() * u.z()));
      warp += spec.irregularity *
              (0.6 * std::cos(3.0 * theta + phase1) * s + 0.4 * std::cos(5.0 * theta + phase2) * s +
               0.3 * tilt * u.z());
    }
    rho[i] = r / warp;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rho[a] < rho[b]; });

  std::vector<std::uint8_t> labels(n, 0);
  const std::size_t core = tumor - counts[0];
  for (std::size_t k = core; k < tumor; ++k) labels[order[k]] = 1;

  // Cyst: the core voxels nearest a lobe center placed toward the core's edge.
  std::vector<std::size_t> core_voxels(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(core));
  if (counts[3] > 0) {
    const double core_radius =
        std::cbrt(3.0 * static_cast<double>(core) * grid.voxel_volume() / (4.0 * std::numbers::pi));
    Eigen::Vector3d dir(rng.normal(), rng.normal(), 0.5 * rng.normal());
    if (dir.norm() < 1e-9) dir = Eigen::Vector3d::UnitX();
    const Eigen::Vector3d lobe = center.cwiseProduct(sp) + 0.7 * core_radius * dir.normalized();
    std::vector<double> dist(n, 0.0);
    for (std::size_t idx : core_voxels) {
      const Index3 v = grid.coords(idx);
      dist[idx] = (Eigen::Vector3d(v[0], v[1], v[2]).cwiseProduct(sp) - lobe).squaredNorm();
    }
    std::vector<std::size_t> by_lobe = core_voxels;
    std::stable_sort(by_lobe.begin(), by_lobe.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    for (std::size_t k = 0; k < counts[3]; ++k) labels[by_lobe[k]] = 4;
  }
  // Remaining core, innermost first: necrosis, enhancing rim, non-enhancing.
  std::size_t placed = 0;
  const std::array<std::pair<std::uint8_t, std::size_t>, 3> layers{
      {{5, counts[4]}, {2, counts[1]}, {3, counts[2]}}};
  std::size_t layer = 0;
  for (std::size_t idx : core_voxels) {
    if (labels[idx] == 4) continue;
    while (layer < layers.size() && placed >= layers[layer].second) {
      ++layer;
      placed = 0;
    }
    labels[idx] = layer < layers.size() ? layers[layer].first : 3;
    ++placed;
  }

  Phantom out;
  out.grade = spec.grade;
  out.labels = LabelMap(grid, labels);
  for (std::size_t m = 0; m < spec.modalities.size(); ++m) {
    const ModalityProfile& p = spec.modalities[m];
    Rng draw(derive_seed(spec.seed, 100 + m));
    std::vector<double> data(n);
    const Volume* base = nullptr;
    if (!p.base.empty()) base = &out.volumes[static_cast<std::size_t>(
        std::find(out.modality_names.begin(), out.modality_names.end(), p.base) - out.modality_names.begin())];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t l = labels[i];
      double v;
      if (base != nullptr) {
        v = (*base)[i] + draw.normal(p.mean[l], p.sd[l]);
      } else if (l > 0 && draw.uniform() < spec.heterogeneity) {
        v = draw.normal(p.mean[l] + spec.heterogeneity_shift * p.sd[l], 1.5 * p.sd[l]);
      } else {
        v = draw.normal(p.mean[l], p.sd[l]);
      }
      data[i] = std::max(0.0, v);
    }
    out.modality_names.push_back(p.name);
    out.volumes.emplace_back(grid, std::move(data));
  }
  return out;
}

std::array<double, 5> jitter_ratios(int grade, double f, std::uint64_t seed) {
  const GradeComposition& c = grade_composition(grade);
  if (!(f >= 0.0)) fail(ErrorCode::InvalidArgument, "jitter fraction must be non-negative");
  Rng rng(seed);
  std::array<double, 5> r{};
  double sum = 0.0;
  for (int k = 0; k < 5; ++k) {
    double scale = 1.0;
    for (const auto& g : kComposition) scale = std::max(scale, g.median[k]);
    r[k] = std::clamp(c.median[k] + f * scale * rng.uniform(-1.0, 1.0), c.min[k], c.max[k]);
    sum += r[k];
  }
  if (sum <= 0.0) return fill_to_hundred(c.median);
  if (sum > 100.0) {
    for (double& v : r) v *= 100.0 / sum;
    return r;
  }
  return fill_to_hundred(r);
}

Cohort generate_cohort(const CohortSpec& spec) {
  for (int n : spec.n_per_grade) {
    if (n < 3) fail(ErrorCode::InvalidArgument, "each grade needs at least 3 subjects");
  }
  struct Plan {
    int grade;
    std::uint64_t seed;
  };
  std::vector<Plan> plan;
  for (int g = 0; g < 3; ++g) {
    for (int i = 0; i < spec.n_per_grade[static_cast<std::size_t>(g)]; ++i) {
      plan.push_back({g + 2, derive_seed(spec.base_seed, plan.size())});
    }
  }
  Cohort cohort;
  cohort.subjects.resize(plan.size());
  parallel_for(plan.size(), spec.jobs, [&](std::size_t i) {
    PhantomSpec ps = PhantomSpec::for_grade(plan[i].grade, plan[i].seed);
    ps.dims = spec.dims;
    ps.spacing = spec.spacing;
    ps.ratios = jitter_ratios(plan[i].grade, spec.jitter, derive_seed(plan[i].seed, 1));
    Rng size_rng(derive_seed(plan[i].seed, 2));
    ps.tumor_fraction = size_rng.uniform(0.08, 0.16);
    Subject& s = cohort.subjects[i];
    char id[16];
    std::snprintf(id, sizeof id, "sub-%03zu", i + 1);
    s.id = id;
    s.grade = plan[i].grade;
    s.phantom = generate_phantom(ps);
  });
  cohort.modality_names = cohort.subjects.front().phantom.modality_names;
  return cohort;
}

Cohort generate_cohort(std::array<int, 3> n_per_grade, std::uint64_t base_seed) {
  CohortSpec spec;
  spec.n_per_grade = n_per_grade;
  spec.base_seed = base_seed;
  return generate_cohort(spec);
}

SmoothField::SmoothField(const GridGeometry& grid, std::uint64_t seed, int blobs) {
  Rng rng(seed);
  const Eigen::Vector3d mid = grid.center_world();
  Eigen::Vector3d half;
  for (int d = 0; d < 3; ++d) half[d] = 0.5 * (grid.dims[d] - 1) * grid.spacing[d];
  const double extent = half.minCoeff();
  for (int b = 0; b < blobs; ++b) {
    Blob blob;
    for (int d = 0; d < 3; ++d) blob.center[d] = mid[d] + rng.uniform(-0.55, 0.55) * half[d];
    const double sigma = rng.uniform(0.12, 0.3) * extent;
    blob.inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    blob.amplitude = rng.uniform(40.0, 160.0);
    blobs_.push_back(blob);
  }
}

double SmoothField::operator()(const Eigen::Vector3d& world) const {
  double v = baseline_;
  for (const Blob& b : blobs_) v += b.amplitude * std::exp(-(world - b.center).squaredNorm() * b.inv_two_sigma2);
  return v;
}

Volume SmoothField::rasterize(const GridGeometry& grid) const {
  return rasterize_moved(grid, RigidTransform::identity());
}

Volume SmoothField::rasterize_moved(const GridGeometry& grid, const RigidTransform& t) const {
  const RigidTransform inv = t.inverse();
  std::vector<double> data(grid.voxel_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Index3 v = grid.coords(i);
    data[i] = (*this)(inv.apply(grid.voxel_to_world(Eigen::Vector3d(v[0], v[1], v[2]))));
  }
  return Volume(grid, std::move(data));
}

}  // namespace gliomics
