#include "gliomics/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <json.hpp>

#include "gliomics/error.hpp"
#include "gliomics/resample.hpp"
#include "gliomics/rng.hpp"

namespace gliomics {

RigidTransform RigidTransform::identity(const Eigen::Vector3d& center) {
  RigidTransform t;
  t.center = {center.x(), center.y(), center.z()};
  return t;
}

Eigen::Matrix3d RigidTransform::rotation_matrix() const {
  using Eigen::AngleAxisd;
  using Eigen::Vector3d;
  return (AngleAxisd(rotation[2], Vector3d::UnitZ()) *
          AngleAxisd(rotation[1], Vector3d::UnitY()) *
          AngleAxisd(rotation[0], Vector3d::UnitX()))
      .toRotationMatrix();
}

Eigen::Matrix4d RigidTransform::matrix() const {
  const Eigen::Matrix3d r = rotation_matrix();
  const Eigen::Vector3d c(center[0], center[1], center[2]);
  const Eigen::Vector3d t(translation[0], translation[1], translation[2]);
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = r;
  m.topRightCorner<3, 1>() = c + t - r * c;
  return m;
}

Eigen::Vector3d RigidTransform::apply(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d c(center[0], center[1], center[2]);
  const Eigen::Vector3d t(translation[0], translation[1], translation[2]);
  return rotation_matrix() * (p - c) + c + t;
}

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m,
                                           const Eigen::Vector3d& center) {
  const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
  RigidTransform out;
  // R = Rz Ry Rx  =>  R(2,0) = -sin(ry).
  const double sy = std::clamp(-r(2, 0), -1.0, 1.0);
  out.rotation[1] = std::asin(sy);
  out.rotation[0] = std::atan2(r(2, 1), r(2, 2));
  out.rotation[2] = std::atan2(r(1, 0), r(0, 0));
  const Eigen::Vector3d t = m.topRightCorner<3, 1>() - center + r * center;
  out.translation = {t.x(), t.y(), t.z()};
  out.center = {center.x(), center.y(), center.z()};
  return out;
}

RigidTransform RigidTransform::inverse() const {
  const Eigen::Vector3d c(center[0], center[1], center[2]);
  return from_matrix(matrix().inverse(), c);
}

RigidTransform compose(const RigidTransform& outer, const RigidTransform& inner) {
  const Eigen::Vector3d c(inner.center[0], inner.center[1], inner.center[2]);
  return RigidTransform::from_matrix(outer.matrix() * inner.matrix(), c);
}

std::string to_json(const RigidTransform& t) {
  nlohmann::ordered_json j;
  j["rotation_rad"] = t.rotation;
  j["translation_mm"] = t.translation;
  j["center_mm"] = t.center;
  return j.dump(2);
}

RigidTransform rigid_transform_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RigidTransform t;
    t.rotation = j.at("rotation_rad").get<std::array<double, 3>>();
    t.translation = j.at("translation_mm").get<std::array<double, 3>>();
    t.center = j.at("center_mm").get<std::array<double, 3>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("rigid transform JSON: ") + e.what());
  }
}

void MiConfig::validate() const {
  if (bins < 8) fail(ErrorCode::InvalidArgument, "MI histogram needs at least 8 bins");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "sample_fraction must lie in (0, 1]");
  }
  if (!(min_overlap_fraction > 0.0 && min_overlap_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "min_overlap_fraction must lie in (0, 1)");
  }
}

void EsConfig::validate() const {
  if (!(initial_radius > 0.0)) fail(ErrorCode::InvalidArgument, "initial_radius must be > 0");
  if (!(growth > 1.0)) fail(ErrorCode::InvalidArgument, "growth must be > 1");
  if (!(shrink > 0.0 && shrink < 1.0)) fail(ErrorCode::InvalidArgument, "shrink must lie in (0, 1)");
  if (max_iters <= 0) fail(ErrorCode::InvalidArgument, "max_iters must be positive");
  if (!(epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be > 0");
  if (!(rotation_scale > 0.0)) fail(ErrorCode::InvalidArgument, "rotation_scale must be > 0");
}

namespace {

struct Range {
  double lo;
  double scale;  // bins / (hi - lo), 0 for a constant image
};

Range intensity_range(std::span<const double> data, int bins) {
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const double span = *hi - *lo;
  return {*lo, span > 0.0 ? bins / span : 0.0};
}

int bin_of(double v, const Range& r, int bins) {
  const int b = static_cast<int>((v - r.lo) * r.scale);
  return std::clamp(b, 0, bins - 1);
}

}  // namespace

MutualInformationMetric::MutualInformationMetric(const Volume& fixed, const Volume& moving,
                                                 MiConfig cfg)
    : fixed_(fixed), moving_(moving), cfg_(cfg) {
  cfg_.validate();
  const std::size_t n = fixed.size();
  samples_.reserve(n);
  if (cfg_.sample_fraction >= 1.0) {
    for (std::size_t i = 0; i < n; ++i) samples_.push_back(i);
  } else {
    // Golden-ratio sequence: deterministic and evenly spread over the grid.
    constexpr double phi = 0.6180339887498949;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) * phi;
      if (u - std::floor(u) < cfg_.sample_fraction) samples_.push_back(i);
    }
  }
  const Range fr = intensity_range(fixed.data(), cfg_.bins);
  fixed_bins_.resize(n);
  for (std::size_t i = 0; i < n; ++i) fixed_bins_[i] = bin_of(fixed[i], fr, cfg_.bins);
  const Range mr = intensity_range(moving.data(), cfg_.bins);
  moving_min_ = mr.lo;
  moving_scale_ = mr.scale;
}

double MutualInformationMetric::operator()(const RigidTransform& t) const {
  const int bins = cfg_.bins;
  const GridGeometry& fg = fixed_.geometry();
  const Eigen::Matrix4d map = moving_.geometry().affine.inverse() * t.matrix() * fg.affine;
  const Eigen::Matrix3d lin = map.topLeftCorner<3, 3>();
  const Eigen::Vector3d shift = map.topRightCorner<3, 1>();
  const Range mr{moving_min_, moving_scale_};

  std::vector<double> joint(static_cast<std::size_t>(bins) * bins, 0.0);
  std::size_t hits = 0;
  for (std::size_t i : samples_) {
    const Index3 v = fg.coords(i);
    const Eigen::Vector3d p = lin * Eigen::Vector3d(v[0], v[1], v[2]) + shift;
    const auto value = sample_linear(moving_, p);
    if (!value) continue;
    const std::size_t row = static_cast<std::size_t>(fixed_bins_[i]) * bins;
    if (cfg_.binning == MiConfig::Binning::Hard) {
      joint[row + bin_of(*value, mr, bins)] += 1.0;
    } else {
      const double u = std::clamp((*value - mr.lo) * mr.scale - 0.5, 0.0, bins - 1.0);
      const int lo = std::min(static_cast<int>(u), bins - 2);
      const double w = u - lo;
      joint[row + lo] += 1.0 - w;
      joint[row + lo + 1] += w;
    }
    ++hits;
  }
  if (hits == 0 ||
      static_cast<double>(hits) < cfg_.min_overlap_fraction * static_cast<double>(samples_.size())) {
    fail(ErrorCode::InsufficientOverlap,
         std::to_string(hits) + " of " + std::to_string(samples_.size()) +
             " fixed samples overlap the moving image");
  }

  std::vector<double> pf(bins, 0.0), pm(bins, 0.0);
  const double inv = 1.0 / static_cast<double>(hits);
  for (int a = 0; a < bins; ++a) {
    for (int b = 0; b < bins; ++b) {
      const double p = joint[static_cast<std::size_t>(a) * bins + b] * inv;
      pf[a] += p;
      pm[b] += p;
    }
  }
  double mi = 0.0;
  for (int a = 0; a < bins; ++a) {
    for (int b = 0; b < bins; ++b) {
      const double p = joint[static_cast<std::size_t>(a) * bins + b] * inv;
      if (p > 0.0) mi += p * std::log2(p / (pf[a] * pm[b]));
    }
  }
  return std::max(0.0, mi);
}

double mutual_information(const Volume& fixed, const Volume& moving, const RigidTransform& t,
                          const MiConfig& cfg) {
  return MutualInformationMetric(fixed, moving, cfg)(t);
}

namespace {

using Params = std::array<double, 6>;

Params to_params(const RigidTransform& t, double rotation_scale) {
  return {t.rotation[0] * rotation_scale, t.rotation[1] * rotation_scale,
          t.rotation[2] * rotation_scale, t.translation[0], t.translation[1], t.translation[2]};
}

RigidTransform from_params(const Params& p, double rotation_scale,
                           const std::array<double, 3>& center) {
  RigidTransform t;
  t.rotation = {p[0] / rotation_scale, p[1] / rotation_scale, p[2] / rotation_scale};
  t.translation = {p[3], p[4], p[5]};
  t.center = center;
  return t;
}

}  // namespace

namespace {

void check_search_room(const EsConfig& es) {
  es.validate();
  if (es.initial_radius < es.epsilon) {
    fail(ErrorCode::NoImprovement, "initial radius is already below epsilon; no search possible");
  }
}

}  // namespace

RegistrationResult register_rigid(const Volume& fixed, const Volume& moving, const MiConfig& mi,
                                  const EsConfig& es) {
  const RigidTransform identity = RigidTransform::identity(fixed.geometry().center_world());
  const auto a = fixed.data();
  const auto b = moving.data();
  if (fixed.geometry().same_grid(moving.geometry()) && std::equal(a.begin(), a.end(), b.begin(), b.end())) {
    check_search_room(es);
    RegistrationResult result;
    result.transform = identity;
    result.initial_mi = result.final_mi = MutualInformationMetric(fixed, moving, mi)(identity);
    result.final_radius = es.initial_radius;
    return result;
  }
  return register_rigid(fixed, moving, identity, mi, es);
}

RegistrationResult register_rigid(const Volume& fixed, const Volume& moving,
                                  const RigidTransform& initial, const MiConfig& mi,
                                  const EsConfig& es) {
  check_search_room(es);
  const MutualInformationMetric metric(fixed, moving, mi);
  Rng rng(es.seed);

  Params current = to_params(initial, es.rotation_scale);
  RegistrationResult result;
  result.initial_mi = metric(initial);
  double current_mi = result.initial_mi;
  double radius = es.initial_radius;

  int iter = 0;
  for (; iter < es.max_iters && radius >= es.epsilon; ++iter) {
    Params candidate = current;
    for (double& c : candidate) c += radius * rng.normal();
    double value = -std::numeric_limits<double>::infinity();
    try {
      value = metric(from_params(candidate, es.rotation_scale, initial.center));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientOverlap) throw;
    }
    if (value > current_mi) {
      current = candidate;
      current_mi = value;
      radius *= es.growth;
      result.accepted_mi.push_back(value);
    } else {
      radius *= es.shrink;
    }
  }
  result.transform = from_params(current, es.rotation_scale, initial.center);
  result.final_mi = current_mi;
  result.iterations = iter;
  result.final_radius = radius;
  return result;
}

Volume subtraction_map(const Volume& pre, const Volume& post, const RigidTransform& t) {
  const GridGeometry& g = post.geometry();
  const Eigen::Matrix4d map = pre.geometry().affine.inverse() * t.matrix() * g.affine;
  const Eigen::Matrix3d lin = map.topLeftCorner<3, 3>();
  const Eigen::Vector3d shift = map.topRightCorner<3, 1>();
  std::vector<double> out(post.size(), 0.0);
  std::size_t i = 0;
  for (int z = 0; z < g.dims[2]; ++z) {
    for (int y = 0; y < g.dims[1]; ++y) {
      for (int x = 0; x < g.dims[0]; ++x, ++i) {
        const Eigen::Vector3d p = lin * Eigen::Vector3d(x, y, z) + shift;
        const double pre_value = sample_linear(pre, p).value_or(0.0);
        out[i] = std::max(0.0, post[i] - pre_value);
      }
    }
  }
  return Volume(g, std::move(out));
}

}  // namespace gliomics
