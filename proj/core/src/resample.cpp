#include "gliomics/resample.hpp"

#include <cmath>

#include <Eigen/LU>

#include "gliomics/error.hpp"

namespace gliomics {
namespace {

constexpr double kSnap = 1e-9;

// Splits a coordinate into a base index and weight; false when outside.
bool locate(double c, int n, int& base, double& frac) {
  const double r = std::round(c);
  if (std::abs(c - r) < kSnap) c = r;
  if (c < 0.0 || c > n - 1) return false;
  base = static_cast<int>(std::floor(c));
  frac = c - base;
  if (base == n - 1) {
    // On the last node; no upper neighbour needed.
    frac = 0.0;
  }
  return true;
}

// Target voxel -> source voxel mapping as a single 4x4.
Eigen::Matrix4d voxel_mapping(const GridGeometry& source, const GridGeometry& target) {
  source.validate();
  target.validate();
  return source.affine.inverse() * target.affine;
}

}  // namespace

std::optional<double> sample_linear(const Volume& volume, const Eigen::Vector3d& voxel) {
  const auto& d = volume.dims();
  int bx, by, bz;
  double fx, fy, fz;
  if (!locate(voxel.x(), d[0], bx, fx) || !locate(voxel.y(), d[1], by, fy) ||
      !locate(voxel.z(), d[2], bz, fz)) {
    return std::nullopt;
  }
  const int x1 = fx > 0.0 ? bx + 1 : bx;
  const int y1 = fy > 0.0 ? by + 1 : by;
  const int z1 = fz > 0.0 ? bz + 1 : bz;
  const double c00 = volume.at(bx, by, bz) * (1 - fx) + volume.at(x1, by, bz) * fx;
  const double c10 = volume.at(bx, y1, bz) * (1 - fx) + volume.at(x1, y1, bz) * fx;
  const double c01 = volume.at(bx, by, z1) * (1 - fx) + volume.at(x1, by, z1) * fx;
  const double c11 = volume.at(bx, y1, z1) * (1 - fx) + volume.at(x1, y1, z1) * fx;
  const double c0 = c00 * (1 - fy) + c10 * fy;
  const double c1 = c01 * (1 - fy) + c11 * fy;
  return c0 * (1 - fz) + c1 * fz;
}

Volume resample(const Volume& source, const GridGeometry& target, Interpolation mode) {
  const Eigen::Matrix4d map = voxel_mapping(source.geometry(), target);
  const Eigen::Matrix3d lin = map.topLeftCorner<3, 3>();
  const Eigen::Vector3d shift = map.topRightCorner<3, 1>();
  std::vector<double> out(target.voxel_count(), 0.0);
  std::size_t i = 0;
  for (int z = 0; z < target.dims[2]; ++z) {
    for (int y = 0; y < target.dims[1]; ++y) {
      for (int x = 0; x < target.dims[0]; ++x, ++i) {
        const Eigen::Vector3d p = lin * Eigen::Vector3d(x, y, z) + shift;
        if (mode == Interpolation::Linear) {
          if (auto v = sample_linear(source, p)) out[i] = *v;
        } else {
          const int sx = static_cast<int>(std::lround(p.x()));
          const int sy = static_cast<int>(std::lround(p.y()));
          const int sz = static_cast<int>(std::lround(p.z()));
          if (source.geometry().contains(sx, sy, sz)) out[i] = source.at(sx, sy, sz);
        }
      }
    }
  }
  return Volume(target, std::move(out));
}

LabelMap resample(const LabelMap& source, const GridGeometry& target, Interpolation mode) {
  if (mode != Interpolation::Nearest) {
    fail(ErrorCode::ModeMismatch, "label maps must be resampled with nearest-neighbour");
  }
  const Eigen::Matrix4d map = voxel_mapping(source.geometry(), target);
  const Eigen::Matrix3d lin = map.topLeftCorner<3, 3>();
  const Eigen::Vector3d shift = map.topRightCorner<3, 1>();
  std::vector<std::uint8_t> out(target.voxel_count(), 0);
  std::size_t i = 0;
  for (int z = 0; z < target.dims[2]; ++z) {
    for (int y = 0; y < target.dims[1]; ++y) {
      for (int x = 0; x < target.dims[0]; ++x, ++i) {
        const Eigen::Vector3d p = lin * Eigen::Vector3d(x, y, z) + shift;
        const int sx = static_cast<int>(std::lround(p.x()));
        const int sy = static_cast<int>(std::lround(p.y()));
        const int sz = static_cast<int>(std::lround(p.z()));
        if (source.geometry().contains(sx, sy, sz)) out[i] = source.at(sx, sy, sz);
      }
    }
  }
  return LabelMap(target, std::move(out));
}

}  // namespace gliomics
