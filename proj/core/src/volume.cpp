#include "gliomics/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "gliomics/error.hpp"

namespace gliomics {

GridGeometry GridGeometry::axis_aligned(Index3 dims, std::array<double, 3> spacing,
                                        std::array<double, 3> origin) {
  GridGeometry g;
  g.dims = dims;
  g.spacing = spacing;
  g.affine = Eigen::Matrix4d::Identity();
  for (int a = 0; a < 3; ++a) {
    g.affine(a, a) = spacing[a];
    g.affine(a, 3) = origin[a];
  }
  return g;
}

void GridGeometry::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] <= 0) {
      fail(ErrorCode::InvalidArgument, "grid dimension " + std::to_string(a) +
                                           " must be positive, got " +
                                           std::to_string(dims[a]));
    }
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a])) {
      fail(ErrorCode::InvalidArgument,
           "voxel spacing must be positive, got " + std::to_string(spacing[a]));
    }
  }
  const double det = affine.topLeftCorner<3, 3>().determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12) {
    fail(ErrorCode::InvalidArgument, "voxel-to-world affine is singular");
  }
}

Index3 GridGeometry::coords(std::size_t index) const {
  const auto nx = static_cast<std::size_t>(dims[0]);
  const auto ny = static_cast<std::size_t>(dims[1]);
  return {static_cast<int>(index % nx), static_cast<int>((index / nx) % ny),
          static_cast<int>(index / (nx * ny))};
}

Eigen::Vector3d GridGeometry::voxel_to_world(const Eigen::Vector3d& voxel) const {
  return affine.topLeftCorner<3, 3>() * voxel + affine.topRightCorner<3, 1>();
}

Eigen::Vector3d GridGeometry::world_to_voxel(const Eigen::Vector3d& world) const {
  return affine.topLeftCorner<3, 3>().inverse() * (world - affine.topRightCorner<3, 1>());
}

Eigen::Vector3d GridGeometry::center_world() const {
  const Eigen::Vector3d mid((dims[0] - 1) / 2.0, (dims[1] - 1) / 2.0, (dims[2] - 1) / 2.0);
  return voxel_to_world(mid);
}

bool GridGeometry::same_grid(const GridGeometry& other, double tol) const {
  if (dims != other.dims) return false;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(spacing[a] - other.spacing[a]) > tol) return false;
  }
  return (affine - other.affine).cwiseAbs().maxCoeff() <= tol;
}

Volume::Volume(GridGeometry geometry, std::vector<double> data)
    : geometry_(std::move(geometry)), data_(std::move(data)) {
  geometry_.validate();
  if (data_.size() != geometry_.voxel_count()) {
    fail(ErrorCode::InvalidArgument,
         "volume data length " + std::to_string(data_.size()) +
             " does not match grid voxel count " +
             std::to_string(geometry_.voxel_count()));
  }
}

Volume::Volume(GridGeometry geometry)
    : Volume(geometry, std::vector<double>(geometry.voxel_count(), 0.0)) {}

LabelMap::LabelMap(GridGeometry geometry, std::vector<std::uint8_t> labels)
    : geometry_(std::move(geometry)), labels_(std::move(labels)) {
  geometry_.validate();
  if (labels_.size() != geometry_.voxel_count()) {
    fail(ErrorCode::InvalidArgument,
         "label data length " + std::to_string(labels_.size()) +
             " does not match grid voxel count " +
             std::to_string(geometry_.voxel_count()));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] > kMaxLabel) {
      fail(ErrorCode::LabelOutOfRange, "value " + std::to_string(labels_[i]) +
                                           " at voxel index " + std::to_string(i));
    }
  }
}

std::size_t LabelMap::count(int label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(),
                                             static_cast<std::uint8_t>(label)));
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
}

Mask label_mask(const LabelMap& labels, int label) {
  const int one[] = {label};
  return label_mask(labels, one);
}

Mask label_mask(const LabelMap& labels, std::span<const int> any_of) {
  std::array<bool, 256> wanted{};
  for (int l : any_of) {
    if (l >= 0 && l < 256) wanted[static_cast<std::size_t>(l)] = true;
  }
  Mask m{labels.geometry(), std::vector<std::uint8_t>(labels.size(), 0)};
  const auto src = labels.data();
  for (std::size_t i = 0; i < src.size(); ++i) m.data[i] = wanted[src[i]] ? 1 : 0;
  return m;
}

}  // namespace gliomics
