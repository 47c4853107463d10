#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace gliomics {

using Index3 = std::array<int, 3>;

/// Sampling grid of a 3D image: voxel counts, voxel size in mm and the
/// voxel-to-world (mm) affine. Voxel (x, y, z) is stored at
/// x + nx * (y + ny * z).
struct GridGeometry {
  Index3 dims{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  Eigen::Matrix4d affine = Eigen::Matrix4d::Identity();

  /// Axis-aligned grid whose affine is diag(spacing) with the given origin.
  static GridGeometry axis_aligned(Index3 dims, std::array<double, 3> spacing,
                                   std::array<double, 3> origin = {0, 0, 0});

  /// Throws InvalidArgument when dims/spacing/affine break the invariants.
  void validate() const;

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }
  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
  }
  Index3 coords(std::size_t index) const;
  bool contains(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims[0] && y < dims[1] && z < dims[2];
  }

  double voxel_volume() const { return spacing[0] * spacing[1] * spacing[2]; }

  Eigen::Vector3d voxel_to_world(const Eigen::Vector3d& voxel) const;
  Eigen::Vector3d world_to_voxel(const Eigen::Vector3d& world) const;
  /// World position of the grid's geometric center.
  Eigen::Vector3d center_world() const;

  /// Same dims, and spacing/affine equal within `tol`.
  bool same_grid(const GridGeometry& other, double tol = 1e-6) const;
};

/// Scalar image. Values are held as double whatever the on-disk type.
/// Immutable once constructed.
class Volume {
 public:
  Volume() = default;
  Volume(GridGeometry geometry, std::vector<double> data);
  /// Zero-filled volume on `geometry`.
  explicit Volume(GridGeometry geometry);

  const GridGeometry& geometry() const { return geometry_; }
  const Index3& dims() const { return geometry_.dims; }
  std::size_t size() const { return data_.size(); }
  std::span<const double> data() const { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double at(int x, int y, int z) const { return data_[geometry_.index(x, y, z)]; }

 private:
  GridGeometry geometry_;
  std::vector<double> data_;
};

/// Tumor segmentation labels.
enum class Label : std::uint8_t {
  Background = 0,
  Edema = 1,
  Enhancing = 2,
  NonEnhancing = 3,
  Cyst = 4,
  Necrosis = 5,
};

inline constexpr int kLabelCount = 5;
inline constexpr int kMaxLabel = 5;

/// Integer label grid with values in {0..5}. Immutable once constructed.
class LabelMap {
 public:
  LabelMap() = default;
  /// Throws LabelOutOfRange naming the first offending voxel.
  LabelMap(GridGeometry geometry, std::vector<std::uint8_t> labels);

  const GridGeometry& geometry() const { return geometry_; }
  const Index3& dims() const { return geometry_.dims; }
  std::size_t size() const { return labels_.size(); }
  std::span<const std::uint8_t> data() const { return labels_; }

  std::uint8_t operator[](std::size_t i) const { return labels_[i]; }
  std::uint8_t at(int x, int y, int z) const { return labels_[geometry_.index(x, y, z)]; }

  std::size_t count(int label) const;

 private:
  GridGeometry geometry_;
  std::vector<std::uint8_t> labels_;
};

/// Boolean voxel grid used for region selection.
struct Mask {
  GridGeometry geometry;
  std::vector<std::uint8_t> data;

  std::size_t count() const;
  bool empty() const { return count() == 0; }
};

/// Voxels whose label equals `label`.
Mask label_mask(const LabelMap& labels, int label);
/// Voxels carrying any of the given labels.
Mask label_mask(const LabelMap& labels, std::span<const int> any_of);

}  // namespace gliomics
