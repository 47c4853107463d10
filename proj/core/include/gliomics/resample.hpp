#pragma once

#include <optional>

#include "gliomics/volume.hpp"

namespace gliomics {

enum class Interpolation { Linear, Nearest };

/// Trilinear sample at a continuous voxel coordinate. Returns nullopt
/// outside [0, n-1] on any axis. Coordinates within 1e-9 of a grid node
/// snap to it so that identity mappings reproduce voxel values exactly.
std::optional<double> sample_linear(const Volume& volume, const Eigen::Vector3d& voxel);

/// Resamples onto `target` by mapping each target voxel through both
/// affines. Samples falling outside the source are 0.
Volume resample(const Volume& source, const GridGeometry& target,
                Interpolation mode = Interpolation::Linear);

/// Label maps only support nearest-neighbour; Linear raises ModeMismatch.
LabelMap resample(const LabelMap& source, const GridGeometry& target,
                  Interpolation mode = Interpolation::Nearest);

}  // namespace gliomics
