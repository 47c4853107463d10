#pragma once

#include <array>

#include "gliomics/volume.hpp"

namespace gliomics {

/// Per-label volumes in mm^3, index 0 = label 1 (edema) ... 4 = label 5.
struct ComponentVolumes {
  std::array<double, kLabelCount> volume_mm3{};
  double total_mm3 = 0.0;
};

struct VolumeRatios {
  /// Percent of the total tumour volume, same indexing as ComponentVolumes.
  std::array<double, kLabelCount> percent{};
  /// Set when the total is zero; all ratios are then 0.
  bool degenerate_total = false;
};

struct VolumetricsOptions {
  /// Whether edema counts toward the total tumour volume. When false, the
  /// total covers labels 2..5 and the edema ratio is reported against it.
  bool edema_in_total = true;
};

ComponentVolumes component_volumes(const LabelMap& labels, const VolumetricsOptions& options = {});
VolumeRatios volume_ratios(const ComponentVolumes& volumes);

}  // namespace gliomics
