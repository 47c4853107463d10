#include "gliomics/volumetrics.hpp"

namespace gliomics {

ComponentVolumes component_volumes(const LabelMap& labels, const VolumetricsOptions& options) {
  std::array<std::size_t, kMaxLabel + 1> counts{};
  for (std::uint8_t v : labels.data()) ++counts[v];
  const double voxel = labels.geometry().voxel_volume();
  ComponentVolumes out;
  for (int k = 0; k < kLabelCount; ++k) {
    out.volume_mm3[k] = static_cast<double>(counts[k + 1]) * voxel;
    if (k > 0 || options.edema_in_total) out.total_mm3 += out.volume_mm3[k];
  }
  return out;
}

VolumeRatios volume_ratios(const ComponentVolumes& volumes) {
  VolumeRatios out;
  if (!(volumes.total_mm3 > 0.0)) {
    out.degenerate_total = true;
    return out;
  }
  for (int k = 0; k < kLabelCount; ++k) {
    out.percent[k] = 100.0 * volumes.volume_mm3[k] / volumes.total_mm3;
  }
  return out;
}

}  // namespace gliomics
