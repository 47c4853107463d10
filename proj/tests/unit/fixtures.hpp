#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gliomics/rng.hpp"
#include "gliomics/volume.hpp"

namespace gliomics::test {

inline GridGeometry grid(int nx, int ny, int nz, std::array<double, 3> spacing = {1, 1, 1}) {
  return GridGeometry::axis_aligned({nx, ny, nz}, spacing);
}

/// Volume whose voxel value is f(x, y, z).
inline Volume make_volume(const GridGeometry& g, const std::function<double(int, int, int)>& f) {
  std::vector<double> data(g.voxel_count());
  for (int z = 0; z < g.dims[2]; ++z)
    for (int y = 0; y < g.dims[1]; ++y)
      for (int x = 0; x < g.dims[0]; ++x) data[g.index(x, y, z)] = f(x, y, z);
  return Volume(g, std::move(data));
}

inline LabelMap make_labels(const GridGeometry& g, const std::function<int(int, int, int)>& f) {
  std::vector<std::uint8_t> data(g.voxel_count());
  for (int z = 0; z < g.dims[2]; ++z)
    for (int y = 0; y < g.dims[1]; ++y)
      for (int x = 0; x < g.dims[0]; ++x) data[g.index(x, y, z)] = static_cast<std::uint8_t>(f(x, y, z));
  return LabelMap(g, std::move(data));
}

inline Volume random_volume(const GridGeometry& g, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  return make_volume(g, [&](int, int, int) { return rng.uniform(lo, hi); });
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(GLIOMICS_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gliomics::test
