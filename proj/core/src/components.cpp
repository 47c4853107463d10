#include "gliomics/components.hpp"

#include <algorithm>

#include "gliomics/error.hpp"

namespace gliomics {

std::vector<Component> connected_components(const Mask& mask) {
  const GridGeometry& g = mask.geometry;
  if (mask.data.size() != g.voxel_count()) {
    fail(ErrorCode::GeometryMismatch, "mask data does not match its grid");
  }
  std::vector<std::uint8_t> visited(mask.data.size(), 0);
  std::vector<Component> out;
  std::vector<std::size_t> stack;

  for (std::size_t start = 0; start < mask.data.size(); ++start) {
    if (mask.data[start] == 0 || visited[start] != 0) continue;
    std::vector<std::size_t> members;
    visited[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      members.push_back(cur);
      const Index3 c = g.coords(cur);
      for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int x = c[0] + dx, y = c[1] + dy, z = c[2] + dz;
            if ((dx | dy | dz) == 0 || !g.contains(x, y, z)) continue;
            const std::size_t n = g.index(x, y, z);
            if (mask.data[n] != 0 && visited[n] == 0) {
              visited[n] = 1;
              stack.push_back(n);
            }
          }
        }
      }
    }
    std::sort(members.begin(), members.end());
    Component comp;
    comp.voxels.reserve(members.size());
    for (std::size_t m : members) comp.voxels.push_back(g.coords(m));
    out.push_back(std::move(comp));
  }
  // Discovery order is already raster order of seeds; a stable sort by size
  // keeps that as the tie-break.
  std::stable_sort(out.begin(), out.end(),
                   [](const Component& a, const Component& b) { return a.size() > b.size(); });
  return out;
}

std::vector<PlanarRegion> planar_components(const std::vector<std::array<int, 2>>& pixels) {
  std::vector<PlanarRegion> out;
  if (pixels.empty()) return out;
  int x0 = pixels[0][0], x1 = x0, y0 = pixels[0][1], y1 = y0;
  for (const auto& p : pixels) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  const int w = x1 - x0 + 1;
  const int h = y1 - y0 + 1;
  // 0 = background, 1 = unvisited foreground, 2 = visited
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(w) * h, 0);
  for (const auto& p : pixels) grid[static_cast<std::size_t>(p[1] - y0) * w + (p[0] - x0)] = 1;

  std::vector<int> stack;
  for (int start = 0; start < w * h; ++start) {
    if (grid[start] != 1) continue;
    PlanarRegion region;
    std::vector<int> members;
    grid[start] = 2;
    stack.push_back(start);
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      members.push_back(cur);
      const int cx = cur % w, cy = cur / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = cx + dx, y = cy + dy;
          if ((dx | dy) == 0 || x < 0 || y < 0 || x >= w || y >= h) continue;
          const int n = y * w + x;
          if (grid[n] == 1) {
            grid[n] = 2;
            stack.push_back(n);
          }
        }
      }
    }
    std::sort(members.begin(), members.end());
    region.pixels.reserve(members.size());
    for (int m : members) region.pixels.push_back({m % w + x0, m / w + y0});
    out.push_back(std::move(region));
  }
  std::stable_sort(out.begin(), out.end(), [](const PlanarRegion& a, const PlanarRegion& b) {
    return a.pixels.size() > b.pixels.size();
  });
  return out;
}

}  // namespace gliomics
