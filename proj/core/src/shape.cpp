#include "gliomics/shape.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>

#include "gliomics/error.hpp"

namespace gliomics {
namespace {

using Point = std::array<std::int64_t, 2>;

std::int64_t cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Clockwise neighbour ring with y pointing down: E, SE, S, SW, W, NW, N, NE.
constexpr std::array<std::array<int, 2>, 8> kRing = {
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

int ring_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i) {
    if (kRing[i][0] == dx && kRing[i][1] == dy) return i;
  }
  return -1;
}

}  // namespace

double ramanujan_perimeter(double a, double b) {
  return std::numbers::pi * (3.0 * (a + b) - std::sqrt((3.0 * a + b) * (a + 3.0 * b)));
}

double convex_hull_area(const PlanarRegion& region, double sx, double sy) {
  std::vector<Point> pts;
  pts.reserve(region.pixels.size() * 4);
  for (const auto& p : region.pixels) {
    for (int cx = 0; cx <= 1; ++cx) {
      for (int cy = 0; cy <= 1; ++cy) pts.push_back({p[0] + cx, p[1] + cy});
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return 0.0;

  // Andrew's monotone chain on integer corner coordinates.
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);

  std::int64_t twice_area = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    twice_area += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * static_cast<double>(std::llabs(twice_area)) * sx * sy;
}

double traced_perimeter(const PlanarRegion& region, double sx, double sy) {
  if (region.pixels.size() <= 1) return 0.0;
  int x0 = region.pixels[0][0], x1 = x0, y0 = region.pixels[0][1], y1 = y0;
  for (const auto& p : region.pixels) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  // One pixel of padding keeps neighbour lookups in range.
  const int w = x1 - x0 + 3;
  const int h = y1 - y0 + 3;
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(w) * h, 0);
  for (const auto& p : region.pixels) {
    grid[static_cast<std::size_t>(p[1] - y0 + 1) * w + (p[0] - x0 + 1)] = 1;
  }
  auto fg = [&](int x, int y) { return grid[static_cast<std::size_t>(y) * w + x] != 0; };

  int sxp = 0, syp = 0;
  for (int i = 0; i < w * h; ++i) {
    if (grid[i] != 0) {
      sxp = i % w;
      syp = i / w;
      break;
    }
  }

  const double diag = std::hypot(sx, sy);
  auto step_length = [&](int d) { return (d % 2 == 1) ? diag : (d == 0 || d == 4 ? sx : sy); };

  int cx = sxp, cy = syp;
  int back = 4;  // the west neighbour of the raster-first pixel is background
  int first_dir = -1;
  double length = 0.0;
  const std::size_t max_steps = 4 * region.pixels.size() + 16;
  for (std::size_t step = 0; step < max_steps; ++step) {
    int d = -1;
    for (int k = 1; k <= 8; ++k) {
      const int cand = (back + k) % 8;
      if (fg(cx + kRing[cand][0], cy + kRing[cand][1])) {
        d = cand;
        break;
      }
    }
    if (d < 0) return 0.0;
    if (first_dir < 0) {
      first_dir = d;
    } else if (cx == sxp && cy == syp && d == first_dir) {
      break;
    }
    const int prev = (d + 7) % 8;
    const int bx = cx + kRing[prev][0];
    const int by = cy + kRing[prev][1];
    cx += kRing[d][0];
    cy += kRing[d][1];
    back = ring_index(bx - cx, by - cy);
    length += step_length(d);
  }
  return length;
}

ShapeBlock planar_shape(const PlanarRegion& region, double sx, double sy) {
  if (region.pixels.empty()) fail(ErrorCode::DegenerateRegion, "empty planar region");
  ShapeBlock out;
  const double n = static_cast<double>(region.pixels.size());
  out.area_mm2 = n * sx * sy;
  if (region.pixels.size() == 1) {
    out.solidity = 1.0;
    out.eccentricity = 0.0;
    out.axis_ratio = 1.0;
    out.perimeter_ratio = 1.0;
    out.degenerate = true;
    return out;
  }

  double mx = 0.0, my = 0.0;
  for (const auto& p : region.pixels) {
    mx += (p[0] + 0.5) * sx;
    my += (p[1] + 0.5) * sy;
  }
  mx /= n;
  my /= n;
  double uxx = 0.0, uyy = 0.0, uxy = 0.0;
  for (const auto& p : region.pixels) {
    const double dx = (p[0] + 0.5) * sx - mx;
    const double dy = (p[1] + 0.5) * sy - my;
    uxx += dx * dx;
    uyy += dy * dy;
    uxy += dx * dy;
  }
  uxx = uxx / n + sx * sx / 12.0;
  uyy = uyy / n + sy * sy / 12.0;
  uxy /= n;
  const double half_trace = 0.5 * (uxx + uyy);
  const double disc = std::sqrt(0.25 * (uxx - uyy) * (uxx - uyy) + uxy * uxy);
  const double l1 = half_trace + disc;
  const double l2 = std::max(half_trace - disc, 0.0);
  const double a = 2.0 * std::sqrt(l1);
  const double b = 2.0 * std::sqrt(l2);
  const double c = std::sqrt(std::max(a * a - b * b, 0.0));

  out.solidity = std::min(1.0, out.area_mm2 / convex_hull_area(region, sx, sy));
  out.eccentricity = c / a;
  out.axis_ratio = a / b;
  const double boundary = traced_perimeter(region, sx, sy);
  out.perimeter_ratio = ramanujan_perimeter(a, b) / boundary;
  return out;
}

ShapeBlock shape_features(const Component& component, const std::array<double, 3>& spacing) {
  if (component.voxels.empty()) fail(ErrorCode::DegenerateRegion, "empty component");
  std::map<int, std::vector<std::array<int, 2>>> slices;
  for (const auto& v : component.voxels) slices[v[2]].push_back({v[0], v[1]});
  int best_z = slices.begin()->first;
  std::size_t best_n = 0;
  for (const auto& [z, pixels] : slices) {
    if (pixels.size() > best_n) {
      best_n = pixels.size();
      best_z = z;
    }
  }
  const auto pieces = planar_components(slices[best_z]);
  ShapeBlock out = planar_shape(pieces.front(), spacing[0], spacing[1]);
  out.slice = best_z;
  return out;
}

}  // namespace gliomics
