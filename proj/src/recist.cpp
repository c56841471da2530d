#include "uls/recist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "uls/components.hpp"

namespace uls {

double RecistMeasurement::long_len_px() const { return std::hypot(long_x2 - long_x1, long_y2 - long_y1); }
double RecistMeasurement::short_len_px() const { return std::hypot(short_x2 - short_x1, short_y2 - short_y1); }
double RecistMeasurement::long_len_mm() const {
  return std::hypot((long_x2 - long_x1) * spacing_x, (long_y2 - long_y1) * spacing_y);
}
double RecistMeasurement::short_len_mm() const {
  return std::hypot((short_x2 - short_x1) * spacing_x, (short_y2 - short_y1) * spacing_y);
}

void RecistMeasurement::validate() const {
  for (double v : {long_x1, long_y1, long_x2, long_y2, short_x1, short_y1, short_x2, short_y2})
    if (!std::isfinite(v)) throw std::invalid_argument("RecistMeasurement: non-finite endpoint");
  if (!(spacing_x > 0) || !(spacing_y > 0))
    throw std::invalid_argument("RecistMeasurement: spacing must be positive");
  // Tolerate rounding noise on equal-length (circular) measurements.
  if (short_len_mm() > long_len_mm() * (1.0 + 1e-9) + 1e-9)
    throw std::invalid_argument("RecistMeasurement: long axis shorter than short axis");
}

namespace {

Mask2D raster_ellipse(double cx, double cy, double ux, double uy, double ea, double eb, int width,
                      int height) {
  Mask2D out(width, height);
  const int x_lo = std::max(0, int(std::floor(cx - ea - 1)));
  const int x_hi = std::min(width - 1, int(std::ceil(cx + ea + 1)));
  const int y_lo = std::max(0, int(std::floor(cy - ea - 1)));
  const int y_hi = std::min(height - 1, int(std::ceil(cy + ea + 1)));
  for (int y = y_lo; y <= y_hi; ++y)
    for (int x = x_lo; x <= x_hi; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double du = dx * ux + dy * uy;        // along the major axis
      const double dv = -dx * uy + dy * ux;       // perpendicular
      if ((du * du) / (ea * ea) + (dv * dv) / (eb * eb) <= 1.0) out.at(x, y) = 1;
    }
  return out;
}

}  // namespace

Mask2D fit_ellipse(const RecistMeasurement& m, int width, int height) {
  const double a = m.long_len_px() / 2.0;
  const double b = m.short_len_px() / 2.0;
  if (!(a > 0) || !(b > 0)) throw std::invalid_argument("fit_ellipse: degenerate axis");

  const double cx = (m.long_x1 + m.long_x2) / 2.0;
  const double cy = (m.long_y1 + m.long_y2) / 2.0;
  const double ux = (m.long_x2 - m.long_x1) / (2.0 * a);
  const double uy = (m.long_y2 - m.long_y1) / (2.0 * a);

  // Digital extents move in whole-pixel jumps, so no fixed sub-pixel margin
  // recovers both axis lengths everywhere. Rasterize over a small grid of
  // margins and keep the mask whose measured axes sit closest to the
  // requested lengths (first minimum wins; fully deterministic).
  static constexpr double kMargins[4] = {0.0, 0.25, 0.5, 0.75};
  Mask2D best;
  double best_err = std::numeric_limits<double>::infinity();
  for (double sa : kMargins)
    for (double sb : kMargins) {
      Mask2D cand = raster_ellipse(cx, cy, ux, uy, a + sa, b + sb, width, height);
      if (count_foreground(cand) == 0) continue;
      const auto [long_px, short_px] = mask_axes_2d(cand, 1.0, 1.0);
      const double err = std::max(std::abs(long_px - 2.0 * a), std::abs(short_px - 2.0 * b));
      if (err < best_err) {
        best_err = err;
        best = std::move(cand);
      }
    }
  if (!std::isfinite(best_err)) {
    // Sub-pixel measurement: cover the center pixel so downstream seeding
    // always has a foreground hypothesis.
    best = Mask2D(width, height);
    best.at(std::clamp(int(std::lround(cx)), 0, width - 1),
            std::clamp(int(std::lround(cy)), 0, height - 1)) = 1;
  }
  return best;
}

Rect2D fit_bbox(const RecistMeasurement& m, double dilation_frac, int width, int height) {
  if (dilation_frac < 0) throw std::invalid_argument("fit_bbox: dilation_frac must be >= 0");
  const double xs[4] = {m.long_x1, m.long_x2, m.short_x1, m.short_x2};
  const double ys[4] = {m.long_y1, m.long_y2, m.short_y1, m.short_y2};
  Rect2D r;
  r.x_min = *std::min_element(xs, xs + 4);
  r.x_max = *std::max_element(xs, xs + 4);
  r.y_min = *std::min_element(ys, ys + 4);
  r.y_max = *std::max_element(ys, ys + 4);
  const double wpad = (r.x_max - r.x_min) * dilation_frac;
  const double hpad = (r.y_max - r.y_min) * dilation_frac;
  r.x_min = std::max(0.0, r.x_min - wpad);
  r.x_max = std::min(double(width - 1), r.x_max + wpad);
  r.y_min = std::max(0.0, r.y_min - hpad);
  r.y_max = std::min(double(height - 1), r.y_max + hpad);
  return r;
}

namespace {

/// Boundary pixels of the largest 8-connected component, in scan order:
/// foreground pixels with a 4-neighbor that is background or out of bounds.
std::vector<std::pair<int, int>> largest_component_boundary(const Mask2D& mask) {
  const auto cl = label_components(mask, Conn2D::Eight);
  if (cl.count == 0) return {};
  std::vector<std::size_t> sizes(std::size_t(cl.count) + 1, 0);
  for (auto l : cl.labels) ++sizes[std::size_t(l)];
  sizes[0] = 0;
  int best = 1;
  for (int l = 2; l <= cl.count; ++l)
    if (sizes[std::size_t(l)] > sizes[std::size_t(best)]) best = l;

  std::vector<std::pair<int, int>> boundary;
  static const int offs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      if (cl.labels[mask.index(x, y)] != best) continue;
      for (const auto& o : offs) {
        const int qx = x + o[0], qy = y + o[1];
        if (!mask.in_bounds(qx, qy) || !mask.at(qx, qy)) {
          boundary.emplace_back(x, y);
          break;
        }
      }
    }
  return boundary;
}

std::pair<double, double> axes_of_points(const std::vector<std::pair<int, int>>& pts, double sx,
                                         double sy) {
  double best = 0.0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = (pts[j].first - pts[i].first) * sx;
      const double dy = (pts[j].second - pts[i].second) * sy;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  if (best == 0.0) return {0.0, 0.0};

  // Perpendicular extent relative to the first maximal pair.
  const double ux = (pts[bj].first - pts[bi].first) * sx / best;
  const double uy = (pts[bj].second - pts[bi].second) * sy / best;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [px, py] : pts) {
    const double proj = -double(px) * sx * uy + double(py) * sy * ux;
    lo = std::min(lo, proj);
    hi = std::max(hi, proj);
  }
  return {best, hi - lo};
}

}  // namespace

std::pair<double, double> mask_axes_2d(const Mask2D& mask, double spacing_x, double spacing_y) {
  if (!(spacing_x > 0) || !(spacing_y > 0))
    throw std::invalid_argument("mask_axes_2d: spacing must be positive");
  const auto boundary = largest_component_boundary(mask);
  if (boundary.empty()) throw std::invalid_argument("mask_axes_2d: empty mask");
  return axes_of_points(boundary, spacing_x, spacing_y);
}

AxisPair mask_axes_3d(const BinaryMask& mask) {
  const auto cl = label_components(mask, Conn3D::TwentySix);
  if (cl.count == 0) throw std::invalid_argument("mask_axes_3d: empty mask");
  std::vector<std::size_t> sizes(std::size_t(cl.count) + 1, 0);
  for (auto l : cl.labels) ++sizes[std::size_t(l)];
  sizes[0] = 0;
  int best = 1;
  for (int l = 2; l <= cl.count; ++l)
    if (sizes[std::size_t(l)] > sizes[std::size_t(best)]) best = l;

  AxisPair out{-1.0, 0.0, 0};
  for (int z = 0; z < mask.dims.z; ++z) {
    Mask2D slice(mask.dims.x, mask.dims.y);
    bool any = false;
    for (int y = 0; y < mask.dims.y; ++y)
      for (int x = 0; x < mask.dims.x; ++x)
        if (cl.labels[mask.index(x, y, z)] == best) {
          slice.at(x, y) = 1;
          any = true;
        }
    if (!any) continue;
    const auto [long_mm, short_mm] = mask_axes_2d(slice, mask.spacing.x, mask.spacing.y);
    if (long_mm > out.long_mm) out = {long_mm, short_mm, z};
  }
  return out;
}

std::pair<double, double> axis_error_px(const AxisPair& pred, const RecistMeasurement& ref) {
  const double px_size = (ref.spacing_x + ref.spacing_y) / 2.0;
  return {std::abs(pred.long_mm - ref.long_len_mm()) / px_size,
          std::abs(pred.short_mm - ref.short_len_mm()) / px_size};
}

}  // namespace uls
