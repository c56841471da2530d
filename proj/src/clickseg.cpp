#include "uls/clickseg.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "uls/components.hpp"

namespace uls {

BinaryMask segment_click(const VoxelVolume& voi, Index3 center, std::optional<float> pad_value,
                         const ClickSegParams& params) {
  if (!(params.tolerance_hu > 0) || !(params.max_radius_mm > 0) || params.closing_radius_px < 0)
    throw std::invalid_argument("segment_click: parameters must be positive");
  if (!voi.in_bounds(center)) throw std::invalid_argument("segment_click: center out of bounds");

  auto is_pad = [&](float v) { return pad_value && v == *pad_value; };
  if (is_pad(voi.at(center))) throw std::invalid_argument("segment_click: center voxel is padding");

  // Seed statistics from the 3x3x3 neighborhood around the click.
  double seed_sum = 0;
  int seed_n = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const Index3 q{center.x + dx, center.y + dy, center.z + dz};
        if (!voi.in_bounds(q) || is_pad(voi.at(q))) continue;
        seed_sum += voi.at(q);
        ++seed_n;
      }
  const double seed_mean = seed_sum / double(seed_n);
  const double lo = seed_mean - params.tolerance_hu;
  const double hi = seed_mean + params.tolerance_hu;
  const double max_r2 = params.max_radius_mm * params.max_radius_mm;

  const Dims3 d = voi.dims;
  BinaryMask grown(d, voi.spacing);
  std::vector<Index3> stack{center};
  grown.at(center) = 1;
  while (!stack.empty()) {
    const Index3 p = stack.back();
    stack.pop_back();
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!(dx || dy || dz)) continue;
          const Index3 q{p.x + dx, p.y + dy, p.z + dz};
          if (!d.in_bounds(q) || grown.at(q)) continue;
          const float v = voi.at(q);
          if (is_pad(v) || v < lo || v > hi) continue;
          const double mx = (q.x - center.x) * voi.spacing.x;
          const double my = (q.y - center.y) * voi.spacing.y;
          const double mz = (q.z - center.z) * voi.spacing.z;
          if (mx * mx + my * my + mz * mz > max_r2) continue;
          grown.at(q) = 1;
          stack.push_back(q);
        }
  }

  BinaryMask closed = grown;
  if (params.closing_radius_px > 0) {
    closed = morph(grown, MorphOp::Dilate, params.closing_radius_px, Conn3D::Six);
    closed = morph(closed, MorphOp::Erode, params.closing_radius_px, Conn3D::Six);
    if (pad_value) {
      for (std::size_t i = 0; i < closed.data.size(); ++i)
        if (closed.data[i] && is_pad(voi.data[i])) closed.data[i] = 0;
    }
  }

  // Closing can in rare cases leave satellites; keep the center's component.
  const auto cl = label_components(closed, Conn3D::TwentySix);
  const std::int32_t keep = cl.labels[closed.index(center.x, center.y, center.z)];
  BinaryMask out(d, voi.spacing);
  for (std::size_t i = 0; i < closed.data.size(); ++i) out.data[i] = (cl.labels[i] == keep) ? 1 : 0;
  return out;
}

}  // namespace uls
