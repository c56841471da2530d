#include "uls/components.hpp"

#include <array>
#include <stdexcept>

namespace uls {

namespace {

constexpr std::array<Index3, 6> kOffsets6 = {{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};

std::vector<Index3> offsets26() {
  std::vector<Index3> out;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx || dy || dz) out.push_back({dx, dy, dz});
  return out;
}

}  // namespace

ComponentLabels3D label_components(const BinaryMask& mask, Conn3D conn) {
  const Dims3 d = mask.dims;
  ComponentLabels3D out;
  out.dims = d;
  out.labels.assign(mask.data.size(), 0);

  std::vector<Index3> offs;
  if (conn == Conn3D::Six)
    offs.assign(kOffsets6.begin(), kOffsets6.end());
  else
    offs = offsets26();

  std::vector<std::size_t> stack;
  std::int32_t next_label = 0;
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        const std::size_t i = mask.index(x, y, z);
        if (!mask.data[i] || out.labels[i]) continue;
        ++next_label;
        out.labels[i] = next_label;
        stack.push_back(i);
        while (!stack.empty()) {
          const std::size_t cur = stack.back();
          stack.pop_back();
          const int cz = int(cur / (std::size_t(d.x) * d.y));
          const std::size_t rem = cur % (std::size_t(d.x) * d.y);
          const int cy = int(rem / d.x);
          const int cx = int(rem % d.x);
          for (const auto& o : offs) {
            const Index3 q{cx + o.x, cy + o.y, cz + o.z};
            if (!d.in_bounds(q)) continue;
            const std::size_t j = mask.index(q.x, q.y, q.z);
            if (mask.data[j] && !out.labels[j]) {
              out.labels[j] = next_label;
              stack.push_back(j);
            }
          }
        }
      }
  out.count = next_label;
  return out;
}

ComponentLabels2D label_components(const Mask2D& mask, Conn2D conn) {
  ComponentLabels2D out;
  out.width = mask.width;
  out.height = mask.height;
  out.labels.assign(mask.data.size(), 0);

  std::vector<std::pair<int, int>> offs;
  offs = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  if (conn == Conn2D::Eight) {
    offs.push_back({1, 1});
    offs.push_back({1, -1});
    offs.push_back({-1, 1});
    offs.push_back({-1, -1});
  }

  std::vector<std::size_t> stack;
  std::int32_t next_label = 0;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      const std::size_t i = mask.index(x, y);
      if (!mask.data[i] || out.labels[i]) continue;
      ++next_label;
      out.labels[i] = next_label;
      stack.push_back(i);
      while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        const int cy = int(cur / mask.width);
        const int cx = int(cur % mask.width);
        for (const auto& [dx, dy] : offs) {
          const int qx = cx + dx, qy = cy + dy;
          if (!mask.in_bounds(qx, qy)) continue;
          const std::size_t j = mask.index(qx, qy);
          if (mask.data[j] && !out.labels[j]) {
            out.labels[j] = next_label;
            stack.push_back(j);
          }
        }
      }
    }
  out.count = next_label;
  return out;
}

namespace {

BinaryMask morph_once(const BinaryMask& in, MorphOp op, const std::vector<Index3>& offs) {
  const Dims3 d = in.dims;
  BinaryMask out = in;
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        if (!in.at(x, y, z)) continue;
        if (op == MorphOp::Dilate) {
          for (const auto& o : offs) {
            const Index3 q{x + o.x, y + o.y, z + o.z};
            if (d.in_bounds(q)) out.at(q) = 1;
          }
        } else {
          // Erosion: out-of-frame counts as foreground, so closing stays
          // extensive at the borders.
          for (const auto& o : offs) {
            const Index3 q{x + o.x, y + o.y, z + o.z};
            if (d.in_bounds(q) && !in.at(q)) {
              out.at(x, y, z) = 0;
              break;
            }
          }
        }
      }
  return out;
}

Mask2D morph_once(const Mask2D& in, MorphOp op, const std::vector<std::pair<int, int>>& offs) {
  Mask2D out = in;
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x) {
      if (!in.at(x, y)) continue;
      if (op == MorphOp::Dilate) {
        for (const auto& [dx, dy] : offs) {
          const int qx = x + dx, qy = y + dy;
          if (in.in_bounds(qx, qy)) out.at(qx, qy) = 1;
        }
      } else {
        for (const auto& [dx, dy] : offs) {
          const int qx = x + dx, qy = y + dy;
          if (in.in_bounds(qx, qy) && !in.at(qx, qy)) {
            out.at(x, y) = 0;
            break;
          }
        }
      }
    }
  return out;
}

}  // namespace

BinaryMask morph(const BinaryMask& mask, MorphOp op, int radius_px, Conn3D conn) {
  if (radius_px < 1) throw std::invalid_argument("morph: radius must be >= 1");
  std::vector<Index3> offs;
  if (conn == Conn3D::Six)
    offs.assign(kOffsets6.begin(), kOffsets6.end());
  else
    offs = offsets26();
  BinaryMask cur = mask;
  for (int r = 0; r < radius_px; ++r) cur = morph_once(cur, op, offs);
  return cur;
}

Mask2D morph(const Mask2D& mask, MorphOp op, int radius_px, Conn2D conn) {
  if (radius_px < 1) throw std::invalid_argument("morph: radius must be >= 1");
  std::vector<std::pair<int, int>> offs = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  if (conn == Conn2D::Eight) {
    offs.push_back({1, 1});
    offs.push_back({1, -1});
    offs.push_back({-1, 1});
    offs.push_back({-1, -1});
  }
  Mask2D cur = mask;
  for (int r = 0; r < radius_px; ++r) cur = morph_once(cur, op, offs);
  return cur;
}

}  // namespace uls
