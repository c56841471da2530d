#include "uls/voi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "uls/rng.hpp"

namespace uls {

namespace {

/// 26-connected flood fill from `start`; returns visited flags.
std::vector<std::uint8_t> flood_from(const BinaryMask& mask, Index3 start) {
  const Dims3 d = mask.dims;
  std::vector<std::uint8_t> visited(mask.data.size(), 0);
  std::vector<Index3> stack{start};
  visited[mask.index(start.x, start.y, start.z)] = 1;
  while (!stack.empty()) {
    const Index3 p = stack.back();
    stack.pop_back();
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!(dx || dy || dz)) continue;
          const Index3 q{p.x + dx, p.y + dy, p.z + dz};
          if (!d.in_bounds(q)) continue;
          const std::size_t j = mask.index(q.x, q.y, q.z);
          if (mask.data[j] && !visited[j]) {
            visited[j] = 1;
            stack.push_back(q);
          }
        }
  }
  return visited;
}

}  // namespace

Index3 sample_center(const BinaryMask& mask, std::uint64_t rng_seed) {
  std::size_t n_fg = 0;
  for (auto v : mask.data) n_fg += (v != 0);
  if (n_fg == 0) throw std::invalid_argument("sample_center: mask has no foreground voxels");

  SplitMix64 rng(rng_seed);
  std::size_t target = rng.below(n_fg);
  const Dims3 d = mask.dims;
  for (int z = 0; z < d.z; ++z)
    for (int y = 0; y < d.y; ++y)
      for (int x = 0; x < d.x; ++x) {
        if (!mask.at(x, y, z)) continue;
        if (target == 0) return {x, y, z};
        --target;
      }
  throw std::logic_error("sample_center: unreachable");
}

BinaryMask strip_noncentral(const BinaryMask& label) {
  const Index3 c = voi_center(label.dims);
  if (!label.at(c)) throw std::invalid_argument("strip_noncentral: center voxel is background");
  const auto keep = flood_from(label, c);
  BinaryMask out(label.dims, label.spacing);
  for (std::size_t i = 0; i < keep.size(); ++i) out.data[i] = keep[i];
  return out;
}

VoiSample extract_voi(const VoxelVolume& scan, const BinaryMask& lesion_mask, Index3 center,
                      const VoiSpec& spec) {
  if (scan.dims != lesion_mask.dims)
    throw std::invalid_argument("extract_voi: scan and mask dims differ");
  if (spec.shape.x <= 0 || spec.shape.y <= 0 || spec.shape.z <= 0)
    throw std::invalid_argument("extract_voi: VOI shape must be positive");
  if (!scan.in_bounds(center) || !lesion_mask.at(center))
    throw std::invalid_argument("extract_voi: center is not a foreground voxel");

  const Index3 c0 = voi_center(spec.shape);
  const Index3 origin = center - c0;  // scan voxel mapped to VOI (0,0,0)
  const Dims3 sd = scan.dims;

  // Footprint of the crop inside the scan, in VOI coordinates.
  const int lo_x = std::max(0, -origin.x), hi_x = std::min(spec.shape.x, sd.x - origin.x);
  const int lo_y = std::max(0, -origin.y), hi_y = std::min(spec.shape.y, sd.y - origin.y);
  const int lo_z = std::max(0, -origin.z), hi_z = std::min(spec.shape.z, sd.z - origin.z);

  float fp_min = std::numeric_limits<float>::infinity();
  for (int z = lo_z; z < hi_z; ++z)
    for (int y = lo_y; y < hi_y; ++y)
      for (int x = lo_x; x < hi_x; ++x)
        fp_min = std::min(fp_min, scan.at(origin.x + x, origin.y + y, origin.z + z));

  VoiSample out;
  out.center_source_voxel = center;
  out.pad_value = fp_min - 1.0f;
  out.padded = lo_x > 0 || lo_y > 0 || lo_z > 0 || hi_x < spec.shape.x || hi_y < spec.shape.y ||
               hi_z < spec.shape.z;
  out.seed = spec.rng_seed;

  out.image = VoxelVolume(spec.shape, scan.spacing, scan.unit, out.pad_value);
  out.image.dtype = scan.dtype;
  BinaryMask label(spec.shape, scan.spacing);
  for (int z = lo_z; z < hi_z; ++z)
    for (int y = lo_y; y < hi_y; ++y)
      for (int x = lo_x; x < hi_x; ++x) {
        out.image.at(x, y, z) = scan.at(origin.x + x, origin.y + y, origin.z + z);
        label.at(x, y, z) = lesion_mask.at(origin.x + x, origin.y + y, origin.z + z) ? 1 : 0;
      }
  out.label = strip_noncentral(label);

  // Exclusion rule: the central lesion's axial bounding-box diagonal, measured
  // on the full scan mask, must fit the VOI's axial extent.
  {
    const auto comp = flood_from(lesion_mask, center);
    int xmin = sd.x, xmax = -1, ymin = sd.y, ymax = -1;
    for (int z = 0; z < sd.z; ++z)
      for (int y = 0; y < sd.y; ++y)
        for (int x = 0; x < sd.x; ++x)
          if (comp[lesion_mask.index(x, y, z)]) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
          }
    const double wx = xmax - xmin + 1, wy = ymax - ymin + 1;
    const double diag = std::hypot(wx, wy);
    out.oversized_excluded = diag > double(std::min(spec.shape.x, spec.shape.y));
  }
  return out;
}

}  // namespace uls
