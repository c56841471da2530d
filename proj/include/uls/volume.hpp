#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uls/grid.hpp"

namespace uls {

enum class IntensityUnit { HU, Normalized };

/// On-disk scalar representation. Loaders record what they read; savers honor it.
enum class ScalarType { Uint8, Int16, Float32 };

/// Dense 3D scalar grid with per-axis spacing in mm. Data is x-fastest.
struct VoxelVolume {
  Dims3 dims;
  Spacing3 spacing;
  IntensityUnit unit = IntensityUnit::HU;
  ScalarType dtype = ScalarType::Float32;
  std::vector<float> data;

  VoxelVolume() = default;
  VoxelVolume(Dims3 d, Spacing3 s, IntensityUnit u = IntensityUnit::HU, float fill = 0.0f)
      : dims(d), spacing(s), unit(u) {
    validate_shape();
    data.assign(dims.count(), fill);
  }

  std::size_t index(int x, int y, int z) const {
    return (std::size_t(z) * dims.y + std::size_t(y)) * dims.x + std::size_t(x);
  }
  float at(int x, int y, int z) const { return data[index(x, y, z)]; }
  float& at(int x, int y, int z) { return data[index(x, y, z)]; }
  float at(Index3 p) const { return at(p.x, p.y, p.z); }
  float& at(Index3 p) { return at(p.x, p.y, p.z); }
  bool in_bounds(Index3 p) const { return dims.in_bounds(p); }

  void validate_shape() const {
    if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0)
      throw std::invalid_argument("VoxelVolume: dims must be positive");
    if (!(spacing.x > 0) || !(spacing.y > 0) || !(spacing.z > 0) ||
        !std::isfinite(spacing.x) || !std::isfinite(spacing.y) || !std::isfinite(spacing.z))
      throw std::invalid_argument("VoxelVolume: spacing must be positive and finite");
  }
};

/// Boolean grid aligned to a VoxelVolume; nonzero = lesion foreground.
struct BinaryMask {
  Dims3 dims;
  Spacing3 spacing;
  std::vector<std::uint8_t> data;

  BinaryMask() = default;
  BinaryMask(Dims3 d, Spacing3 s, std::uint8_t fill = 0) : dims(d), spacing(s) {
    if (d.x <= 0 || d.y <= 0 || d.z <= 0)
      throw std::invalid_argument("BinaryMask: dims must be positive");
    data.assign(dims.count(), fill);
  }

  std::size_t index(int x, int y, int z) const {
    return (std::size_t(z) * dims.y + std::size_t(y)) * dims.x + std::size_t(x);
  }
  std::uint8_t at(int x, int y, int z) const { return data[index(x, y, z)]; }
  std::uint8_t& at(int x, int y, int z) { return data[index(x, y, z)]; }
  std::uint8_t at(Index3 p) const { return at(p.x, p.y, p.z); }
  std::uint8_t& at(Index3 p) { return at(p.x, p.y, p.z); }
  bool in_bounds(Index3 p) const { return dims.in_bounds(p); }

  std::size_t count_foreground() const {
    std::size_t n = 0;
    for (auto v : data) n += (v != 0);
    return n;
  }
  bool empty_foreground() const { return count_foreground() == 0; }
};

/// Clip/z-score constants for CT intensity normalization.
struct CtNormalization {
  double clip_min = 0, clip_max = 0;
  double mean = 0, std_dev = 0;
  double percentile_005 = 0, percentile_995 = 0;
  double median = 0;

  void validate() const {
    if (!(clip_min < clip_max)) throw std::invalid_argument("CtNormalization: clip_min must be < clip_max");
    if (!(std_dev > 0)) throw std::invalid_argument("CtNormalization: std must be positive");
  }
};

/// Intensity statistics of the chest-abdomen-pelvis CT training corpus.
inline CtNormalization default_ct_normalization() {
  CtNormalization n;
  n.clip_min = -2048.0;
  n.clip_max = 3071.0;
  n.median = 51.0;
  n.mean = 21.7;
  n.percentile_005 = -910.0;
  n.percentile_995 = 1672.0;
  n.std_dev = 331.6;
  return n;
}

inline Grid2D<float> axial_slice(const VoxelVolume& v, int z) {
  if (z < 0 || z >= v.dims.z) throw std::invalid_argument("axial_slice: z out of range");
  Grid2D<float> s(v.dims.x, v.dims.y);
  for (int y = 0; y < v.dims.y; ++y)
    for (int x = 0; x < v.dims.x; ++x) s.at(x, y) = v.at(x, y, z);
  return s;
}

inline Mask2D axial_slice(const BinaryMask& m, int z) {
  if (z < 0 || z >= m.dims.z) throw std::invalid_argument("axial_slice: z out of range");
  Mask2D s(m.dims.x, m.dims.y);
  for (int y = 0; y < m.dims.y; ++y)
    for (int x = 0; x < m.dims.x; ++x) s.at(x, y) = m.at(x, y, z) ? 1 : 0;
  return s;
}

}  // namespace uls
