#pragma once

#include <filesystem>
#include <string>

#include "uls/recist.hpp"
#include "uls/rng.hpp"
#include "uls/volume.hpp"

namespace uls::test {

inline std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ulsbench_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline BinaryMask random_mask_3d(Dims3 dims, double density, SplitMix64& rng) {
  BinaryMask m(dims, {1, 1, 1});
  for (auto& v : m.data) v = rng.next_double() < density ? 1 : 0;
  return m;
}

inline Mask2D random_mask_2d(int w, int h, double density, SplitMix64& rng) {
  Mask2D m(w, h);
  for (auto& v : m.data) v = rng.next_double() < density ? 1 : 0;
  return m;
}

/// Scan with a spherical lesion (and optionally a second distant sphere).
struct SpherePhantom {
  VoxelVolume scan;
  BinaryMask mask;
  Index3 center;
  double radius_mm = 0;
};

inline SpherePhantom make_sphere_scan(Dims3 dims, Spacing3 spacing, Index3 center,
                                      double radius_mm, float lesion_hu = 60.0f,
                                      float background_hu = -20.0f) {
  SpherePhantom p;
  p.scan = VoxelVolume(dims, spacing, IntensityUnit::HU, background_hu);
  p.scan.dtype = ScalarType::Int16;
  p.mask = BinaryMask(dims, spacing);
  p.center = center;
  p.radius_mm = radius_mm;
  const double r2 = radius_mm * radius_mm;
  for (int z = 0; z < dims.z; ++z)
    for (int y = 0; y < dims.y; ++y)
      for (int x = 0; x < dims.x; ++x) {
        const double dx = (x - center.x) * spacing.x;
        const double dy = (y - center.y) * spacing.y;
        const double dz = (z - center.z) * spacing.z;
        if (dx * dx + dy * dy + dz * dz <= r2) {
          p.scan.at(x, y, z) = lesion_hu;
          p.mask.at(x, y, z) = 1;
        }
      }
  return p;
}

/// Bright disk on a dark background with optional Gaussian noise, plus the
/// matching axis measurement (long horizontal, short vertical, both 2r).
struct DiskPhantom {
  Grid2D<float> slice;
  Mask2D truth;
  RecistMeasurement measurement;
};

inline DiskPhantom make_disk_slice(int w, int h, double cx, double cy, double r_px,
                                   float fg = 200.0f, float bg = 20.0f, double noise_sigma = 0.0,
                                   std::uint64_t noise_seed = 0) {
  DiskPhantom p;
  p.slice = Grid2D<float>(w, h, bg);
  p.truth = Mask2D(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= r_px * r_px) {
        p.slice.at(x, y) = fg;
        p.truth.at(x, y) = 1;
      }
    }
  if (noise_sigma > 0) {
    SplitMix64 rng(noise_seed);
    for (auto& v : p.slice.data) v = float(v + rng.gaussian(0.0, noise_sigma));
  }
  p.measurement.slice_index = 0;
  p.measurement.long_x1 = cx - r_px;
  p.measurement.long_y1 = cy;
  p.measurement.long_x2 = cx + r_px;
  p.measurement.long_y2 = cy;
  p.measurement.short_x1 = cx;
  p.measurement.short_y1 = cy - r_px;
  p.measurement.short_x2 = cx;
  p.measurement.short_y2 = cy + r_px;
  p.measurement.window_level = double(fg + bg) / 2.0;
  p.measurement.window_width = 255.0;
  return p;
}

}  // namespace uls::test
