#include "uls/normalize.hpp"

#include <algorithm>
#include <stdexcept>

namespace uls {

namespace {

double window_map(double v, double lo, double ww) {
  const double c = std::clamp(v, lo, lo + ww);
  return (c - lo) * (255.0 / ww);
}

}  // namespace

Grid2D<double> normalize_window(const Grid2D<float>& image, double window_level, double window_width) {
  if (!(window_width > 0)) throw std::invalid_argument("normalize_window: window width must be positive");
  const double lo = window_level - window_width / 2.0;
  Grid2D<double> out(image.width, image.height);
  for (std::size_t i = 0; i < image.data.size(); ++i)
    out.data[i] = window_map(double(image.data[i]), lo, window_width);
  return out;
}

VoxelVolume normalize_window(const VoxelVolume& image, double window_level, double window_width) {
  if (!(window_width > 0)) throw std::invalid_argument("normalize_window: window width must be positive");
  const double lo = window_level - window_width / 2.0;
  VoxelVolume out = image;
  out.unit = IntensityUnit::Normalized;
  out.dtype = ScalarType::Float32;
  for (auto& v : out.data) v = float(window_map(double(v), lo, window_width));
  return out;
}

VoxelVolume normalize_ct(const VoxelVolume& volume, const CtNormalization& norm) {
  norm.validate();
  if (volume.unit != IntensityUnit::HU)
    throw std::invalid_argument("normalize_ct: input must be in Hounsfield units");
  VoxelVolume out = volume;
  out.unit = IntensityUnit::Normalized;
  out.dtype = ScalarType::Float32;
  const float lo = float(norm.percentile_005);
  const float hi = float(norm.percentile_995);
  const float mean = float(norm.mean);
  const float inv_std = float(1.0 / norm.std_dev);
  for (auto& v : out.data) v = (std::clamp(v, lo, hi) - mean) * inv_std;
  return out;
}

}  // namespace uls
