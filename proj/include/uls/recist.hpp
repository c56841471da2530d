#pragma once

#include <optional>
#include <utility>

#include "uls/grid.hpp"
#include "uls/volume.hpp"

namespace uls {

/// Bidirectional lesion measurement on one axial slice. Endpoints are voxel
/// (x, y) coordinates; lengths in mm use in_plane_spacing.
struct RecistMeasurement {
  int slice_index = 0;
  double long_x1 = 0, long_y1 = 0, long_x2 = 0, long_y2 = 0;
  double short_x1 = 0, short_y1 = 0, short_x2 = 0, short_y2 = 0;
  double spacing_x = 1.0, spacing_y = 1.0;
  std::optional<double> window_level, window_width;

  double long_len_px() const;
  double short_len_px() const;
  double long_len_mm() const;
  double short_len_mm() const;

  /// Checks long >= short (in mm) and finite endpoints; throws on violation.
  void validate() const;
};

/// Long/short axial axis lengths of a mask, in mm, plus the slice they were
/// measured on.
struct AxisPair {
  double long_mm = 0, short_mm = 0;
  int slice_index = 0;
};

/// Axis-aligned rectangle with inclusive real-valued bounds.
struct Rect2D {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

/// Filled ellipse rasterized on the slice grid: centered at the long-axis
/// midpoint, major semi-axis along the long-axis direction, minor semi-axis
/// perpendicular with half the short-axis length. The sub-pixel coverage
/// margin is auto-calibrated so that re-measuring the mask recovers the axis
/// lengths to within one pixel.
Mask2D fit_ellipse(const RecistMeasurement& m, int width, int height);

/// Bounding box of the four measurement endpoints, expanded per side by
/// dilation_frac of its width/height and clipped to the image bounds.
Rect2D fit_bbox(const RecistMeasurement& m, double dilation_frac, int width, int height);

/// Long axis: maximum anisotropy-aware distance between boundary pixel centers
/// of the largest component. Short axis: maximum extent perpendicular to the
/// measured long-axis direction. A single pixel has zero extent.
std::pair<double, double> mask_axes_2d(const Mask2D& mask, double spacing_x, double spacing_y);

/// mask_axes_2d on every axial slice of the largest 3D component; returns the
/// pair from the slice with the maximal long axis (ties: lower slice index).
AxisPair mask_axes_3d(const BinaryMask& mask);

/// Absolute axis-length differences in pixels (mm difference divided by the
/// mean in-plane spacing).
std::pair<double, double> axis_error_px(const AxisPair& pred, const RecistMeasurement& ref);

}  // namespace uls
