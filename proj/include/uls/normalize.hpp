#pragma once

#include "uls/grid.hpp"
#include "uls/volume.hpp"

namespace uls {

/// Clip to [WL - WW/2, WL + WW/2] and map affinely onto [0, 255].
Grid2D<double> normalize_window(const Grid2D<float>& image, double window_level, double window_width);
VoxelVolume normalize_window(const VoxelVolume& image, double window_level, double window_width);

/// Clip to [percentile 0.5, percentile 99.5] then z-score with (mean, std).
VoxelVolume normalize_ct(const VoxelVolume& volume, const CtNormalization& norm);

}  // namespace uls
