#pragma once

#include <optional>

#include "uls/volume.hpp"

namespace uls {

/// Classical click-driven segmenter: seeded region growing inside an adaptive
/// intensity band, capped at a physical radius, followed by morphological
/// closing. Deterministic; no learned weights. Defaults are tuned only to
/// pass the phantom suite and are not clinical.
struct ClickSegParams {
  double tolerance_hu = 60.0;
  double max_radius_mm = 60.0;
  int closing_radius_px = 1;
};

/// Grow from `center` (a VOI voxel, normally the VOI center). Padded voxels,
/// identified by pad_value, are never included; the center itself must not be
/// padding. The output contains the center and has exactly one 26-connected
/// component.
BinaryMask segment_click(const VoxelVolume& voi, Index3 center, std::optional<float> pad_value,
                         const ClickSegParams& params = {});

}  // namespace uls
