#pragma once

#include <cstdint>
#include <string>

#include "uls/volume.hpp"

namespace uls {

/// Shape and padding protocol for a volume-of-interest crop.
struct VoiSpec {
  Dims3 shape{256, 256, 128};
  std::uint64_t rng_seed = 0;
};

inline Index3 voi_center(Dims3 shape) { return {shape.x / 2, shape.y / 2, shape.z / 2}; }

struct VoiSample {
  VoxelVolume image;
  BinaryMask label;
  Index3 center_source_voxel;    // scan-space voxel the crop is centered on
  float pad_value = 0.0f;        // min intensity inside the cropped footprint, minus one
  bool padded = false;           // true if any VOI voxel fell outside the scan
  bool oversized_excluded = false;  // lesion axial bbox diagonal exceeds the VOI axial extent
  std::string lesion_id, patient_id;
  std::uint64_t seed = 0;
};

/// Uniform draw of a foreground voxel; deterministic for a given (mask, seed).
Index3 sample_center(const BinaryMask& mask, std::uint64_t rng_seed);

/// Crop a VOI of spec.shape around `center` (which must be foreground in
/// lesion_mask). The center lands on voxel floor(shape/2). Out-of-scan voxels
/// are padded with the footprint minimum minus one; the label keeps only the
/// component connected to the center.
VoiSample extract_voi(const VoxelVolume& scan, const BinaryMask& lesion_mask, Index3 center,
                      const VoiSpec& spec);

/// Remove every label component not 26-connected to the center voxel.
BinaryMask strip_noncentral(const BinaryMask& label);

}  // namespace uls
