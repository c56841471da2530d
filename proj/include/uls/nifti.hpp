#pragma once

#include <stdexcept>
#include <string>

#include "uls/volume.hpp"

namespace uls {

struct NiftiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Read a 3D scalar NIfTI-1 volume (.nii or .nii.gz). Little- and big-endian
/// headers are handled; supported datatypes are uint8, int16 and float32.
/// scl_slope/scl_inter are applied when set.
VoxelVolume load_volume(const std::string& path);

/// Read a mask volume; any nonzero voxel counts as foreground.
BinaryMask load_mask(const std::string& path);

/// Write a NIfTI-1 file. A ".gz" suffix selects gzip compression. The volume's
/// dtype field picks the on-disk representation; values that do not fit it
/// exactly are rejected.
void save_volume(const VoxelVolume& v, const std::string& path);

/// Masks are stored as uint8 with voxel values in {0, 1}.
void save_mask(const BinaryMask& m, const std::string& path);

}  // namespace uls
