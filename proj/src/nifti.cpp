#include "uls/nifti.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace uls {

namespace {

// NIfTI-1 datatype codes.
constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;

#pragma pack(push, 1)
struct Nifti1Header {
  std::int32_t sizeof_hdr;     // must be 348
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1, intent_p2, intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max, cal_min;
  float slice_duration;
  float toffset;
  std::int32_t glmax, glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code, sform_code;
  float quatern_b, quatern_c, quatern_d;
  float qoffset_x, qoffset_y, qoffset_z;
  float srow_x[4], srow_y[4], srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)

static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

template <typename T>
void swap_bytes(T& v) {
  auto* p = reinterpret_cast<unsigned char*>(&v);
  for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
}

void swap_header(Nifti1Header& h) {
  swap_bytes(h.sizeof_hdr);
  swap_bytes(h.extents);
  swap_bytes(h.session_error);
  for (auto& d : h.dim) swap_bytes(d);
  swap_bytes(h.intent_p1);
  swap_bytes(h.intent_p2);
  swap_bytes(h.intent_p3);
  swap_bytes(h.intent_code);
  swap_bytes(h.datatype);
  swap_bytes(h.bitpix);
  swap_bytes(h.slice_start);
  for (auto& p : h.pixdim) swap_bytes(p);
  swap_bytes(h.vox_offset);
  swap_bytes(h.scl_slope);
  swap_bytes(h.scl_inter);
  swap_bytes(h.slice_end);
  swap_bytes(h.cal_max);
  swap_bytes(h.cal_min);
  swap_bytes(h.slice_duration);
  swap_bytes(h.toffset);
  swap_bytes(h.glmax);
  swap_bytes(h.glmin);
  swap_bytes(h.qform_code);
  swap_bytes(h.sform_code);
  swap_bytes(h.quatern_b);
  swap_bytes(h.quatern_c);
  swap_bytes(h.quatern_d);
  swap_bytes(h.qoffset_x);
  swap_bytes(h.qoffset_y);
  swap_bytes(h.qoffset_z);
  for (auto& v : h.srow_x) swap_bytes(v);
  for (auto& v : h.srow_y) swap_bytes(v);
  for (auto& v : h.srow_z) swap_bytes(v);
}

struct GzReader {
  gzFile f = nullptr;
  explicit GzReader(const std::string& path) {
    f = gzopen(path.c_str(), "rb");  // reads plain files transparently too
    if (!f) throw NiftiError("cannot open file: " + path);
  }
  ~GzReader() {
    if (f) gzclose(f);
  }
  GzReader(const GzReader&) = delete;
  GzReader& operator=(const GzReader&) = delete;

  void read_exact(void* dst, std::size_t n, const std::string& what) {
    std::size_t done = 0;
    auto* p = static_cast<unsigned char*>(dst);
    while (done < n) {
      const unsigned chunk = unsigned(std::min<std::size_t>(n - done, 1u << 28));
      const int got = gzread(f, p + done, chunk);
      if (got <= 0) throw NiftiError("truncated file while reading " + what);
      done += std::size_t(got);
    }
  }
};

bool has_gz_suffix(const std::string& path) {
  return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

struct RawVolume {
  Dims3 dims;
  Spacing3 spacing;
  ScalarType dtype;
  std::vector<float> data;
};

RawVolume load_raw(const std::string& path) {
  GzReader in(path);
  Nifti1Header hdr{};
  in.read_exact(&hdr, sizeof(hdr), "header");

  bool swapped = false;
  if (hdr.sizeof_hdr != 348) {
    swap_header(hdr);
    swapped = true;
    if (hdr.sizeof_hdr != 348) throw NiftiError(path + ": not a NIfTI-1 file (bad header size)");
  }
  if (std::memcmp(hdr.magic, "n+1", 3) != 0) {
    if (std::memcmp(hdr.magic, "ni1", 3) == 0)
      throw NiftiError(path + ": two-file NIfTI (.hdr/.img) is not supported");
    throw NiftiError(path + ": not a NIfTI-1 file (bad magic)");
  }
  if (hdr.dim[0] != 3)
    throw NiftiError(path + ": unsupported dimensionality (dim[0]=" + std::to_string(hdr.dim[0]) +
                     ", expected a 3D volume)");

  RawVolume out;
  out.dims = {hdr.dim[1], hdr.dim[2], hdr.dim[3]};
  if (out.dims.x <= 0 || out.dims.y <= 0 || out.dims.z <= 0)
    throw NiftiError(path + ": malformed header (non-positive dimension)");

  out.spacing = {double(hdr.pixdim[1]), double(hdr.pixdim[2]), double(hdr.pixdim[3])};
  if (!(out.spacing.x > 0) || !(out.spacing.y > 0) || !(out.spacing.z > 0) ||
      !std::isfinite(out.spacing.x) || !std::isfinite(out.spacing.y) || !std::isfinite(out.spacing.z))
    throw NiftiError(path + ": malformed header (invalid voxel spacing)");

  const std::size_t n = out.dims.count();
  std::size_t elem_size = 0;
  switch (hdr.datatype) {
    case kDtUint8:
      out.dtype = ScalarType::Uint8;
      elem_size = 1;
      break;
    case kDtInt16:
      out.dtype = ScalarType::Int16;
      elem_size = 2;
      break;
    case kDtFloat32:
      out.dtype = ScalarType::Float32;
      elem_size = 4;
      break;
    default:
      throw NiftiError(path + ": unsupported datatype code " + std::to_string(hdr.datatype) +
                       " (supported: uint8, int16, float32)");
  }

  // Skip from end of header to the voxel data.
  const long offset = long(hdr.vox_offset);
  if (offset < long(sizeof(hdr))) throw NiftiError(path + ": malformed header (vox_offset too small)");
  std::vector<char> skip(std::size_t(offset) - sizeof(hdr));
  if (!skip.empty()) in.read_exact(skip.data(), skip.size(), "header extension");

  std::vector<unsigned char> raw(n * elem_size);
  in.read_exact(raw.data(), raw.size(), "voxel data");

  out.data.resize(n);
  switch (out.dtype) {
    case ScalarType::Uint8:
      for (std::size_t i = 0; i < n; ++i) out.data[i] = float(raw[i]);
      break;
    case ScalarType::Int16:
      for (std::size_t i = 0; i < n; ++i) {
        std::int16_t v;
        std::memcpy(&v, raw.data() + 2 * i, 2);
        if (swapped) swap_bytes(v);
        out.data[i] = float(v);
      }
      break;
    case ScalarType::Float32:
      for (std::size_t i = 0; i < n; ++i) {
        float v;
        std::memcpy(&v, raw.data() + 4 * i, 4);
        if (swapped) swap_bytes(v);
        out.data[i] = v;
      }
      break;
  }

  const float slope = hdr.scl_slope;
  const float inter = hdr.scl_inter;
  if (slope != 0.0f && !(slope == 1.0f && inter == 0.0f)) {
    for (auto& v : out.data) v = v * slope + inter;
    out.dtype = ScalarType::Float32;
  }
  return out;
}

void write_all(const std::string& path, const void* header, std::size_t header_len,
               const void* payload, std::size_t payload_len) {
  static const char pad[4] = {0, 0, 0, 0};
  if (has_gz_suffix(path)) {
    gzFile f = gzopen(path.c_str(), "wb");
    if (!f) throw NiftiError("cannot open file for writing: " + path);
    bool ok = gzwrite(f, header, unsigned(header_len)) == int(header_len) &&
              gzwrite(f, pad, 4) == 4;
    std::size_t done = 0;
    const auto* p = static_cast<const unsigned char*>(payload);
    while (ok && done < payload_len) {
      const unsigned chunk = unsigned(std::min<std::size_t>(payload_len - done, 1u << 28));
      ok = gzwrite(f, p + done, chunk) == int(chunk);
      done += chunk;
    }
    const int rc = gzclose(f);
    if (!ok || rc != Z_OK) throw NiftiError("write failed: " + path);
  } else {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw NiftiError("cannot open file for writing: " + path);
    f.write(static_cast<const char*>(header), std::streamsize(header_len));
    f.write(pad, 4);
    f.write(static_cast<const char*>(payload), std::streamsize(payload_len));
    if (!f) throw NiftiError("write failed: " + path);
  }
}

Nifti1Header make_header(Dims3 dims, Spacing3 spacing, std::int16_t datatype, std::int16_t bitpix) {
  Nifti1Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  h.dim[1] = std::int16_t(dims.x);
  h.dim[2] = std::int16_t(dims.y);
  h.dim[3] = std::int16_t(dims.z);
  for (int i = 4; i < 8; ++i) h.dim[i] = 1;
  h.datatype = datatype;
  h.bitpix = bitpix;
  h.pixdim[0] = 1.0f;
  h.pixdim[1] = float(spacing.x);
  h.pixdim[2] = float(spacing.y);
  h.pixdim[3] = float(spacing.z);
  for (int i = 4; i < 8; ++i) h.pixdim[i] = 1.0f;
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.xyzt_units = 2;  // NIFTI_UNITS_MM
  h.sform_code = 1;
  h.srow_x[0] = float(spacing.x);
  h.srow_y[1] = float(spacing.y);
  h.srow_z[2] = float(spacing.z);
  std::memcpy(h.magic, "n+1", 4);
  return h;
}

}  // namespace

VoxelVolume load_volume(const std::string& path) {
  RawVolume raw = load_raw(path);
  VoxelVolume v;
  v.dims = raw.dims;
  v.spacing = raw.spacing;
  v.unit = IntensityUnit::HU;
  v.dtype = raw.dtype;
  v.data = std::move(raw.data);
  return v;
}

BinaryMask load_mask(const std::string& path) {
  RawVolume raw = load_raw(path);
  BinaryMask m;
  m.dims = raw.dims;
  m.spacing = raw.spacing;
  m.data.resize(raw.data.size());
  for (std::size_t i = 0; i < raw.data.size(); ++i) m.data[i] = (raw.data[i] != 0.0f) ? 1 : 0;
  return m;
}

void save_volume(const VoxelVolume& v, const std::string& path) {
  v.validate_shape();
  if (v.data.size() != v.dims.count())
    throw std::invalid_argument("save_volume: data length does not match dims");
  if (v.dims.x > 32767 || v.dims.y > 32767 || v.dims.z > 32767)
    throw std::invalid_argument("save_volume: dimension exceeds NIfTI-1 limit");

  const std::size_t n = v.data.size();
  switch (v.dtype) {
    case ScalarType::Int16: {
      std::vector<std::int16_t> buf(n);
      for (std::size_t i = 0; i < n; ++i) {
        const float f = v.data[i];
        if (f < -32768.0f || f > 32767.0f || f != std::floor(f))
          throw std::invalid_argument("save_volume: value not representable as int16");
        buf[i] = std::int16_t(f);
      }
      const auto hdr = make_header(v.dims, v.spacing, kDtInt16, 16);
      write_all(path, &hdr, sizeof(hdr), buf.data(), buf.size() * 2);
      break;
    }
    case ScalarType::Uint8: {
      std::vector<std::uint8_t> buf(n);
      for (std::size_t i = 0; i < n; ++i) {
        const float f = v.data[i];
        if (f < 0.0f || f > 255.0f || f != std::floor(f))
          throw std::invalid_argument("save_volume: value not representable as uint8");
        buf[i] = std::uint8_t(f);
      }
      const auto hdr = make_header(v.dims, v.spacing, kDtUint8, 8);
      write_all(path, &hdr, sizeof(hdr), buf.data(), buf.size());
      break;
    }
    case ScalarType::Float32: {
      const auto hdr = make_header(v.dims, v.spacing, kDtFloat32, 32);
      write_all(path, &hdr, sizeof(hdr), v.data.data(), n * 4);
      break;
    }
  }
}

void save_mask(const BinaryMask& m, const std::string& path) {
  if (m.data.size() != m.dims.count())
    throw std::invalid_argument("save_mask: data length does not match dims");
  std::vector<std::uint8_t> buf(m.data.size());
  for (std::size_t i = 0; i < m.data.size(); ++i) buf[i] = m.data[i] ? 1 : 0;
  const auto hdr = make_header(m.dims, m.spacing, kDtUint8, 8);
  write_all(path, &hdr, sizeof(hdr), buf.data(), buf.size());
}

}  // namespace uls
