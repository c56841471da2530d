#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uls/grid.hpp"
#include "uls/recist.hpp"

namespace uls {

/// One manifest row: a lesion bound to its files, annotation, and optional
/// consistency-group membership.
struct LesionRecord {
  std::string lesion_id;
  std::string patient_id;
  std::string dataset;
  std::string lesion_type;
  std::string partition;  // e.g. FSUP / PSUP; optional
  std::string image_path;
  std::string label_path;
  std::string group_id;   // consistency group; optional
  std::optional<Index3> click;
  std::optional<RecistMeasurement> measurement;  // spacing filled in when the image is loaded
};

struct Manifest {
  std::vector<LesionRecord> rows;
};

/// CSV with a versioned header. First line: "# uls-manifest v1"; second line names
/// the columns. Unknown columns are rejected; lesion_id must be unique and
/// patient_id present on every row.
Manifest load_manifest(const std::string& path);

void save_manifest(const Manifest& m, const std::string& path);

}  // namespace uls
