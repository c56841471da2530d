#include "uls/manifest.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace uls {

namespace {

const char* kVersionLine = "# uls-manifest v1";

const std::vector<std::string>& known_columns() {
  static const std::vector<std::string> cols = {
      "lesion_id", "patient_id", "dataset",  "lesion_type", "partition", "image",
      "label",     "group_id",   "click_x",  "click_y",     "click_z",   "slice_index",
      "long_x1",   "long_y1",    "long_x2",  "long_y2",     "short_x1",  "short_y1",
      "short_x2",  "short_y2",   "window_level", "window_width"};
  return cols;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_num(const std::string& s, const std::string& col, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("manifest line " + std::to_string(line_no) + ": bad numeric value '" +
                             s + "' in column " + col);
  }
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);

  std::string line;
  if (!std::getline(in, line) || trim(line) != kVersionLine)
    throw std::runtime_error("manifest " + path + ": missing version line '" +
                             std::string(kVersionLine) + "'");
  if (!std::getline(in, line)) throw std::runtime_error("manifest " + path + ": missing column header");

  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    bool ok = false;
    for (const auto& k : known_columns()) ok = ok || (k == name);
    if (!ok) throw std::runtime_error("manifest " + path + ": unknown column '" + name + "'");
    if (col.count(name)) throw std::runtime_error("manifest " + path + ": duplicate column '" + name + "'");
    col[name] = i;
  }
  if (!col.count("lesion_id") || !col.count("patient_id"))
    throw std::runtime_error("manifest " + path + ": lesion_id and patient_id columns are required");

  auto field = [&](const std::vector<std::string>& row, const char* name) -> std::string {
    auto it = col.find(name);
    if (it == col.end() || it->second >= row.size()) return "";
    return trim(row[it->second]);
  };

  Manifest m;
  std::set<std::string> seen_ids;
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto row = split_csv(line);
    LesionRecord rec;
    rec.lesion_id = field(row, "lesion_id");
    rec.patient_id = field(row, "patient_id");
    rec.dataset = field(row, "dataset");
    rec.lesion_type = field(row, "lesion_type");
    rec.partition = field(row, "partition");
    rec.image_path = field(row, "image");
    rec.label_path = field(row, "label");
    rec.group_id = field(row, "group_id");

    if (rec.lesion_id.empty())
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": empty lesion_id");
    if (rec.patient_id.empty())
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": empty patient_id");
    if (!seen_ids.insert(rec.lesion_id).second)
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": duplicate lesion_id '" +
                               rec.lesion_id + "'");

    const std::string cx = field(row, "click_x"), cy = field(row, "click_y"), cz = field(row, "click_z");
    if (!cx.empty() || !cy.empty() || !cz.empty()) {
      if (cx.empty() || cy.empty() || cz.empty())
        throw std::runtime_error("manifest line " + std::to_string(line_no) +
                                 ": click needs all of click_x, click_y, click_z");
      rec.click = Index3{int(parse_num(cx, "click_x", line_no)), int(parse_num(cy, "click_y", line_no)),
                         int(parse_num(cz, "click_z", line_no))};
    }

    const char* meas_cols[9] = {"slice_index", "long_x1", "long_y1", "long_x2", "long_y2",
                                "short_x1",    "short_y1", "short_x2", "short_y2"};
    int present = 0;
    for (const char* c : meas_cols) present += !field(row, c).empty();
    if (present == 9) {
      RecistMeasurement meas;
      meas.slice_index = int(parse_num(field(row, "slice_index"), "slice_index", line_no));
      meas.long_x1 = parse_num(field(row, "long_x1"), "long_x1", line_no);
      meas.long_y1 = parse_num(field(row, "long_y1"), "long_y1", line_no);
      meas.long_x2 = parse_num(field(row, "long_x2"), "long_x2", line_no);
      meas.long_y2 = parse_num(field(row, "long_y2"), "long_y2", line_no);
      meas.short_x1 = parse_num(field(row, "short_x1"), "short_x1", line_no);
      meas.short_y1 = parse_num(field(row, "short_y1"), "short_y1", line_no);
      meas.short_x2 = parse_num(field(row, "short_x2"), "short_x2", line_no);
      meas.short_y2 = parse_num(field(row, "short_y2"), "short_y2", line_no);
      const std::string wl = field(row, "window_level"), ww = field(row, "window_width");
      if (!wl.empty()) meas.window_level = parse_num(wl, "window_level", line_no);
      if (!ww.empty()) meas.window_width = parse_num(ww, "window_width", line_no);
      rec.measurement = meas;
    } else if (present != 0) {
      throw std::runtime_error("manifest line " + std::to_string(line_no) +
                               ": incomplete measurement (need slice_index and all 8 endpoints)");
    }

    m.rows.push_back(std::move(rec));
  }
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << kVersionLine << "\n";
  out << "lesion_id,patient_id,dataset,lesion_type,partition,image,label,group_id,"
         "click_x,click_y,click_z,slice_index,long_x1,long_y1,long_x2,long_y2,"
         "short_x1,short_y1,short_x2,short_y2,window_level,window_width\n";
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  for (const auto& r : m.rows) {
    out << r.lesion_id << ',' << r.patient_id << ',' << r.dataset << ',' << r.lesion_type << ','
        << r.partition << ',' << r.image_path << ',' << r.label_path << ',' << r.group_id << ',';
    if (r.click) out << r.click->x << ',' << r.click->y << ',' << r.click->z;
    else out << ",,";
    out << ',';
    if (r.measurement) {
      const auto& q = *r.measurement;
      out << q.slice_index << ',' << num(q.long_x1) << ',' << num(q.long_y1) << ',' << num(q.long_x2)
          << ',' << num(q.long_y2) << ',' << num(q.short_x1) << ',' << num(q.short_y1) << ','
          << num(q.short_x2) << ',' << num(q.short_y2) << ','
          << (q.window_level ? num(*q.window_level) : "") << ','
          << (q.window_width ? num(*q.window_width) : "");
    } else {
      out << ",,,,,,,,,,";
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace uls
