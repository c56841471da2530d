#include "uls/cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "uls/log.hpp"
#include "uls/manifest.hpp"
#include "uls/nifti.hpp"
#include "uls/rng.hpp"
#include "uls/split.hpp"

namespace uls::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int effective_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

/// Run fn(i) for i in [0, n) on a bounded pool. Exceptions must be handled
/// inside fn; results are written into per-index slots by the caller.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  workers = std::min<int>(workers, int(std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& t : pool) t.join();
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string sidecar_path_for_image(const std::string& image_path) {
  std::string base = image_path;
  auto strip = [&](const std::string& suffix) {
    if (base.size() >= suffix.size() &&
        base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0)
      base.resize(base.size() - suffix.size());
  };
  strip(".gz");
  strip(".nii");
  strip("_img");
  return base + "_provenance.json";
}

std::optional<float> load_pad_value(const std::string& image_path) {
  const std::string side = sidecar_path_for_image(image_path);
  std::ifstream in(side);
  if (!in) return std::nullopt;
  try {
    json j;
    in >> j;
    if (j.contains("pad_value")) return j["pad_value"].get<float>();
  } catch (const std::exception& e) {
    log_warn("unreadable provenance sidecar " + side + ": " + e.what());
  }
  return std::nullopt;
}

}  // namespace

BudgetOutcome enforce_budget(double wall_seconds, const RuntimeBudget& budget) {
  BudgetOutcome out;
  out.wall_seconds = wall_seconds;
  if (budget.max_seconds > 0) {
    out.enforced = true;
    out.passed = wall_seconds <= budget.max_seconds;
  }
  return out;
}

CommandResult run_split(const SplitOptions& opt) {
  CommandResult res;
  const Manifest m = load_manifest(opt.manifest_path);
  const auto [train, held] = make_split(m, opt.fraction, opt.seed);
  fs::create_directories(opt.out_dir);
  save_manifest(train, (fs::path(opt.out_dir) / "train.csv").string());
  save_manifest(held, (fs::path(opt.out_dir) / "holdout.csv").string());
  res.rows_processed = int(m.rows.size());
  log_info("split: " + std::to_string(train.rows.size()) + " train rows, " +
           std::to_string(held.rows.size()) + " held-out rows");
  return res;
}

CommandResult run_prepare_voi(const PrepareVoiOptions& opt) {
  CommandResult res;
  const Manifest m = load_manifest(opt.manifest_path);
  fs::create_directories(opt.out_dir);

  std::vector<std::string> errors(m.rows.size());
  std::vector<std::uint8_t> skipped(m.rows.size(), 0);
  parallel_for(m.rows.size(), effective_workers(opt.workers), [&](std::size_t i) {
    const LesionRecord& rec = m.rows[i];
    try {
      if (rec.image_path.empty() || rec.label_path.empty())
        throw std::runtime_error("row needs image and label paths");
      const VoxelVolume scan = load_volume(rec.image_path);
      const BinaryMask mask = load_mask(rec.label_path);

      VoiSpec spec = opt.voi;
      spec.rng_seed = derive_seed(opt.seed, rec.lesion_id);
      const Index3 center = rec.click ? *rec.click : sample_center(mask, spec.rng_seed);

      VoiSample sample = extract_voi(scan, mask, center, spec);
      sample.lesion_id = rec.lesion_id;
      sample.patient_id = rec.patient_id;
      if (sample.oversized_excluded) {
        skipped[i] = 1;
        log_warn("prepare-voi: lesion " + rec.lesion_id +
                 " excluded (axial extent exceeds the VOI)");
        return;
      }

      const fs::path base = fs::path(opt.out_dir) / rec.lesion_id;
      save_volume(sample.image, base.string() + "_img.nii.gz");
      save_mask(sample.label, base.string() + "_lbl.nii.gz");

      json side;
      side["lesion_id"] = rec.lesion_id;
      side["patient_id"] = rec.patient_id;
      side["seed"] = sample.seed;
      side["center_source_voxel"] = {sample.center_source_voxel.x, sample.center_source_voxel.y,
                                     sample.center_source_voxel.z};
      side["pad_value"] = sample.pad_value;
      side["padded"] = sample.padded;
      side["oversized_excluded"] = sample.oversized_excluded;
      side["voi_shape"] = {opt.voi.shape.x, opt.voi.shape.y, opt.voi.shape.z};
      std::ofstream out(base.string() + "_provenance.json");
      out << side.dump(2) << "\n";
      if (!out) throw std::runtime_error("cannot write provenance sidecar");
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    if (!errors[i].empty()) {
      ++res.rows_failed;
      log_error("prepare-voi: lesion " + m.rows[i].lesion_id + ": " + errors[i]);
    }
  }
  res.rows_processed = int(m.rows.size());
  res.exit_code = res.rows_failed ? kInputError : kOk;
  return res;
}

CommandResult run_pseudomask(const PseudomaskOptions& opt) {
  CommandResult res;
  const Manifest m = load_manifest(opt.manifest_path);
  fs::create_directories(opt.out_dir);

  struct RowOutcome {
    std::string error;
    PseudoMaskResult result;
    bool ok = false;
  };
  std::vector<RowOutcome> rows(m.rows.size());

  parallel_for(m.rows.size(), effective_workers(opt.workers), [&](std::size_t i) {
    const LesionRecord& rec = m.rows[i];
    auto& out = rows[i];
    try {
      if (!rec.measurement) throw std::runtime_error("row has no measurement columns");
      if (rec.image_path.empty()) throw std::runtime_error("row needs an image path");
      const VoxelVolume vol = load_volume(rec.image_path);
      RecistMeasurement meas = *rec.measurement;
      meas.spacing_x = vol.spacing.x;
      meas.spacing_y = vol.spacing.y;
      if (meas.slice_index < 0 || meas.slice_index >= vol.dims.z)
        throw std::runtime_error("measurement slice outside the volume");
      const Grid2D<float> slice = axial_slice(vol, meas.slice_index);

      PseudoMaskParams params = opt.params;
      params.grabcut.seed = derive_seed(opt.seed, rec.lesion_id);
      out.result = generate_pseudomask(slice, meas, params);

      BinaryMask mask3({slice.width, slice.height, 1},
                       {vol.spacing.x, vol.spacing.y, vol.spacing.z});
      for (std::size_t p = 0; p < out.result.chosen.data.size(); ++p)
        mask3.data[p] = out.result.chosen.data[p];
      const fs::path base = fs::path(opt.out_dir) / rec.lesion_id;
      save_mask(mask3, base.string() + "_pseudomask.nii.gz");
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  // Deterministic row-order ledger; the filter applies to chosen errors.
  std::vector<PseudoMaskResult> ok_results;
  std::vector<std::size_t> ok_rows;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].ok) {
      ok_results.push_back(rows[i].result);
      ok_rows.push_back(i);
    }
  std::vector<std::uint8_t> kept_flag(rows.size(), 0);
  if (opt.filter_tol_px) {
    for (std::size_t k : filter_pseudomasks(ok_results, *opt.filter_tol_px)) {
      kept_flag[ok_rows[k]] = 1;
      res.kept.push_back(ok_rows[k]);
    }
  }

  std::ofstream ledger(fs::path(opt.out_dir) / "pseudomask_ledger.jsonl");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const LesionRecord& rec = m.rows[i];
    if (!rows[i].ok) {
      ++res.rows_failed;
      log_error("pseudomask: lesion " + rec.lesion_id + ": " + rows[i].error);
      ledger << json{{"lesion_id", rec.lesion_id}, {"error", rows[i].error}}.dump() << "\n";
      continue;
    }
    const auto& r = rows[i].result;
    json cands = json::array();
    for (const auto& c : r.candidates) {
      json cj = {{"source", c.source},
                 {"long_err_px", std::isfinite(c.long_err_px) ? json(c.long_err_px) : json(nullptr)},
                 {"short_err_px", std::isfinite(c.short_err_px) ? json(c.short_err_px) : json(nullptr)}};
      cj["window_level"] = c.window_level ? json(*c.window_level) : json(nullptr);
      cj["window_width"] = c.window_width ? json(*c.window_width) : json(nullptr);
      cands.push_back(std::move(cj));
    }
    json row = {{"lesion_id", rec.lesion_id},
                {"chosen_index", r.chosen_index},
                {"chosen_source", r.rationale},
                {"long_err_px", r.chosen_long_err_px},
                {"short_err_px", r.chosen_short_err_px},
                {"candidates", std::move(cands)},
                {"params",
                 {{"gamma", opt.params.grabcut.gamma},
                  {"gmm_components", opt.params.grabcut.gmm_components},
                  {"iterations", opt.params.grabcut.iterations},
                  {"bbox_dilation_frac", opt.params.seeds.bbox_dilation_frac},
                  {"ellipse_dilate_px", opt.params.seeds.ellipse_dilate_px},
                  {"ellipse_erode_px", opt.params.seeds.ellipse_erode_px},
                  {"ellipse_mean_half_widths", opt.params.ellipse_mean_half_widths},
                  {"seed", derive_seed(opt.seed, rec.lesion_id)}}}};
    if (opt.filter_tol_px) {
      row["kept"] = bool(kept_flag[i]);
      row["filter_tol_px"] = *opt.filter_tol_px;
    }
    ledger << row.dump() << "\n";
  }
  if (!ledger) throw std::runtime_error("cannot write pseudomask ledger");

  res.rows_processed = int(m.rows.size());
  res.exit_code = res.rows_failed ? kInputError : kOk;
  return res;
}

namespace {

struct EvalRow {
  std::string error;
  LesionScore score;
  BinaryMask prediction;  // kept only for group members
  bool is_group_member = false;
  double predict_ms = 0;
  bool ok = false;
};

}  // namespace

CommandResult run_evaluate(const EvaluateOptions& opt) {
  CommandResult res;
  const Manifest m = load_manifest(opt.manifest_path);
  fs::create_directories(opt.out_dir);

  // click-seg is the default predictor; a predictions directory overrides it.
  std::string predictor = opt.predictor;
  if (predictor.empty() && opt.predictions_dir.empty()) predictor = "click-seg";
  const bool use_predictor = !predictor.empty();
  if (use_predictor && predictor != "click-seg")
    throw std::runtime_error("unknown predictor '" + predictor + "' (available: click-seg)");

  std::vector<EvalRow> rows(m.rows.size());
  const auto wall_start = std::chrono::steady_clock::now();

  parallel_for(m.rows.size(), effective_workers(opt.workers), [&](std::size_t i) {
    const LesionRecord& rec = m.rows[i];
    auto& out = rows[i];
    out.is_group_member = !rec.group_id.empty();
    try {
      if (rec.label_path.empty()) throw std::runtime_error("row needs a reference label path");
      const BinaryMask ref = load_mask(rec.label_path);
      if (ref.empty_foreground()) throw std::runtime_error("reference label has no foreground");

      BinaryMask pred;
      bool missing = false;
      const double t0 = now_ms();
      if (use_predictor) {
        if (rec.image_path.empty()) throw std::runtime_error("row needs an image path");
        const VoxelVolume voi = load_volume(rec.image_path);
        const auto pad = load_pad_value(rec.image_path);
        pred = segment_click(voi, voi_center(voi.dims), pad, opt.clickseg);
      } else {
        const fs::path base = fs::path(opt.predictions_dir) / (rec.lesion_id + "_pred.nii.gz");
        fs::path path = base;
        if (!fs::exists(path)) path = fs::path(opt.predictions_dir) / (rec.lesion_id + "_pred.nii");
        if (!fs::exists(path)) {
          missing = true;
          pred = BinaryMask(ref.dims, ref.spacing);
          log_warn("evaluate: no prediction for lesion " + rec.lesion_id + "; scoring as empty");
        } else {
          pred = load_mask(path.string());
        }
      }
      out.predict_ms = now_ms() - t0;
      if (pred.dims != ref.dims) throw std::runtime_error("prediction dims differ from reference");

      out.score.lesion_id = rec.lesion_id;
      out.score.lesion_type = rec.lesion_type;
      out.score.partition = rec.partition;
      out.score.missing_prediction = missing;
      out.score.dice = dice(pred, ref);
      const AxisPair ref_axes = mask_axes_3d(ref);
      AxisPair pred_axes{0.0, 0.0, 0};
      if (!pred.empty_foreground()) pred_axes = mask_axes_3d(pred);
      out.score.long_smape = smape(pred_axes.long_mm, ref_axes.long_mm);
      out.score.short_smape = smape(pred_axes.short_mm, ref_axes.short_mm);

      if (out.is_group_member) out.prediction = std::move(pred);
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  const double wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

  // Timing log: one row per lesion.
  {
    std::ofstream tlog(fs::path(opt.out_dir) / "timing.jsonl");
    for (std::size_t i = 0; i < rows.size(); ++i)
      tlog << json{{"lesion_id", m.rows[i].lesion_id}, {"predict_ms", rows[i].predict_ms}}.dump()
           << "\n";
  }

  std::vector<LesionScore> scores;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) {
      ++res.rows_failed;
      log_error("evaluate: lesion " + m.rows[i].lesion_id + ": " + rows[i].error);
      continue;
    }
    if (!opt.consistency_only) scores.push_back(rows[i].score);
  }

  // Consistency groups keyed by group_id, members in row order.
  std::map<std::string, std::vector<std::size_t>> group_rows;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].ok && rows[i].is_group_member) group_rows[m.rows[i].group_id].push_back(i);

  std::vector<GroupScore> group_scores;
  for (const auto& [gid, members] : group_rows) {
    std::vector<ConsistencyMember> cm;
    for (std::size_t i : members) {
      if (!m.rows[i].click) {
        log_warn("evaluate: group " + gid + " member " + m.rows[i].lesion_id +
                 " has no click coordinates; member skipped");
        continue;
      }
      cm.push_back({rows[i].prediction, *m.rows[i].click});
    }
    if (cm.size() < 2) {
      log_warn("evaluate: group " + gid + " has fewer than two scorable members; group skipped");
      continue;
    }
    GroupScore g;
    g.group_id = gid;
    g.n_members = int(cm.size());
    g.n_pairs = int(cm.size() * (cm.size() - 1) / 2);
    try {
      g.scs = consistency_score(cm);
    } catch (const std::exception& e) {
      log_warn("evaluate: group " + gid + ": " + e.what() + "; group skipped");
      continue;
    }
    group_scores.push_back(std::move(g));
  }

  res.report = aggregate_report(std::move(scores), std::move(group_scores));
  {
    std::ofstream rj(fs::path(opt.out_dir) / "report.json");
    rj << report_to_json(res.report) << "\n";
    std::ofstream rt(fs::path(opt.out_dir) / "report.txt");
    rt << report_to_text(res.report);
    if (!rj || !rt) throw std::runtime_error("cannot write report");
  }

  RuntimeBudget budget;
  budget.max_seconds = opt.budget_seconds;
  res.budget = enforce_budget(wall_seconds, budget);
  if (res.budget.enforced) {
    std::ostringstream os;
    os << "budget: predictor wall time " << wall_seconds << " s, limit " << opt.budget_seconds
       << " s -> " << (res.budget.passed ? "pass" : "FAIL");
    log_info(os.str());
  }

  res.rows_processed = int(m.rows.size());
  if (res.rows_failed)
    res.exit_code = kInputError;
  else if (!res.budget.passed)
    res.exit_code = kBudgetOrValidation;
  return res;
}

CommandResult run_report(const ReportOptions& opt) {
  CommandResult res;
  std::ifstream in(opt.report_json_path);
  if (!in) throw std::runtime_error("cannot open report: " + opt.report_json_path);
  json j;
  in >> j;

  MetricReport r;
  for (const auto& row : j.at("per_lesion")) {
    LesionScore s;
    s.lesion_id = row.at("lesion_id").get<std::string>();
    s.lesion_type = row.value("lesion_type", "");
    s.partition = row.value("partition", "");
    s.dice = row.at("dice").get<double>();
    s.long_smape = row.at("long_smape").get<double>();
    s.short_smape = row.at("short_smape").get<double>();
    s.missing_prediction = row.value("missing_prediction", false);
    r.per_lesion.push_back(std::move(s));
  }
  std::vector<GroupScore> groups;
  for (const auto& row : j.value("groups", json::array())) {
    GroupScore g;
    g.group_id = row.at("group_id").get<std::string>();
    g.n_members = row.at("n_members").get<int>();
    g.n_pairs = row.at("n_pairs").get<int>();
    g.scs = row.at("scs").get<double>();
    groups.push_back(std::move(g));
  }
  r = aggregate_report(std::move(r.per_lesion), std::move(groups));

  const std::string text = report_to_text(r);
  if (opt.out_path.empty()) {
    std::printf("%s", text.c_str());
  } else {
    std::ofstream out(opt.out_path);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + opt.out_path);
  }
  res.report = std::move(r);
  return res;
}

}  // namespace uls::cli
