#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uls/clickseg.hpp"
#include "uls/grabcut.hpp"
#include "uls/metrics.hpp"
#include "uls/voi.hpp"

namespace uls::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kInputError = 1, kBudgetOrValidation = 2 };

struct RuntimeBudget {
  double max_seconds = 0;  // <= 0 disables enforcement
  int lesions_per_job = 100;
};

struct LesionTiming {
  std::string lesion_id;
  double predict_ms = 0;
};

struct BudgetOutcome {
  bool enforced = false;
  bool passed = true;
  double wall_seconds = 0;
};

/// Judge predictor wall time against the budget.
BudgetOutcome enforce_budget(double wall_seconds, const RuntimeBudget& budget);

struct SplitOptions {
  std::string manifest_path, out_dir;
  double fraction = 0.10;
  std::uint64_t seed = 0;
};

struct PrepareVoiOptions {
  std::string manifest_path, out_dir;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency
  VoiSpec voi;
};

struct PseudomaskOptions {
  std::string manifest_path, out_dir;
  std::uint64_t seed = 0;
  int workers = 0;
  std::optional<double> filter_tol_px;
  PseudoMaskParams params;
};

struct EvaluateOptions {
  std::string manifest_path, out_dir;
  std::string predictions_dir;            // <lesion_id>_pred.nii.gz per row
  std::string predictor;                  // empty + no predictions dir -> "click-seg"
  std::uint64_t seed = 0;
  int workers = 0;
  double budget_seconds = 0;              // <= 0 disables
  ClickSegParams clickseg;
  bool consistency_only = false;
};

struct ReportOptions {
  std::string report_json_path;
  std::string out_path;  // empty = stdout
};

struct CommandResult {
  int exit_code = kOk;
  int rows_processed = 0;
  int rows_failed = 0;
  MetricReport report;           // evaluate/consistency only
  BudgetOutcome budget;          // evaluate only
  std::vector<std::size_t> kept; // pseudomask only: indices kept by the filter
};

CommandResult run_split(const SplitOptions& opt);
CommandResult run_prepare_voi(const PrepareVoiOptions& opt);
CommandResult run_pseudomask(const PseudomaskOptions& opt);
CommandResult run_evaluate(const EvaluateOptions& opt);
CommandResult run_report(const ReportOptions& opt);

}  // namespace uls::cli
