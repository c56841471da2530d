#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uls/grid.hpp"
#include "uls/recist.hpp"

namespace uls {

/// Four-region seeding: FG/BG are hard constraints, PFG/PBG may flip.
enum class SeedLabel : std::uint8_t { FG, PFG, PBG, BG };

struct SeedMap {
  int width = 0, height = 0;
  std::vector<SeedLabel> labels;

  SeedMap() = default;
  SeedMap(int w, int h, SeedLabel fill = SeedLabel::PBG)
      : width(w), height(h), labels(std::size_t(w) * std::size_t(h), fill) {}
  std::size_t index(int x, int y) const { return std::size_t(y) * width + std::size_t(x); }
  SeedLabel at(int x, int y) const { return labels[index(x, y)]; }
  SeedLabel& at(int x, int y) { return labels[index(x, y)]; }
};

struct SeedParams {
  double bbox_dilation_frac = 0.2;
  /// <= 0 means automatic: max(2, 10% of the long axis in px).
  int ellipse_dilate_px = 0;
  /// <= 0 means automatic: max(1, 20% of the short axis in px).
  int ellipse_erode_px = 0;
};

/// Region layout: BG outside the dilated bbox; FG = eroded ellipse; PFG =
/// dilated ellipse minus FG; PBG = the rest inside the bbox. Falls back to the
/// ellipse center pixel when the eroded ellipse is empty.
SeedMap build_seeds(const RecistMeasurement& m, int width, int height, const SeedParams& params);

struct GrabcutParams {
  int gmm_components = 5;
  double gamma = 50.0;
  int iterations = 5;
  double variance_floor = 1e-3;
  std::uint64_t seed = 0;
  /// Cap on per-region GMM fitting samples (deterministic stride subsample).
  std::size_t max_gmm_samples = 20000;
};

struct GrabcutResult {
  Mask2D mask;
  bool degenerate_seeds = false;
  /// Per iteration: energy of the labeling entering / leaving the maxflow
  /// step, both under that iteration's (fixed) GMMs.
  std::vector<std::pair<double, double>> step_energy;
};

/// Iterated GMM refit + min-cut on a [0,255]-normalized slice.
GrabcutResult grabcut(const Grid2D<double>& image, const SeedMap& seeds, const GrabcutParams& params);

struct PseudoMaskCandidate {
  std::string source;  // "grabcut_run_<i>" or "ellipse_fallback"
  std::optional<double> window_level, window_width;
  double long_err_px = 0, short_err_px = 0;
};

struct PseudoMaskResult {
  Mask2D chosen;
  int chosen_index = -1;
  std::string rationale;  // source of the chosen candidate
  double chosen_long_err_px = 0, chosen_short_err_px = 0;
  std::vector<PseudoMaskCandidate> candidates;
};

struct PseudoMaskParams {
  SeedParams seeds;
  GrabcutParams grabcut;
  /// Half-widths of the clip windows centered on the mean intensity inside
  /// the fitted ellipse.
  std::vector<double> ellipse_mean_half_widths{50.0, 100.0};
};

/// Run GrabCut once per normalization (the metadata window when present, then
/// one window per configured half-width around the ellipse-mean intensity),
/// add the rasterized ellipse as the final candidate, score every candidate by
/// summed long+short axis error against the measurement, and keep the minimum
/// (ties break toward the earlier candidate).
PseudoMaskResult generate_pseudomask(const Grid2D<float>& hu_slice, const RecistMeasurement& m,
                                     const PseudoMaskParams& params = {});

/// Keep results whose chosen candidate has both axis errors <= tol_px
/// (inclusive). Returns the kept indices in order.
std::vector<std::size_t> filter_pseudomasks(std::span<const PseudoMaskResult> results,
                                            double tol_px = 5.0);

}  // namespace uls
