#include "uls/grabcut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uls/components.hpp"
#include "uls/gmm.hpp"
#include "uls/maxflow.hpp"
#include "uls/normalize.hpp"
#include "uls/rng.hpp"

namespace uls {

SeedMap build_seeds(const RecistMeasurement& m, int width, int height, const SeedParams& params) {
  if (params.bbox_dilation_frac < 0)
    throw std::invalid_argument("build_seeds: bbox_dilation_frac must be >= 0");

  const Mask2D ellipse = fit_ellipse(m, width, height);
  const int dilate_px = params.ellipse_dilate_px > 0
                            ? params.ellipse_dilate_px
                            : std::max(2, int(std::lround(0.10 * m.long_len_px())));
  const int erode_px = params.ellipse_erode_px > 0
                           ? params.ellipse_erode_px
                           : std::max(1, int(std::lround(0.20 * m.short_len_px())));

  const Mask2D dilated = morph(ellipse, MorphOp::Dilate, dilate_px, Conn2D::Four);
  Mask2D eroded = morph(ellipse, MorphOp::Erode, erode_px, Conn2D::Four);
  if (count_foreground(eroded) == 0) {
    // GrabCut needs at least one hard foreground pixel.
    const int cx = std::clamp(int(std::lround((m.long_x1 + m.long_x2) / 2.0)), 0, width - 1);
    const int cy = std::clamp(int(std::lround((m.long_y1 + m.long_y2) / 2.0)), 0, height - 1);
    eroded.at(cx, cy) = 1;
  }

  const Rect2D box = fit_bbox(m, params.bbox_dilation_frac, width, height);
  SeedMap seeds(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      SeedLabel l;
      if (!box.contains(double(x), double(y)))
        l = SeedLabel::BG;
      else if (eroded.at(x, y))
        l = SeedLabel::FG;
      else if (dilated.at(x, y))
        l = SeedLabel::PFG;
      else
        l = SeedLabel::PBG;
      seeds.at(x, y) = l;
    }
  return seeds;
}

namespace {

struct NeighborOffset {
  int dx, dy;
  double dist;
};

constexpr NeighborOffset kNeighbors[4] = {
    {1, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.4142135623730951}, {1, -1, 1.4142135623730951}};

double compute_beta(const Grid2D<double>& img) {
  double sum = 0;
  std::size_t count = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (const auto& nb : kNeighbors) {
        const int qx = x + nb.dx, qy = y + nb.dy;
        if (!img.in_bounds(qx, qy)) continue;
        const double d = img.at(x, y) - img.at(qx, qy);
        sum += d * d;
        ++count;
      }
  if (count == 0) return 0.0;
  const double mean = sum / double(count);
  return mean > 1e-12 ? 1.0 / (2.0 * mean) : 0.0;
}

std::vector<double> region_samples(const Grid2D<double>& img, const std::vector<std::uint8_t>& fg,
                                   bool want_fg, std::size_t cap) {
  std::vector<double> out;
  for (std::size_t i = 0; i < img.data.size(); ++i)
    if ((fg[i] != 0) == want_fg) out.push_back(img.data[i]);
  if (out.size() > cap) {
    // Deterministic stride subsample.
    std::vector<double> sub;
    sub.reserve(cap);
    const double step = double(out.size()) / double(cap);
    for (std::size_t i = 0; i < cap; ++i) sub.push_back(out[std::size_t(double(i) * step)]);
    out = std::move(sub);
  }
  return out;
}

double clamped_neg_log(const Gmm& g, double x) {
  return std::min(500.0, -g.log_pdf(x));
}

}  // namespace

GrabcutResult grabcut(const Grid2D<double>& image, const SeedMap& seeds, const GrabcutParams& params) {
  if (image.width != seeds.width || image.height != seeds.height)
    throw std::invalid_argument("grabcut: image and seed map dims differ");
  if (params.iterations < 1 || params.gmm_components < 1)
    throw std::invalid_argument("grabcut: iterations and gmm_components must be >= 1");

  const std::size_t n = image.data.size();
  GrabcutResult out;

  std::size_t n_regions_present = 0;
  std::size_t region_counts[4] = {0, 0, 0, 0};
  for (auto l : seeds.labels) ++region_counts[std::size_t(l)];
  for (auto c : region_counts) n_regions_present += (c > 0);
  const std::size_t n_uncertain =
      region_counts[std::size_t(SeedLabel::PFG)] + region_counts[std::size_t(SeedLabel::PBG)];
  const std::size_t n_fg_init = region_counts[std::size_t(SeedLabel::FG)] +
                                region_counts[std::size_t(SeedLabel::PFG)];
  const std::size_t n_bg_init = region_counts[std::size_t(SeedLabel::BG)] +
                                region_counts[std::size_t(SeedLabel::PBG)];

  if (n_regions_present < 2 || n_uncertain == 0 || n_fg_init == 0 || n_bg_init == 0) {
    out.degenerate_seeds = true;
    out.mask = Mask2D(image.width, image.height);
    for (std::size_t i = 0; i < n; ++i)
      out.mask.data[i] = (seeds.labels[i] == SeedLabel::FG) ? 1 : 0;
    return out;
  }

  const double beta = compute_beta(image);
  const double gamma = params.gamma;

  // Current side per pixel: 1 = FG. Hard seeds never change.
  std::vector<std::uint8_t> fg(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    fg[i] = (seeds.labels[i] == SeedLabel::FG || seeds.labels[i] == SeedLabel::PFG) ? 1 : 0;

  // Graph nodes: uncertain pixels only; hard neighbors fold into t-links.
  std::vector<std::int32_t> node_of(n, -1);
  std::vector<std::size_t> pixel_of;
  pixel_of.reserve(n_uncertain);
  for (std::size_t i = 0; i < n; ++i) {
    const SeedLabel l = seeds.labels[i];
    if (l == SeedLabel::PFG || l == SeedLabel::PBG) {
      node_of[i] = std::int32_t(pixel_of.size());
      pixel_of.push_back(i);
    }
  }

  auto nlink_weight = [&](std::size_t p, std::size_t q, double dist) {
    const double d = image.data[p] - image.data[q];
    return gamma * std::exp(-beta * d * d) / dist;
  };

  auto energy_of = [&](const std::vector<std::uint8_t>& labeling, const Gmm& fg_model,
                       const Gmm& bg_model) {
    double e = 0;
    for (std::size_t pi : pixel_of) {
      const double x = image.data[pi];
      e += labeling[pi] ? clamped_neg_log(fg_model, x) : clamped_neg_log(bg_model, x);
    }
    for (int y = 0; y < image.height; ++y)
      for (int x = 0; x < image.width; ++x) {
        const std::size_t p = image.index(x, y);
        for (const auto& nb : kNeighbors) {
          const int qx = x + nb.dx, qy = y + nb.dy;
          if (!image.in_bounds(qx, qy)) continue;
          const std::size_t q = image.index(qx, qy);
          if (node_of[p] < 0 && node_of[q] < 0) continue;  // both hard: constant
          if (labeling[p] != labeling[q]) e += nlink_weight(p, q, nb.dist);
        }
      }
    return e;
  };

  for (int iter = 0; iter < params.iterations; ++iter) {
    const auto fg_samples = region_samples(image, fg, true, params.max_gmm_samples);
    const auto bg_samples = region_samples(image, fg, false, params.max_gmm_samples);
    const int k_fg = int(std::min<std::size_t>(std::size_t(params.gmm_components), fg_samples.size()));
    const int k_bg = int(std::min<std::size_t>(std::size_t(params.gmm_components), bg_samples.size()));
    const Gmm fg_model = fit_gmm(fg_samples, k_fg, derive_seed(params.seed, std::uint64_t(2 * iter)),
                                 params.variance_floor);
    const Gmm bg_model = fit_gmm(bg_samples, k_bg, derive_seed(params.seed, std::uint64_t(2 * iter + 1)),
                                 params.variance_floor);

    const double energy_before = energy_of(fg, fg_model, bg_model);

    CutGraph g(int(pixel_of.size()));
    for (std::size_t ni = 0; ni < pixel_of.size(); ++ni) {
      const std::size_t pi = pixel_of[ni];
      const double x = image.data[pi];
      double d_fg = clamped_neg_log(fg_model, x);   // cost of labeling FG
      double d_bg = clamped_neg_log(bg_model, x);   // cost of labeling BG
      // Shift both t-links so capacities stay non-negative; per-pixel shifts
      // add a constant to every cut and leave the argmin unchanged.
      const double shift = std::min(d_fg, d_bg);
      g.source_cap[ni] = d_bg - shift;
      g.sink_cap[ni] = d_fg - shift;
    }
    for (int y = 0; y < image.height; ++y)
      for (int x = 0; x < image.width; ++x) {
        const std::size_t p = image.index(x, y);
        for (const auto& nb : kNeighbors) {
          const int qx = x + nb.dx, qy = y + nb.dy;
          if (!image.in_bounds(qx, qy)) continue;
          const std::size_t q = image.index(qx, qy);
          const std::int32_t np = node_of[p], nq = node_of[q];
          if (np < 0 && nq < 0) continue;
          const double w = nlink_weight(p, q, nb.dist);
          if (np >= 0 && nq >= 0) {
            g.add_nlink(np, nq, w);
          } else if (np >= 0) {
            // Fixed neighbor acts as an extra t-link.
            if (fg[q])
              g.source_cap[std::size_t(np)] += w;
            else
              g.sink_cap[std::size_t(np)] += w;
          } else {
            if (fg[p])
              g.source_cap[std::size_t(nq)] += w;
            else
              g.sink_cap[std::size_t(nq)] += w;
          }
        }
      }

    const MaxflowResult cut = maxflow(g);
    for (std::size_t ni = 0; ni < pixel_of.size(); ++ni)
      fg[pixel_of[ni]] = cut.source_side[ni];

    const double energy_after = energy_of(fg, fg_model, bg_model);
    out.step_energy.emplace_back(energy_before, energy_after);
  }

  out.mask = Mask2D(image.width, image.height);
  for (std::size_t i = 0; i < n; ++i) out.mask.data[i] = fg[i];
  return out;
}

PseudoMaskResult generate_pseudomask(const Grid2D<float>& hu_slice, const RecistMeasurement& m,
                                     const PseudoMaskParams& params) {
  m.validate();
  const int w = hu_slice.width, h = hu_slice.height;

  const Mask2D ellipse = fit_ellipse(m, w, h);
  double ellipse_mean = 0;
  {
    double sum = 0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < ellipse.data.size(); ++i)
      if (ellipse.data[i]) {
        sum += double(hu_slice.data[i]);
        ++cnt;
      }
    ellipse_mean = cnt ? sum / double(cnt) : 0.0;
  }

  struct Window {
    double level, width;
  };
  std::vector<Window> windows;
  if (m.window_level && m.window_width && *m.window_width > 0)
    windows.push_back({*m.window_level, *m.window_width});
  for (double hw : params.ellipse_mean_half_widths) windows.push_back({ellipse_mean, 2.0 * hw});

  const SeedMap seeds = build_seeds(m, w, h, params.seeds);

  PseudoMaskResult out;
  std::vector<Mask2D> masks;
  for (std::size_t wi = 0; wi < windows.size(); ++wi) {
    const auto norm = normalize_window(hu_slice, windows[wi].level, windows[wi].width);
    GrabcutParams gp = params.grabcut;
    gp.seed = derive_seed(params.grabcut.seed, std::uint64_t(wi));
    const GrabcutResult res = grabcut(norm, seeds, gp);
    PseudoMaskCandidate cand;
    cand.source = "grabcut_run_" + std::to_string(wi);
    cand.window_level = windows[wi].level;
    cand.window_width = windows[wi].width;
    out.candidates.push_back(std::move(cand));
    masks.push_back(res.mask);
  }
  {
    PseudoMaskCandidate cand;
    cand.source = "ellipse_fallback";
    out.candidates.push_back(std::move(cand));
    masks.push_back(ellipse);
  }

  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t ci = 0; ci < masks.size(); ++ci) {
    auto& cand = out.candidates[ci];
    if (count_foreground(masks[ci]) == 0) {
      cand.long_err_px = std::numeric_limits<double>::infinity();
      cand.short_err_px = std::numeric_limits<double>::infinity();
    } else {
      const auto [long_mm, short_mm] = mask_axes_2d(masks[ci], m.spacing_x, m.spacing_y);
      const auto [le, se] = axis_error_px(AxisPair{long_mm, short_mm, m.slice_index}, m);
      cand.long_err_px = le;
      cand.short_err_px = se;
    }
    const double score = cand.long_err_px + cand.short_err_px;
    if (score < best_score) {
      best_score = score;
      out.chosen_index = int(ci);
    }
  }

  out.chosen = masks[std::size_t(out.chosen_index)];
  out.rationale = out.candidates[std::size_t(out.chosen_index)].source;
  out.chosen_long_err_px = out.candidates[std::size_t(out.chosen_index)].long_err_px;
  out.chosen_short_err_px = out.candidates[std::size_t(out.chosen_index)].short_err_px;
  return out;
}

std::vector<std::size_t> filter_pseudomasks(std::span<const PseudoMaskResult> results, double tol_px) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < results.size(); ++i)
    if (results[i].chosen_long_err_px <= tol_px && results[i].chosen_short_err_px <= tol_px)
      kept.push_back(i);
  return kept;
}

}  // namespace uls
