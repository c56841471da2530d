#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "uls/components.hpp"
#include "uls/recist.hpp"

using namespace uls;

namespace {

RecistMeasurement axis_aligned(double cx, double cy, double half_long, double half_short) {
  RecistMeasurement m;
  m.long_x1 = cx - half_long;
  m.long_y1 = cy;
  m.long_x2 = cx + half_long;
  m.long_y2 = cy;
  m.short_x1 = cx;
  m.short_y1 = cy - half_short;
  m.short_x2 = cx;
  m.short_y2 = cy + half_short;
  return m;
}

/// All-pairs diameter over every foreground pixel of the largest component,
/// with the same first-maximal-pair convention as the library.
std::pair<double, double> brute_axes(const Mask2D& mask, double sx, double sy) {
  const auto cl = label_components(mask, Conn2D::Eight);
  REQUIRE(cl.count > 0);
  std::vector<std::size_t> sizes(std::size_t(cl.count) + 1, 0);
  for (auto l : cl.labels) ++sizes[std::size_t(l)];
  sizes[0] = 0;
  int best_label = 1;
  for (int l = 2; l <= cl.count; ++l)
    if (sizes[std::size_t(l)] > sizes[std::size_t(best_label)]) best_label = l;

  std::vector<std::pair<int, int>> pts;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (cl.labels[mask.index(x, y)] == best_label) pts.emplace_back(x, y);

  double best = 0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = (pts[j].first - pts[i].first) * sx;
      const double dy = (pts[j].second - pts[i].second) * sy;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (d > best) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  if (best == 0) return {0.0, 0.0};
  const double ux = (pts[bj].first - pts[bi].first) * sx / best;
  const double uy = (pts[bj].second - pts[bi].second) * sy / best;
  double lo = 1e300, hi = -1e300;
  for (const auto& [px, py] : pts) {
    const double proj = -double(px) * sx * uy + double(py) * sy * ux;
    lo = std::min(lo, proj);
    hi = std::max(hi, proj);
  }
  return {best, hi - lo};
}

}  // namespace

TEST_CASE("fit_ellipse rasterizes an axis-aligned ellipse") {
  const RecistMeasurement m = axis_aligned(20, 20, 10, 5);
  const Mask2D e = fit_ellipse(m, 64, 64);
  CHECK(e.at(20, 20));
  CHECK(e.at(30, 20));      // on the boundary, inclusive
  CHECK_FALSE(e.at(31, 20));
  CHECK(e.at(20, 25));
  CHECK_FALSE(e.at(20, 26));
  CHECK_FALSE(e.at(28, 24));  // outside: (8/10)^2 + (4/5)^2 = 1.28
}

TEST_CASE("fit_ellipse of a circle measures back to its diameter") {
  const RecistMeasurement m = axis_aligned(32, 32, 8, 8);
  const Mask2D disk = fit_ellipse(m, 64, 64);
  const auto [long_mm, short_mm] = mask_axes_2d(disk, 1.0, 1.0);
  CHECK(std::abs(long_mm - 16.0) <= 1.0);
  CHECK(std::abs(short_mm - 16.0) <= 1.0);
}

TEST_CASE("fit_ellipse handles rotated measurements consistently") {
  RecistMeasurement m;
  // 45-degree long axis of length 20, short of length 10.
  const double s = 10.0 / std::sqrt(2.0);
  m.long_x1 = 32 - s;
  m.long_y1 = 32 - s;
  m.long_x2 = 32 + s;
  m.long_y2 = 32 + s;
  const double t = 5.0 / std::sqrt(2.0);
  m.short_x1 = 32 + t;
  m.short_y1 = 32 - t;
  m.short_x2 = 32 - t;
  m.short_y2 = 32 + t;
  const Mask2D e = fit_ellipse(m, 64, 64);
  const auto [long_mm, short_mm] = mask_axes_2d(e, 1.0, 1.0);
  CHECK(std::abs(long_mm - 20.0) <= 1.0);
  CHECK(std::abs(short_mm - 10.0) <= 1.0);
}

TEST_CASE("fit_ellipse rejects degenerate measurements") {
  RecistMeasurement m = axis_aligned(10, 10, 0, 0);
  CHECK_THROWS_AS(fit_ellipse(m, 32, 32), std::invalid_argument);
}

TEST_CASE("fit_bbox expands per side by the dilation fraction") {
  RecistMeasurement m;
  m.long_x1 = 10;
  m.long_y1 = 20;
  m.long_x2 = 30;
  m.long_y2 = 40;
  m.short_x1 = 15;
  m.short_y1 = 25;
  m.short_x2 = 25;
  m.short_y2 = 35;
  const Rect2D tight = fit_bbox(m, 0.0, 100, 100);
  CHECK(tight.x_min == 10);
  CHECK(tight.x_max == 30);
  CHECK(tight.y_min == 20);
  CHECK(tight.y_max == 40);

  const Rect2D fat = fit_bbox(m, 0.2, 100, 100);
  CHECK(fat.x_min == doctest::Approx(6));
  CHECK(fat.x_max == doctest::Approx(34));
  CHECK(fat.y_min == doctest::Approx(16));
  CHECK(fat.y_max == doctest::Approx(44));

  const Rect2D clipped = fit_bbox(m, 5.0, 40, 41);
  CHECK(clipped.x_min == 0);
  CHECK(clipped.x_max == 39);
  CHECK(clipped.y_min == 0);
  CHECK(clipped.y_max == 40);
}

TEST_CASE("mask_axes_2d handles degenerate shapes") {
  Mask2D single(8, 8);
  single.at(4, 4) = 1;
  CHECK(mask_axes_2d(single, 1, 1) == std::pair{0.0, 0.0});

  Mask2D row(8, 8);
  for (int x = 1; x <= 5; ++x) row.at(x, 3) = 1;
  const auto [long_mm, short_mm] = mask_axes_2d(row, 1, 1);
  CHECK(long_mm == doctest::Approx(4.0));
  CHECK(short_mm == doctest::Approx(0.0));

  Mask2D empty(4, 4);
  CHECK_THROWS_AS(mask_axes_2d(empty, 1, 1), std::invalid_argument);
}

TEST_CASE("mask_axes_2d measures a rasterized disk to its diameter") {
  Mask2D disk(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if ((x - 30) * (x - 30) + (y - 30) * (y - 30) <= 100) disk.at(x, y) = 1;
  const auto [long_mm, short_mm] = mask_axes_2d(disk, 0.5, 0.5);
  CHECK(std::abs(long_mm - 10.0) <= 0.5);
  CHECK(std::abs(short_mm - 10.0) <= 0.5);
}

TEST_CASE("mask_axes_2d equals the all-pairs brute force on random masks") {
  SplitMix64 rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 3 + int(rng.below(14));
    const int h = 3 + int(rng.below(14));
    Mask2D m = test::random_mask_2d(w, h, 0.3, rng);
    if (count_foreground(m) == 0) m.at(int(rng.below(std::uint64_t(w))), int(rng.below(std::uint64_t(h)))) = 1;
    const double sx = 0.5 + rng.next_double();
    const double sy = 0.5 + rng.next_double();
    const auto lib = mask_axes_2d(m, sx, sy);
    const auto ref = brute_axes(m, sx, sy);
    CHECK(lib.first == ref.first);
    CHECK(lib.second == doctest::Approx(ref.second).epsilon(1e-12));
    CHECK(lib.first >= lib.second);
  }
}

TEST_CASE("mask_axes_2d is consistent under 90-degree rotation") {
  const RecistMeasurement m = axis_aligned(24, 20, 9, 4);
  const Mask2D e = fit_ellipse(m, 48, 48);
  Mask2D rot(48, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x)
      if (e.at(x, y)) rot.at(47 - y, x) = 1;
  const auto a = mask_axes_2d(e, 1, 1);
  const auto b = mask_axes_2d(rot, 1, 1);
  CHECK(std::abs(a.first - b.first) <= 1.0);
  CHECK(std::abs(a.second - b.second) <= 1.0);
}

TEST_CASE("mask_axes_3d picks the slice with the maximal long axis") {
  // Axis-aligned 5x3x7 box, spacing (1,1,2): every slice measures the same.
  BinaryMask box({12, 12, 12}, {1, 1, 2});
  for (int z = 2; z < 9; ++z)
    for (int y = 4; y < 7; ++y)
      for (int x = 3; x < 8; ++x) box.at(x, y, z) = 1;
  const AxisPair p = mask_axes_3d(box);
  CHECK(p.long_mm == doctest::Approx(std::sqrt(16.0 + 4.0)));
  CHECK(p.slice_index == 2);  // ties resolve to the lowest slice

  // Two stacked disks: radius 5 at z=3, radius 9 at z=7.
  BinaryMask disks({32, 32, 12}, {1, 1, 1});
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x) {
      if ((x - 16) * (x - 16) + (y - 16) * (y - 16) <= 25) disks.at(x, y, 3) = 1;
      if ((x - 16) * (x - 16) + (y - 16) * (y - 16) <= 81) disks.at(x, y, 7) = 1;
    }
  CHECK(mask_axes_3d(disks).slice_index == 7);

  BinaryMask empty({4, 4, 4}, {1, 1, 1});
  CHECK_THROWS_AS(mask_axes_3d(empty), std::invalid_argument);
}

TEST_CASE("mask_axes_3d of a sphere measures the equatorial diameter") {
  const auto p = test::make_sphere_scan({40, 40, 40}, {1, 1, 1}, {20, 20, 20}, 8.0);
  const AxisPair a = mask_axes_3d(p.mask);
  CHECK(std::abs(a.long_mm - 16.0) <= 1.0);
  CHECK(std::abs(a.short_mm - 16.0) <= 1.0);
  CHECK(a.slice_index == 20);
}

TEST_CASE("axis_error_px converts mm differences to pixels") {
  RecistMeasurement ref = axis_aligned(32, 32, 12.5, 5.0);
  ref.spacing_x = 0.8;
  ref.spacing_y = 0.8;
  // Reference long = 25 px * 0.8 = 20 mm.
  const AxisPair pred{22.0, 8.0 * 0.8, 0};
  const auto [le, se] = axis_error_px(pred, ref);
  CHECK(le == doctest::Approx(2.5));
  CHECK(se == doctest::Approx(2.0));

  const AxisPair same{ref.long_len_mm(), ref.short_len_mm(), 0};
  const auto [le0, se0] = axis_error_px(same, ref);
  CHECK(le0 == 0.0);
  CHECK(se0 == 0.0);
}

TEST_CASE("measurement validation enforces the axis ordering invariant") {
  RecistMeasurement bad = axis_aligned(10, 10, 3, 6);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  RecistMeasurement ok = axis_aligned(10, 10, 6, 3);
  CHECK_NOTHROW(ok.validate());
}
