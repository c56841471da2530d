#include <doctest.h>

#include "helpers.hpp"
#include "uls/grabcut.hpp"

using namespace uls;

namespace {

double dice2d(const Mask2D& a, const Mask2D& b) {
  std::size_t na = 0, nb = 0, inter = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    na += a.data[i] != 0;
    nb += b.data[i] != 0;
    inter += (a.data[i] && b.data[i]);
  }
  return (na + nb) ? 2.0 * double(inter) / double(na + nb) : 1.0;
}

PseudoMaskResult fake_result(double le, double se) {
  PseudoMaskResult r;
  r.chosen_long_err_px = le;
  r.chosen_short_err_px = se;
  r.chosen_index = 0;
  r.rationale = "grabcut_run_0";
  return r;
}

}  // namespace

TEST_CASE("generate_pseudomask produces one candidate per window plus the ellipse") {
  const auto p = test::make_disk_slice(96, 96, 48, 48, 14);
  const PseudoMaskResult with_meta = generate_pseudomask(p.slice, p.measurement);
  CHECK(with_meta.candidates.size() == 4);  // metadata window + two mean windows + ellipse
  CHECK(with_meta.candidates.back().source == "ellipse_fallback");

  auto no_meta = p.measurement;
  no_meta.window_level.reset();
  no_meta.window_width.reset();
  const PseudoMaskResult without = generate_pseudomask(p.slice, no_meta);
  CHECK(without.candidates.size() == 3);
}

TEST_CASE("generate_pseudomask lets a grabcut run win on an easy phantom") {
  const auto p = test::make_disk_slice(96, 96, 48, 48, 16, 200.0f, 20.0f);
  const PseudoMaskResult r = generate_pseudomask(p.slice, p.measurement);
  CHECK(r.rationale.substr(0, 7) == "grabcut");
  CHECK(r.chosen_long_err_px + r.chosen_short_err_px <= 2.0);
  CHECK(dice2d(r.chosen, p.truth) >= 0.97);
}

TEST_CASE("generate_pseudomask falls back to the ellipse on uninformative slices") {
  auto p = test::make_disk_slice(96, 96, 48, 48, 14, 100.0f, 100.0f);  // constant intensity
  const PseudoMaskResult r = generate_pseudomask(p.slice, p.measurement);
  CHECK(r.rationale == "ellipse_fallback");
  CHECK(r.chosen_long_err_px <= 1.0);
  CHECK(r.chosen_short_err_px <= 1.0);
}

TEST_CASE("generate_pseudomask picks the lowest summed axis error") {
  const auto p = test::make_disk_slice(96, 96, 48, 48, 13, 200.0f, 20.0f, 10.0, 21);
  const PseudoMaskResult r = generate_pseudomask(p.slice, p.measurement);
  const double chosen = r.chosen_long_err_px + r.chosen_short_err_px;
  for (const auto& c : r.candidates) CHECK(chosen <= c.long_err_px + c.short_err_px);
}

TEST_CASE("generate_pseudomask is deterministic") {
  const auto p = test::make_disk_slice(80, 80, 40, 40, 12, 190.0f, 30.0f, 9.0, 4);
  PseudoMaskParams params;
  params.grabcut.seed = 8;
  const PseudoMaskResult a = generate_pseudomask(p.slice, p.measurement, params);
  const PseudoMaskResult b = generate_pseudomask(p.slice, p.measurement, params);
  CHECK(a.chosen.data == b.chosen.data);
  CHECK(a.chosen_index == b.chosen_index);
  REQUIRE(a.candidates.size() == b.candidates.size());
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    CHECK(a.candidates[i].long_err_px == b.candidates[i].long_err_px);
    CHECK(a.candidates[i].short_err_px == b.candidates[i].short_err_px);
  }
}

TEST_CASE("filter_pseudomasks keeps the inclusive 5 px boundary") {
  std::vector<PseudoMaskResult> ledger;
  ledger.push_back(fake_result(0.0, 0.0));
  ledger.push_back(fake_result(4.99, 2.0));
  ledger.push_back(fake_result(5.0, 5.0));
  ledger.push_back(fake_result(5.01, 0.0));
  ledger.push_back(fake_result(0.0, 12.0));
  const auto kept = filter_pseudomasks(ledger, 5.0);
  CHECK(kept == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("filter_pseudomasks of an empty list is empty") {
  CHECK(filter_pseudomasks({}, 5.0).empty());
}
