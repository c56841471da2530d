#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "uls/maxflow.hpp"

using namespace uls;

namespace {

/// Exhaustive min-cut over all 2^n source/sink assignments.
double brute_min_cut(const CutGraph& g) {
  const int n = g.n_pixels;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned assign = 0; assign < (1u << n); ++assign) {
    double cost = 0;
    for (int i = 0; i < n; ++i) {
      const bool src_side = (assign >> i) & 1u;
      cost += src_side ? g.sink_cap[std::size_t(i)] : g.source_cap[std::size_t(i)];
    }
    for (const auto& l : g.nlinks) {
      const bool a = (assign >> l.a) & 1u;
      const bool b = (assign >> l.b) & 1u;
      if (a != b) cost += l.cap;
    }
    best = std::min(best, cost);
  }
  return best;
}

CutGraph random_graph(SplitMix64& rng, int max_nodes, bool with_hard_seeds) {
  const int n = 1 + int(rng.below(std::uint64_t(max_nodes)));
  CutGraph g(n);
  for (int i = 0; i < n; ++i) {
    g.source_cap[std::size_t(i)] = double(rng.below(16));
    g.sink_cap[std::size_t(i)] = double(rng.below(16));
  }
  if (with_hard_seeds && n >= 2) {
    // One hard FG and one hard BG seed, never on the same pixel.
    const int fg = int(rng.below(std::uint64_t(n)));
    int bg = int(rng.below(std::uint64_t(n)));
    if (bg == fg) bg = (bg + 1) % n;
    g.source_cap[std::size_t(fg)] = CutGraph::kHardCap;
    g.sink_cap[std::size_t(fg)] = 0;
    g.sink_cap[std::size_t(bg)] = CutGraph::kHardCap;
    g.source_cap[std::size_t(bg)] = 0;
  }
  const int m = int(rng.below(std::uint64_t(2 * n + 1)));
  for (int e = 0; e < m; ++e) {
    const int a = int(rng.below(std::uint64_t(n)));
    int b = int(rng.below(std::uint64_t(n)));
    if (a == b) continue;
    g.add_nlink(a, b, double(rng.below(12)));
  }
  return g;
}

}  // namespace

TEST_CASE("maxflow resolves two independent pixels by their t-links") {
  CutGraph g(2);
  g.source_cap = {5, 1};
  g.sink_cap = {1, 5};
  const MaxflowResult r = maxflow(g);
  CHECK(r.flow == doctest::Approx(2.0));
  CHECK(r.source_side[0] == 1);
  CHECK(r.source_side[1] == 0);
}

TEST_CASE("maxflow with zero sink capacities keeps everything on the source side") {
  CutGraph g(4);
  for (int i = 0; i < 4; ++i) g.source_cap[std::size_t(i)] = 3.0;
  g.add_nlink(0, 1, 2.0);
  g.add_nlink(2, 3, 1.0);
  const MaxflowResult r = maxflow(g);
  CHECK(r.flow == doctest::Approx(0.0));
  for (int i = 0; i < 4; ++i) CHECK(r.source_side[std::size_t(i)] == 1);
}

TEST_CASE("maxflow equals the exhaustive min-cut on random graphs") {
  SplitMix64 rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    const CutGraph g = random_graph(rng, 10, trial % 3 == 0);
    const double flow = maxflow(g).flow;
    const double cut = brute_min_cut(g);
    CHECK(flow == doctest::Approx(cut).epsilon(1e-12));
  }
}

TEST_CASE("maxflow partition respects hard seeds") {
  SplitMix64 rng(555);
  for (int trial = 0; trial < 50; ++trial) {
    const CutGraph g = random_graph(rng, 8, true);
    const MaxflowResult r = maxflow(g);
    for (int i = 0; i < g.n_pixels; ++i) {
      if (g.source_cap[std::size_t(i)] == CutGraph::kHardCap) CHECK(r.source_side[std::size_t(i)] == 1);
      if (g.sink_cap[std::size_t(i)] == CutGraph::kHardCap) CHECK(r.source_side[std::size_t(i)] == 0);
    }
  }
}

TEST_CASE("maxflow partition cost equals the flow value") {
  // The cut induced by the returned partition must cost exactly the flow.
  SplitMix64 rng(777);
  for (int trial = 0; trial < 100; ++trial) {
    const CutGraph g = random_graph(rng, 9, false);
    const MaxflowResult r = maxflow(g);
    double cost = 0;
    for (int i = 0; i < g.n_pixels; ++i)
      cost += r.source_side[std::size_t(i)] ? g.sink_cap[std::size_t(i)] : g.source_cap[std::size_t(i)];
    for (const auto& l : g.nlinks)
      if (r.source_side[std::size_t(l.a)] != r.source_side[std::size_t(l.b)]) cost += l.cap;
    CHECK(cost == doctest::Approx(r.flow).epsilon(1e-12));
  }
}

TEST_CASE("maxflow rejects malformed graphs") {
  CutGraph g(2);
  g.source_cap[0] = -1.0;
  CHECK_THROWS_AS(maxflow(g), std::invalid_argument);

  CutGraph h(2);
  h.add_nlink(0, 5, 1.0);
  CHECK_THROWS_AS(maxflow(h), std::invalid_argument);
}
