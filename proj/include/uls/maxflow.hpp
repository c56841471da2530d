#pragma once

#include <cstdint>
#include <vector>

namespace uls {

/// s-t cut graph over pixel nodes. T-link capacities attach every pixel to the
/// implicit source and sink; N-links are symmetric pixel-pixel edges. All
/// capacities must be >= 0 and finite except hard seeds, which use kHardCap
/// (a sentinel chosen to exceed any finite capacity sum).
struct CutGraph {
  static constexpr double kHardCap = 1e18;

  int n_pixels = 0;
  std::vector<double> source_cap;  // size n_pixels
  std::vector<double> sink_cap;    // size n_pixels

  struct NLink {
    int a = 0, b = 0;
    double cap = 0;
  };
  std::vector<NLink> nlinks;

  explicit CutGraph(int n = 0) : n_pixels(n), source_cap(std::size_t(n), 0.0), sink_cap(std::size_t(n), 0.0) {}

  void add_nlink(int a, int b, double cap) { nlinks.push_back({a, b, cap}); }
};

struct MaxflowResult {
  double flow = 0;
  std::vector<std::uint8_t> source_side;  // 1 = pixel ends on the source (FG) side
};

/// Exact max-flow / min-cut (Dinic). The partition is the set of nodes
/// reachable from the source in the residual graph.
MaxflowResult maxflow(const CutGraph& g);

}  // namespace uls
