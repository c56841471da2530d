#include "uls/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uls {

namespace {

constexpr double kEps = 1e-11;

struct Dinic {
  struct Arc {
    int to;
    double cap;
  };
  std::vector<Arc> arcs;                // paired: arc i and i^1 are reverses
  std::vector<std::vector<int>> adj;    // arc indices per node
  std::vector<int> level, iter;
  int n;

  explicit Dinic(int nodes) : adj(std::size_t(nodes)), n(nodes) {}

  void add_edge(int from, int to, double cap_fwd, double cap_bwd) {
    adj[std::size_t(from)].push_back(int(arcs.size()));
    arcs.push_back({to, cap_fwd});
    adj[std::size_t(to)].push_back(int(arcs.size()));
    arcs.push_back({from, cap_bwd});
  }

  bool bfs(int s, int t) {
    level.assign(std::size_t(n), -1);
    std::vector<int> queue{s};
    level[std::size_t(s)] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int u = queue[qi];
      for (int ai : adj[std::size_t(u)]) {
        const auto& a = arcs[std::size_t(ai)];
        if (a.cap > kEps && level[std::size_t(a.to)] < 0) {
          level[std::size_t(a.to)] = level[std::size_t(u)] + 1;
          queue.push_back(a.to);
        }
      }
    }
    return level[std::size_t(t)] >= 0;
  }

  double dfs(int u, int t, double f) {
    if (u == t) return f;
    for (int& i = iter[std::size_t(u)]; i < int(adj[std::size_t(u)].size()); ++i) {
      const int ai = adj[std::size_t(u)][std::size_t(i)];
      auto& a = arcs[std::size_t(ai)];
      if (a.cap > kEps && level[std::size_t(a.to)] == level[std::size_t(u)] + 1) {
        const double d = dfs(a.to, t, std::min(f, a.cap));
        if (d > 0) {
          a.cap -= d;
          arcs[std::size_t(ai ^ 1)].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  double run(int s, int t) {
    double flow = 0;
    while (bfs(s, t)) {
      iter.assign(std::size_t(n), 0);
      for (;;) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= 0) break;
        flow += f;
      }
    }
    return flow;
  }
};

}  // namespace

MaxflowResult maxflow(const CutGraph& g) {
  for (double c : g.source_cap)
    if (!(c >= 0) || std::isnan(c)) throw std::invalid_argument("maxflow: negative or NaN capacity");
  for (double c : g.sink_cap)
    if (!(c >= 0) || std::isnan(c)) throw std::invalid_argument("maxflow: negative or NaN capacity");
  for (const auto& l : g.nlinks) {
    if (l.a < 0 || l.a >= g.n_pixels || l.b < 0 || l.b >= g.n_pixels || l.a == l.b)
      throw std::invalid_argument("maxflow: n-link endpoints out of range");
    if (!(l.cap >= 0) || std::isnan(l.cap)) throw std::invalid_argument("maxflow: negative or NaN capacity");
  }

  const int s = g.n_pixels, t = g.n_pixels + 1;
  Dinic d(g.n_pixels + 2);
  for (int i = 0; i < g.n_pixels; ++i) {
    if (g.source_cap[std::size_t(i)] > 0) d.add_edge(s, i, g.source_cap[std::size_t(i)], 0.0);
    if (g.sink_cap[std::size_t(i)] > 0) d.add_edge(i, t, g.sink_cap[std::size_t(i)], 0.0);
  }
  for (const auto& l : g.nlinks)
    if (l.cap > 0) d.add_edge(l.a, l.b, l.cap, l.cap);

  MaxflowResult out;
  out.flow = d.run(s, t);

  // Source side = reachable from s in the residual graph.
  std::vector<std::uint8_t> reach(std::size_t(g.n_pixels) + 2, 0);
  std::vector<int> stack{s};
  reach[std::size_t(s)] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int ai : d.adj[std::size_t(u)]) {
      const auto& a = d.arcs[std::size_t(ai)];
      if (a.cap > kEps && !reach[std::size_t(a.to)]) {
        reach[std::size_t(a.to)] = 1;
        stack.push_back(a.to);
      }
    }
  }
  out.source_side.assign(std::size_t(g.n_pixels), 0);
  for (int i = 0; i < g.n_pixels; ++i) out.source_side[std::size_t(i)] = reach[std::size_t(i)];
  return out;
}

}  // namespace uls
