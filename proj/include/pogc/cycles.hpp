#pragma once

// Elementary circuit enumeration (Johnson 1975) over a directed multigraph.
// Each circuit is reported as the sequence of edge indices it traverses.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <set>
#include <vector>

namespace pogc::graph {

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
};

struct CycleEnumeration {
  std::vector<std::vector<std::size_t>> cycles;  // edge indices
  bool truncated = false;
};

namespace detail {

// Tarjan SCCs of the subgraph induced by vertices >= lo.
inline std::vector<std::vector<std::size_t>> sccs_from(std::size_t n, const std::vector<std::vector<std::size_t>>& adj,
                                                       std::size_t lo) {
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  int counter = 0;
  std::function<void(std::size_t)> strong = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = true;
    for (std::size_t w : adj[v]) {
      if (w < lo) continue;
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = false;
        comp.push_back(w);
      } while (w != v);
      out.push_back(std::move(comp));
    }
  };
  for (std::size_t v = lo; v < n; ++v)
    if (index[v] < 0) strong(v);
  return out;
}

}  // namespace detail

inline CycleEnumeration elementary_cycles(std::size_t n, const std::vector<Edge>& edges, std::size_t limit = 200000) {
  CycleEnumeration result;
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> out_edges(n);  // (to, edge)
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out_edges[edges[e].from].push_back({edges[e].to, e});
    adj[edges[e].from].push_back(edges[e].to);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  std::vector<bool> blocked(n, false);
  std::vector<std::set<std::size_t>> B(n);
  std::vector<std::size_t> path;
  std::vector<bool> in_comp(n, false);

  auto emit = [&](const std::vector<std::size_t>& verts) {
    // Expand parallel edges between consecutive vertices.
    std::vector<std::vector<std::size_t>> options;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      std::size_t u = verts[i], v = verts[(i + 1) % verts.size()];
      std::vector<std::size_t> opts;
      for (auto [to, e] : out_edges[u])
        if (to == v) opts.push_back(e);
      options.push_back(std::move(opts));
    }
    std::vector<std::size_t> pick(options.size(), 0);
    for (;;) {
      if (result.cycles.size() >= limit) {
        result.truncated = true;
        return;
      }
      std::vector<std::size_t> cyc;
      for (std::size_t i = 0; i < options.size(); ++i) cyc.push_back(options[i][pick[i]]);
      result.cycles.push_back(std::move(cyc));
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == options[k].size()) pick[k++] = 0;
      if (k == pick.size()) return;
    }
  };

  std::function<void(std::size_t)> unblock = [&](std::size_t u) {
    blocked[u] = false;
    auto pending = std::move(B[u]);
    B[u].clear();
    for (std::size_t w : pending)
      if (blocked[w]) unblock(w);
  };

  std::size_t start = 0;
  std::function<bool(std::size_t)> circuit = [&](std::size_t v) -> bool {
    bool found = false;
    path.push_back(v);
    blocked[v] = true;
    for (std::size_t w : adj[v]) {
      if (!in_comp[w] || result.truncated) continue;
      if (w == start) {
        emit(path);
        found = true;
      } else if (!blocked[w]) {
        if (circuit(w)) found = true;
      }
    }
    if (found) {
      unblock(v);
    } else {
      for (std::size_t w : adj[v])
        if (in_comp[w]) B[w].insert(v);
    }
    path.pop_back();
    return found;
  };

  for (std::size_t s = 0; s < n && !result.truncated; ++s) {
    auto comps = detail::sccs_from(n, adj, s);
    const std::vector<std::size_t>* mine = nullptr;
    for (const auto& c : comps)
      if (std::find(c.begin(), c.end(), s) != c.end()) mine = &c;
    if (!mine) continue;
    bool self = std::find(adj[s].begin(), adj[s].end(), s) != adj[s].end();
    if (mine->size() < 2 && !self) continue;
    std::fill(in_comp.begin(), in_comp.end(), false);
    for (std::size_t v : *mine) {
      in_comp[v] = true;
      blocked[v] = false;
      B[v].clear();
    }
    start = s;
    circuit(s);
  }
  return result;
}

}  // namespace pogc::graph
