#pragma once

// Chain-of-segments decomposition: each domain segment between two ports is
// reduced to a series-parallel tree, then flattened into a ladder of series
// and parallel (shunt) items.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pogc/error.hpp"
#include "pogc/netlist.hpp"
#include "pogc/sym.hpp"

namespace pogc {

enum class LeafKind { element, source, coupling, open };

struct LeafRef {
  LeafKind kind = LeafKind::open;
  std::size_t index = 0;
  int side = 0;   // coupling port: 0 = port a, 1 = port b
  int sigma = 1;  // +1 when the leaf's own n+ -> n- runs along the edge direction

  bool operator==(const LeafRef& o) const {
    return kind == o.kind && index == o.index && side == o.side && sigma == o.sigma;
  }
};

struct SPNode {
  enum class Kind { leaf, series, parallel };
  Kind kind = Kind::leaf;
  LeafRef leaf;
  std::vector<SPNode> children;
  int id = -1;  // numbering used by the scheme builder

  bool is_leaf() const { return kind == Kind::leaf; }
  static SPNode make_leaf(LeafRef r) {
    SPNode n;
    n.leaf = r;
    return n;
  }
};

enum class Position { series, parallel };

struct ChainItem {
  Position position = Position::series;
  SPNode node;  // a leaf, or a nested composite
  bool nested() const { return !node.is_leaf(); }
};

struct Segment {
  Domain domain = Domain::electrical;
  LeafRef entry;                  // generator or downstream coupling port
  std::optional<LeafRef> exit;    // terminating generator or upstream coupling port
  SPNode tree;                    // reduced tree, oriented entry n+ -> n-
  bool empty_tree = true;
  std::vector<ChainItem> items;
  bool across_upper = true;
  int first_section = 1;
};

// One coupling between consecutive segments. `ratio` is the effective gain seen
// going downstream: through_down = r * through_up (transformer) or
// through_down = r * across_up (gyrator).
struct CouplingLink {
  std::size_t coupling = 0;
  int upstream_side = 0;
  CouplingKind kind = CouplingKind::transformer;
  sym::Poly ratio;
};

struct PowerSection {
  int index = 0;
  std::size_t segment = 0;
  std::string left_block;
  std::string right_block;
  std::string across_var;
  std::string through_var;
};

struct SPChain {
  std::vector<Segment> segments;
  std::vector<CouplingLink> links;  // links[k] joins segments[k] and segments[k+1]
  std::vector<PowerSection> sections;
  std::vector<std::string> notes;
  Netlist net;  // orientation-applied netlist the chain refers to
};

inline std::string leaf_name(const Netlist& net, const LeafRef& r) {
  switch (r.kind) {
    case LeafKind::element: return net.elements[r.index].name;
    case LeafKind::source: return net.sources[r.index].name;
    case LeafKind::coupling: return net.couplings[r.index].name;
    case LeafKind::open: return "open";
  }
  return "";
}

inline void for_each_leaf(const SPNode& n, const std::function<void(const LeafRef&)>& f) {
  if (n.is_leaf()) {
    f(n.leaf);
    return;
  }
  for (const auto& c : n.children) for_each_leaf(c, f);
}

inline std::vector<std::string> element_names(const Netlist& net, const SPNode& n) {
  std::vector<std::string> out;
  for_each_leaf(n, [&](const LeafRef& r) {
    if (r.kind == LeafKind::element) out.push_back(net.elements[r.index].name);
  });
  return out;
}

namespace detail {

inline void reverse_tree(SPNode& n) {
  if (n.is_leaf()) {
    n.leaf.sigma = -n.leaf.sigma;
    return;
  }
  if (n.kind == SPNode::Kind::series) std::reverse(n.children.begin(), n.children.end());
  for (auto& c : n.children) reverse_tree(c);
}

inline SPNode compose(SPNode::Kind kind, SPNode a, SPNode b) {
  SPNode r;
  r.kind = kind;
  for (SPNode* x : {&a, &b}) {
    if (x->kind == kind)
      for (auto& c : x->children) r.children.push_back(std::move(c));
    else
      r.children.push_back(std::move(*x));
  }
  return r;
}

inline std::string sort_key(const Netlist& net, const SPNode& n) {
  std::string best;
  for_each_leaf(n, [&](const LeafRef& r) {
    std::string k = leaf_name(net, r);
    if (best.empty() || k < best) best = k;
  });
  return best;
}

inline void canonicalize(const Netlist& net, SPNode& n) {
  for (auto& c : n.children) canonicalize(net, c);
  if (n.kind == SPNode::Kind::parallel)
    std::stable_sort(n.children.begin(), n.children.end(),
                     [&](const SPNode& a, const SPNode& b) { return sort_key(net, a) < sort_key(net, b); });
}

struct WorkEdge {
  std::string u, v;
  SPNode tree;
  bool alive = true;
};

// Iterative series/parallel edge reduction between two terminals.
inline std::optional<SPNode> reduce_two_terminal(const Netlist& net, std::vector<WorkEdge> edges, const std::string& top,
                                                 const std::string& bottom, Domain dom) {
  auto is_terminal = [&](const std::string& n) { return n == top || n == bottom; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!edges[i].alive) continue;
      for (std::size_t j = i + 1; j < edges.size(); ++j) {
        if (!edges[j].alive) continue;
        auto& a = edges[i];
        auto& b = edges[j];
        bool same = a.u == b.u && a.v == b.v;
        bool flipped = a.u == b.v && a.v == b.u;
        if (!same && !flipped) continue;
        if (flipped) reverse_tree(b.tree);
        a.tree = compose(SPNode::Kind::parallel, std::move(a.tree), std::move(b.tree));
        b.alive = false;
        changed = true;
      }
    }
    std::map<std::string, std::vector<std::size_t>> incident;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!edges[i].alive) continue;
      incident[edges[i].u].push_back(i);
      incident[edges[i].v].push_back(i);
    }
    for (const auto& [node, list] : incident) {
      if (is_terminal(node) || list.size() != 2 || list[0] == list[1]) continue;
      auto& a = edges[list[0]];
      auto& b = edges[list[1]];
      if (!a.alive || !b.alive) continue;
      if (a.u == node) {
        reverse_tree(a.tree);
        std::swap(a.u, a.v);
      }
      if (b.v == node) {
        reverse_tree(b.tree);
        std::swap(b.u, b.v);
      }
      if (a.u == b.v) continue;
      a.tree = compose(SPNode::Kind::series, std::move(a.tree), std::move(b.tree));
      a.v = b.v;
      b.alive = false;
      changed = true;
      break;
    }
  }

  std::vector<std::size_t> left;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].alive) left.push_back(i);
  if (left.empty()) return std::nullopt;
  if (left.size() == 1 && is_terminal(edges[left[0]].u) && is_terminal(edges[left[0]].v) &&
      edges[left[0]].u != edges[left[0]].v) {
    auto& e = edges[left[0]];
    if (e.u != top) reverse_tree(e.tree);
    return std::move(e.tree);
  }

  std::vector<std::string> names;
  std::map<std::string, int> degree;
  for (auto i : left) {
    for (auto& n : element_names(net, edges[i].tree)) names.push_back(n);
    ++degree[edges[i].u];
    ++degree[edges[i].v];
  }
  std::sort(names.begin(), names.end());
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
  for (const auto& [node, d] : degree)
    if (d == 1 && !is_terminal(node))
      throw ModelError(ErrorCode::DisconnectedSegment,
                       std::string("open branch at node '") + node + "' (" + domain_keyword(dom) + ") among " + list,
                       names);
  throw ModelError(ErrorCode::NonSeriesParallel,
                   std::string("segment (") + domain_keyword(dom) + ") does not reduce to series/parallel form: " + list,
                   names);
}

inline bool contains_leaf(const SPNode& n, const LeafRef& target) {
  if (n.is_leaf())
    return n.leaf.kind == target.kind && n.leaf.index == target.index && n.leaf.side == target.side;
  return std::any_of(n.children.begin(), n.children.end(), [&](const SPNode& c) { return contains_leaf(c, target); });
}

// Shunt-view flattening of the reduced tree into ladder items.
inline void flatten(const SPNode& n, const std::optional<LeafRef>& exit, std::vector<ChainItem>& items) {
  auto has_exit = [&](const SPNode& c) { return exit && contains_leaf(c, *exit); };
  if (n.is_leaf()) {
    if (has_exit(n)) return;
    items.push_back({Position::parallel, n});
    return;
  }
  std::size_t cont = n.children.size();
  for (std::size_t i = 0; i < n.children.size(); ++i)
    if (has_exit(n.children[i])) cont = i;

  if (n.kind == SPNode::Kind::parallel) {
    if (cont == n.children.size() && !exit) {
      for (std::size_t i = 0; i < n.children.size(); ++i)
        if (!n.children[i].is_leaf()) cont = i;
    }
    for (std::size_t i = 0; i < n.children.size(); ++i)
      if (i != cont && n.children[i].is_leaf()) items.push_back({Position::parallel, n.children[i]});
    for (std::size_t i = 0; i < n.children.size(); ++i)
      if (i != cont && !n.children[i].is_leaf()) items.push_back({Position::parallel, n.children[i]});
    if (cont < n.children.size()) flatten(n.children[cont], exit, items);
    return;
  }
  if (cont == n.children.size()) cont = n.children.size() - 1;
  for (std::size_t i = 0; i < n.children.size(); ++i)
    if (i != cont) items.push_back({Position::series, n.children[i]});
  flatten(n.children[cont], exit, items);
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace detail

inline SPNode binary_nested(const SPNode& n) {
  if (n.is_leaf()) return n;
  SPNode acc = binary_nested(n.children.back());
  for (std::size_t i = n.children.size() - 1; i-- > 0;) {
    SPNode b;
    b.kind = n.kind;
    b.children.push_back(binary_nested(n.children[i]));
    b.children.push_back(std::move(acc));
    acc = std::move(b);
  }
  return acc;
}

// Right-nested binary ladder: series(c, rest) / parallel(c, rest); the
// innermost rest is the exit port or an open termination.
inline SPNode ladder_tree(const Segment& seg) {
  SPNode rest = SPNode::make_leaf(seg.exit ? *seg.exit : LeafRef{});
  for (std::size_t i = seg.items.size(); i-- > 0;) {
    SPNode b;
    b.kind = seg.items[i].position == Position::series ? SPNode::Kind::series : SPNode::Kind::parallel;
    b.children.push_back(binary_nested(seg.items[i].node));
    b.children.push_back(std::move(rest));
    rest = std::move(b);
  }
  return rest;
}

inline SPChain build_sp_chain(const Netlist& raw) {
  SPChain chain;
  chain.net = apply_orientations(raw);
  const Netlist& net = chain.net;

  // Node ids over (domain, name); the reference node of each domain is kept apart.
  std::map<std::pair<Domain, std::string>, std::size_t> ids;
  auto id_of = [&](Domain d, const std::string& n) {
    auto key = std::make_pair(d, n);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    std::size_t id = ids.size();
    ids.emplace(key, id);
    return id;
  };
  struct Terminal {
    LeafRef ref;
    Domain domain;
    std::string plus, minus;
  };
  std::vector<Terminal> terms;
  for (std::size_t i = 0; i < net.elements.size(); ++i) {
    const auto& e = net.elements[i];
    terms.push_back({{LeafKind::element, i, 0, 1}, e.domain, e.node_plus, e.node_minus});
  }
  for (std::size_t i = 0; i < net.sources.size(); ++i) {
    const auto& s = net.sources[i];
    terms.push_back({{LeafKind::source, i, 0, 1}, s.domain, s.node_plus, s.node_minus});
  }
  for (std::size_t i = 0; i < net.couplings.size(); ++i) {
    const auto& c = net.couplings[i];
    terms.push_back({{LeafKind::coupling, i, 0, 1}, c.port_a.domain, c.port_a.node_plus, c.port_a.node_minus});
    terms.push_back({{LeafKind::coupling, i, 1, 1}, c.port_b.domain, c.port_b.node_plus, c.port_b.node_minus});
  }
  for (const auto& t : terms) {
    id_of(t.domain, t.plus);
    id_of(t.domain, t.minus);
  }
  detail::UnionFind uf(ids.size());
  for (const auto& t : terms) {
    if (t.plus == kReferenceNode || t.minus == kReferenceNode) continue;
    uf.unite(id_of(t.domain, t.plus), id_of(t.domain, t.minus));
  }
  auto component = [&](const Terminal& t) {
    if (t.plus == kReferenceNode && t.minus == kReferenceNode)
      throw ModelError(ErrorCode::DisconnectedSegment, "'" + leaf_name(net, t.ref) + "' connects reference to reference",
                       {leaf_name(net, t.ref)});
    const std::string& n = t.plus == kReferenceNode ? t.minus : t.plus;
    return uf.find(id_of(t.domain, n));
  };
  std::map<std::size_t, std::vector<std::size_t>> members;  // component -> terminal indices
  for (std::size_t i = 0; i < terms.size(); ++i) members[component(terms[i])].push_back(i);

  if (net.sources.empty()) {
    if (!net.elements.empty())
      throw ModelError(ErrorCode::DisconnectedSegment, "no generator drives the network", element_names(net, SPNode{}));
    return chain;
  }

  // Input generator: across sources first, then by name, so line order is irrelevant.
  std::size_t input = 0;
  for (std::size_t i = 1; i < net.sources.size(); ++i) {
    const auto& a = net.sources[i];
    const auto& b = net.sources[input];
    if (std::make_pair(!a.across, a.name) < std::make_pair(!b.across, b.name)) input = i;
  }

  auto is_port = [](const LeafRef& r) { return r.kind != LeafKind::element; };
  std::set<std::size_t> visited;
  std::size_t term_index = net.elements.size() + input;
  int section = 1;
  bool across_upper = true;
  bool first = true;
  for (;;) {
    const Terminal& entry = terms[term_index];
    std::size_t comp = component(entry);
    if (!visited.insert(comp).second)
      throw ModelError(ErrorCode::MultiPortSegment, "coupling chain returns to an already visited segment",
                       {leaf_name(net, entry.ref)});
    std::vector<std::size_t> others;
    for (auto i : members[comp])
      if (i != term_index && is_port(terms[i].ref)) others.push_back(i);
    if (others.size() > 1) {
      std::vector<std::string> names;
      names.push_back(leaf_name(net, entry.ref));
      for (auto i : others) names.push_back(leaf_name(net, terms[i].ref));
      std::string list;
      for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
      throw ModelError(ErrorCode::MultiPortSegment, "segment has more than two ports: " + list, names);
    }

    Segment seg;
    seg.domain = entry.domain;
    seg.entry = entry.ref;
    if (!others.empty()) seg.exit = terms[others[0]].ref;
    if (first && !net.sources[input].across && seg.exit && seg.exit->kind == LeafKind::source &&
        !net.sources[seg.exit->index].across) {
      across_upper = false;
      chain.notes.push_back("input and output generators are both through-type; across line starts on the lower rail");
    }
    first = false;
    seg.across_upper = across_upper;

    std::vector<detail::WorkEdge> edges;
    for (auto i : members[comp]) {
      if (i == term_index) continue;
      edges.push_back({terms[i].plus, terms[i].minus, SPNode::make_leaf(terms[i].ref), true});
    }
    auto tree = detail::reduce_two_terminal(net, std::move(edges), entry.plus, entry.minus, entry.domain);
    if (tree) {
      detail::canonicalize(net, *tree);
      seg.tree = *tree;
      seg.empty_tree = false;
      detail::flatten(seg.tree, seg.exit, seg.items);
      // Recover the exit leaf's orientation from the reduced tree.
      if (seg.exit) {
        for_each_leaf(seg.tree, [&](const LeafRef& r) {
          if (r.kind == seg.exit->kind && r.index == seg.exit->index && r.side == seg.exit->side) seg.exit = r;
        });
      }
    }
    seg.first_section = section;
    section += static_cast<int>(seg.items.size()) + 1;
    chain.segments.push_back(std::move(seg));

    const auto& last = chain.segments.back();
    if (!last.exit || last.exit->kind != LeafKind::coupling) break;
    const auto& cpl = net.couplings[last.exit->index];
    CouplingLink link;
    link.coupling = last.exit->index;
    link.upstream_side = last.exit->side;
    link.kind = cpl.kind;
    sym::Poly k = sym::Poly::symbol(cpl.name);
    if (link.upstream_side == 0) link.ratio = k;
    else link.ratio = cpl.kind == CouplingKind::transformer ? k.inverse() : -k;
    chain.links.push_back(link);
    if (cpl.kind == CouplingKind::gyrator) across_upper = !across_upper;
    term_index = net.elements.size() + net.sources.size() + 2 * last.exit->index + (1 - last.exit->side);
  }

  for (const auto& [comp, list] : members) {
    if (visited.count(comp)) continue;
    std::vector<std::string> names;
    for (auto i : list) names.push_back(leaf_name(net, terms[i].ref));
    std::string s;
    for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
    throw ModelError(ErrorCode::DisconnectedSegment, "not reachable from the input generator: " + s, names);
  }

  // Sections: one at each segment entry and one after every item.
  int index = 1;
  for (std::size_t k = 0; k < chain.segments.size(); ++k) {
    const auto& seg = chain.segments[k];
    auto item_name = [&](const ChainItem& it) {
      if (!it.nested()) return leaf_name(net, it.node.leaf);
      std::string s;
      for (const auto& n : element_names(net, it.node)) s += (s.empty() ? "(" : "|") + n;
      return s + ")";
    };
    std::vector<std::string> blocks;
    blocks.push_back(leaf_name(net, seg.entry));
    for (const auto& it : seg.items) blocks.push_back(item_name(it));
    blocks.push_back(seg.exit ? leaf_name(net, *seg.exit) : "open");
    for (std::size_t j = 0; j + 1 < blocks.size(); ++j) {
      PowerSection ps;
      ps.index = index;
      ps.segment = k;
      ps.left_block = blocks[j];
      ps.right_block = blocks[j + 1];
      ps.across_var = std::string(across_symbol(seg.domain)) + "_s" + std::to_string(index);
      ps.through_var = std::string(through_symbol(seg.domain)) + "_s" + std::to_string(index);
      chain.sections.push_back(ps);
      ++index;
    }
  }
  return chain;
}

enum class Line { across, through };

struct PlannedNode {
  int section = 0;
  Line line = Line::across;
  std::string kind;  // "VKL" or "CKL"
  std::string element;
};

inline const LeafRef& rightmost_leaf(const SPNode& n) { return n.is_leaf() ? n.leaf : rightmost_leaf(n.children.back()); }

// One node per element. Each binary composite K(a, b) of the ladder is owned
// by the last leaf of a; series composites sum on the across line (VKL),
// parallel ones on the through line (CKL).
inline std::vector<PlannedNode> summation_node_plan(const SPChain& chain) {
  std::vector<PlannedNode> plan;
  auto add = [&](const SPNode& first, SPNode::Kind kind, int section) {
    const LeafRef& owner = rightmost_leaf(first);
    bool series = kind == SPNode::Kind::series;
    plan.push_back({section, series ? Line::across : Line::through, series ? "VKL" : "CKL", leaf_name(chain.net, owner)});
  };
  std::function<void(const SPNode&, int)> inner = [&](const SPNode& n, int section) {
    if (n.is_leaf()) return;
    add(n.children[0], n.kind, section);
    inner(n.children[0], section);
    inner(n.children[1], section);
  };
  for (const auto& seg : chain.segments) {
    int section = seg.first_section;
    for (const auto& it : seg.items) {
      SPNode b = binary_nested(it.node);
      add(b, it.position == Position::series ? SPNode::Kind::series : SPNode::Kind::parallel, section);
      inner(b, section);
      ++section;
    }
  }
  return plan;
}

// Across-line placement per segment: flipped by every gyrator downstream.
inline SPChain assign_power_lines(SPChain chain, bool across_upper_first = true) {
  bool upper = across_upper_first;
  for (std::size_t k = 0; k < chain.segments.size(); ++k) {
    chain.segments[k].across_upper = upper;
    if (k < chain.links.size() && chain.links[k].kind == CouplingKind::gyrator) upper = !upper;
  }
  return chain;
}

}  // namespace pogc
