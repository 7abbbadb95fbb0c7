#pragma once

// POG block scheme: causality assignment over the ladder trees, block and
// summation-node emission with orientation signs, and the structural checks
// (loop sign parity, integrator-free loops).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pogc/cycles.hpp"
#include "pogc/error.hpp"
#include "pogc/netlist.hpp"
#include "pogc/sym.hpp"
#include "pogc/topology.hpp"

namespace pogc {

// Y: across in, through out. Z: through in, across out.
enum class Causality { Y, Z };

inline const char* causality_name(Causality c) { return c == Causality::Y ? "Y" : "Z"; }

struct SignalRef {
  int id = -1;  // -1 is the constant zero
  int sign = 1;
  bool zero() const { return id < 0; }
  SignalRef flipped(int s) const { return {id, sign * s}; }
};

struct SignalInfo {
  std::string name;
  Domain domain = Domain::electrical;
  bool across = true;
};

enum class BlockVariant { elaboration, connection };

struct PogBlock {
  std::string id;
  BlockVariant variant = BlockVariant::elaboration;
  int section = 0;

  // elaboration
  std::size_t element = 0;
  std::string config;  // S-a, S-b, S-c, P-a, P-b, P-c
  Causality causality = Causality::Y;
  bool integral = false;
  std::string group;  // nested series/parallel item holding the element, if any
  sym::Poly gain;  // static gain, or the energy coefficient K of 1/(K s)
  SignalRef in;
  int out = -1;

  // connection: forward path K and backward path K^T
  std::size_t coupling = 0;
  SignalRef in_fwd, in_bwd;
  int out_fwd = -1, out_bwd = -1;

  std::string gain_text() const {
    if (variant == BlockVariant::connection) return gain.str();
    if (integral) {
      std::string g = gain.str();
      if (g.rfind("1/", 0) == 0) return gain.inverse().str() + "/s";
      return "1/(" + g + " s)";
    }
    return gain.str();
  }
};

struct SummationNode {
  std::string id;
  Line line = Line::across;
  std::vector<SignalRef> inputs;
  int output = -1;
  std::string owner;
  int section = 0;
  std::string group;
};

struct StateInfo {
  std::string label;
  std::size_t block = 0;
  int signal = -1;
  sym::Poly energy;
  int order = 0;
};

struct PortSignal {
  std::string label;
  SignalRef ref;
};

struct PogScheme {
  std::vector<SignalInfo> signals;
  std::vector<PogBlock> blocks;
  std::vector<SummationNode> nodes;
  std::vector<PowerSection> sections;
  std::vector<bool> across_upper;  // per segment
  std::vector<StateInfo> states;
  std::vector<PortSignal> inputs;
  std::vector<PortSignal> outputs;
  std::vector<std::string> trace;
  std::vector<std::string> flags;
  sym::ParamMap params;

  std::string ref_str(const SignalRef& r) const {
    if (r.zero()) return "0";
    return (r.sign < 0 ? "-" : "") + signals[r.id].name;
  }
};

// ------------------------------------------------------------ causality

struct PartialScheme {
  SPChain chain;
  std::vector<SPNode> ladders;            // binary ladder per segment, ids assigned
  std::vector<Causality> node_causality;  // by SPNode id
  std::vector<int> node_parent;           // by SPNode id
  std::vector<const SPNode*> by_id;
  std::vector<Causality> root_causality;  // per segment
  std::map<std::size_t, Causality> element_causality;
  std::map<std::size_t, std::string> element_config;
  std::set<std::size_t> placed;
  std::vector<std::string> trace;
  std::vector<std::string> flags;
  bool solved = false;
};

namespace detail {

inline constexpr int kInfeasible = std::numeric_limits<int>::max() / 4;

inline void number_nodes(SPNode& n, int& next) {
  n.id = next++;
  for (auto& c : n.children) number_nodes(c, next);
}

inline void index_nodes(const SPNode& n, int parent, PartialScheme& ps) {
  ps.by_id[n.id] = &n;
  ps.node_parent[n.id] = parent;
  for (const auto& c : n.children) index_nodes(c, n.id, ps);
}

// The partial scheme refers into its own ladders; refresh after copies.
inline void reindex(PartialScheme& ps) {
  std::size_t n = ps.node_parent.size();
  ps.by_id.assign(n, nullptr);
  ps.node_parent.assign(n, -1);
  for (const auto& l : ps.ladders) index_nodes(l, -1, ps);
}

inline Position leaf_position(const PartialScheme& ps, const SPNode& leaf) {
  int p = ps.node_parent[leaf.id];
  if (p < 0) return Position::parallel;
  return ps.by_id[p]->kind == SPNode::Kind::series ? Position::series : Position::parallel;
}

inline std::string element_role(const Element& e) {
  switch (e.kind) {
    case ElementKind::across_dynamic: return "across-dynamic";
    case ElementKind::through_dynamic: return "through-dynamic";
    default: return "static";
  }
}

// Minimum-cost causality over the ladder trees. Dynamic elements and
// generators are fixed; static elements cost 1 when not in their default
// form (impedance in series, admittance in parallel); a coupling leaf
// carries the cost of the downstream segment.
class CausalitySolver {
 public:
  explicit CausalitySolver(PartialScheme& ps) : ps_(ps) {
    std::size_t n = ps.by_id.size();
    cost_.assign(n, {kInfeasible, kInfeasible});
    choice_.assign(n, {0, 0});
    tie_.assign(n, {false, false});
  }

  void solve_all() {
    std::size_t k = ps_.ladders.size();
    seg_cost_.assign(k, {kInfeasible, kInfeasible});
    for (std::size_t s = k; s-- > 0;) {
      current_segment_ = s;
      solve(ps_.ladders[s]);
      seg_cost_[s] = cost_[ps_.ladders[s].id];
    }
  }

  int cost(const SPNode& n, Causality c) const { return cost_[n.id][static_cast<int>(c)]; }
  int choice(const SPNode& n, Causality c) const { return choice_[n.id][static_cast<int>(c)]; }
  bool tie(const SPNode& n, Causality c) const { return tie_[n.id][static_cast<int>(c)]; }
  int segment_cost(std::size_t s, Causality c) const { return seg_cost_[s][static_cast<int>(c)]; }

 private:
  void solve(const SPNode& n) {
    auto& cst = cost_[n.id];
    if (n.is_leaf()) {
      leaf_costs(n, cst);
      return;
    }
    const SPNode& a = n.children[0];
    const SPNode& b = n.children[1];
    solve(a);
    solve(b);
    auto add = [](int x, int y) { return (x >= kInfeasible || y >= kInfeasible) ? kInfeasible : x + y; };
    const auto& ca = cost_[a.id];
    const auto& cb = cost_[b.id];
    // Options: 0 = a odd, 1 = b odd. "Even" causality needs both children alike.
    Causality even = n.kind == SPNode::Kind::series ? Causality::Z : Causality::Y;
    Causality odd = even == Causality::Z ? Causality::Y : Causality::Z;
    int ie = static_cast<int>(even), io = static_cast<int>(odd);
    cst[ie] = add(ca[ie], cb[ie]);
    int opt0 = add(ca[io], cb[ie]);
    int opt1 = add(ca[ie], cb[io]);
    cst[io] = std::min(opt0, opt1);
    choice_[n.id][io] = opt0 <= opt1 ? 0 : 1;
    tie_[n.id][io] = opt0 == opt1 && opt0 < kInfeasible;
  }

  void leaf_costs(const SPNode& n, std::array<int, 2>& cst) {
    int Y = static_cast<int>(Causality::Y), Z = static_cast<int>(Causality::Z);
    const auto& net = ps_.chain.net;
    switch (n.leaf.kind) {
      case LeafKind::open: cst[Y] = 0; break;
      case LeafKind::source: (net.sources[n.leaf.index].across ? cst[Z] : cst[Y]) = 0; break;
      case LeafKind::coupling: {
        std::size_t next = current_segment_ + 1;
        bool gyr = ps_.chain.links[current_segment_].kind == CouplingKind::gyrator;
        for (Causality c : {Causality::Y, Causality::Z}) {
          Causality down = gyr ? (c == Causality::Y ? Causality::Z : Causality::Y) : c;
          cst[static_cast<int>(c)] = seg_cost_[next][static_cast<int>(down)];
        }
        break;
      }
      case LeafKind::element: {
        const auto& e = net.elements[n.leaf.index];
        if (e.kind == ElementKind::across_dynamic) cst[Z] = 0;
        else if (e.kind == ElementKind::through_dynamic) cst[Y] = 0;
        else {
          bool series = leaf_position(ps_, n) == Position::series;
          cst[Z] = series ? 0 : 1;
          cst[Y] = series ? 1 : 0;
        }
        break;
      }
    }
  }

  PartialScheme& ps_;
  std::vector<std::array<int, 2>> cost_;
  std::vector<std::array<int, 2>> choice_;
  std::vector<std::array<bool, 2>> tie_;
  std::vector<std::array<int, 2>> seg_cost_;
  std::size_t current_segment_ = 0;
};

// Walk down from an infeasible requirement to the smallest composite that
// cannot be oriented, and name its elements.
inline std::vector<std::string> conflict_culprits(const PartialScheme& ps, const CausalitySolver& sol, const SPNode& n) {
  auto dead = [&](const SPNode& c) {
    return sol.cost(c, Causality::Y) >= kInfeasible && sol.cost(c, Causality::Z) >= kInfeasible;
  };
  if (!n.is_leaf()) {
    for (const auto& c : n.children)
      if (dead(c)) return conflict_culprits(ps, sol, c);
  } else if (n.leaf.kind == LeafKind::coupling) {
    for (std::size_t k = 0; k < ps.chain.links.size(); ++k)
      if (ps.chain.links[k].coupling == n.leaf.index) return conflict_culprits(ps, sol, ps.ladders[k + 1]);
  }
  std::vector<std::string> names;
  for_each_leaf(n, [&](const LeafRef& r) {
    if (r.kind == LeafKind::open) return;
    if (r.kind == LeafKind::element && ps.chain.net.elements[r.index].kind == ElementKind::static_element) return;
    names.push_back(leaf_name(ps.chain.net, r));
  });
  return names;
}

inline std::string ebconfig(const PartialScheme& ps, const SPNode& leaf) {
  Causality c = ps.node_causality[leaf.id];
  int p = ps.node_parent[leaf.id];
  if (p < 0) return c == Causality::Y ? "P-b" : "P-a";
  const SPNode& parent = *ps.by_id[p];
  Causality cp = ps.node_causality[parent.id];
  bool first = parent.children[0].id == leaf.id;
  if (parent.kind == SPNode::Kind::series) {
    if (c == Causality::Y) return "S-a";
    if (cp == Causality::Y) return first ? "S-c" : "S-b";
    return "S-b";
  }
  if (c == Causality::Z) return "P-a";
  if (cp == Causality::Z) return first ? "P-c" : "P-b";
  return "P-b";
}

}  // namespace detail

// Step 3: elements admitting a single configuration.
inline PartialScheme place_forced_dynamics(const SPChain& chain) {
  PartialScheme ps;
  ps.chain = chain;
  int next = 0;
  for (const auto& seg : ps.chain.segments) {
    ps.ladders.push_back(ladder_tree(seg));
    detail::number_nodes(ps.ladders.back(), next);
  }
  ps.by_id.assign(next, nullptr);
  ps.node_parent.assign(next, -1);
  ps.node_causality.assign(next, Causality::Y);
  for (const auto& l : ps.ladders) detail::index_nodes(l, -1, ps);

  const auto& net = ps.chain.net;
  ps.trace.push_back("Step 3: forced configurations");
  for (const auto& l : ps.ladders) {
    std::function<void(const SPNode&)> visit = [&](const SPNode& n) {
      if (!n.is_leaf()) {
        for (const auto& c : n.children) visit(c);
        return;
      }
      if (n.leaf.kind != LeafKind::element) return;
      const auto& e = net.elements[n.leaf.index];
      Position pos = detail::leaf_position(ps, n);
      bool forced = (e.kind == ElementKind::through_dynamic && pos == Position::series) ||
                    (e.kind == ElementKind::across_dynamic && pos == Position::parallel);
      if (!forced) return;
      Causality c = e.kind == ElementKind::through_dynamic ? Causality::Y : Causality::Z;
      ps.element_causality[n.leaf.index] = c;
      ps.element_config[n.leaf.index] = pos == Position::series ? "S-a" : "P-a";
      ps.placed.insert(n.leaf.index);
      ps.trace.push_back("  " + e.name + " (" + detail::element_role(e) + ", " +
                         (pos == Position::series ? "series" : "parallel") + ") -> " + ps.element_config[n.leaf.index]);
    };
    visit(l);
  }
  return ps;
}

namespace detail {

inline void apply_solution(PartialScheme& ps, const CausalitySolver& sol) {
  std::function<void(const SPNode&, Causality, std::size_t)> assign = [&](const SPNode& n, Causality c, std::size_t seg) {
    ps.node_causality[n.id] = c;
    if (n.is_leaf()) {
      if (n.leaf.kind == LeafKind::coupling) {
        bool gyr = ps.chain.links[seg].kind == CouplingKind::gyrator;
        ps.root_causality[seg + 1] = gyr ? (c == Causality::Y ? Causality::Z : Causality::Y) : c;
        assign(ps.ladders[seg + 1], ps.root_causality[seg + 1], seg + 1);
      }
      return;
    }
    Causality even = n.kind == SPNode::Kind::series ? Causality::Z : Causality::Y;
    Causality odd = even == Causality::Z ? Causality::Y : Causality::Z;
    if (c == even) {
      assign(n.children[0], even, seg);
      assign(n.children[1], even, seg);
      return;
    }
    if (sol.tie(n, c)) {
      ps.flags.push_back("ambiguous causality between '" + sort_key(ps.chain.net, n.children[0]) + "' and '" +
                         sort_key(ps.chain.net, n.children[1]) + "' branches; the upstream branch takes the odd role");
    }
    int ch = sol.choice(n, c);
    assign(n.children[0], ch == 0 ? odd : even, seg);
    assign(n.children[1], ch == 0 ? even : odd, seg);
  };
  ps.root_causality.assign(ps.ladders.size(), Causality::Y);
  if (ps.ladders.empty()) return;
  const auto& in = ps.chain.net.sources[ps.chain.segments[0].entry.index];
  ps.root_causality[0] = in.across ? Causality::Y : Causality::Z;
  assign(ps.ladders[0], ps.root_causality[0], 0);
}

}  // namespace detail

// Step 4: flexible dynamic elements, resolved jointly with the whole chain.
inline PartialScheme place_flexible_dynamics(PartialScheme ps) {
  detail::reindex(ps);
  ps.trace.push_back("Step 4: flexible dynamic configurations");
  if (ps.ladders.empty()) {
    ps.solved = true;
    return ps;
  }
  detail::CausalitySolver sol(ps);
  sol.solve_all();
  const auto& in = ps.chain.net.sources[ps.chain.segments[0].entry.index];
  Causality need = in.across ? Causality::Y : Causality::Z;
  if (sol.cost(ps.ladders[0], need) >= detail::kInfeasible) {
    auto names = detail::conflict_culprits(ps, sol, ps.ladders[0]);
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ModelError(ErrorCode::CausalityConflict,
                     "no integral-causality configuration exists (dependent storage among " + list + ")", names);
  }
  detail::apply_solution(ps, sol);
  const auto& net = ps.chain.net;
  for (const auto* node : ps.by_id) {
    if (!node->is_leaf() || node->leaf.kind != LeafKind::element) continue;
    const auto& e = net.elements[node->leaf.index];
    if (e.kind == ElementKind::static_element) continue;
    std::string cfg = detail::ebconfig(ps, *node);
    if (ps.placed.count(node->leaf.index)) {
      if (ps.element_config[node->leaf.index] != cfg)
        throw ModelError(ErrorCode::CausalityConflict, "forced configuration of '" + e.name + "' cannot be kept", {e.name});
      continue;
    }
    ps.element_causality[node->leaf.index] = ps.node_causality[node->id];
    ps.element_config[node->leaf.index] = cfg;
    ps.placed.insert(node->leaf.index);
    ps.trace.push_back("  " + e.name + " (" + detail::element_role(e) + ", " +
                       (detail::leaf_position(ps, *node) == Position::series ? "series" : "parallel") + ") -> " + cfg);
  }
  ps.solved = true;
  return ps;
}

// Step 5: static elements.
inline PartialScheme place_statics(PartialScheme ps) {
  detail::reindex(ps);
  ps.trace.push_back("Step 5: static configurations");
  const auto& net = ps.chain.net;
  for (const auto* node : ps.by_id) {
    if (!node->is_leaf() || node->leaf.kind != LeafKind::element) continue;
    const auto& e = net.elements[node->leaf.index];
    if (e.kind != ElementKind::static_element) continue;
    Causality c = ps.node_causality[node->id];
    std::string cfg = detail::ebconfig(ps, *node);
    ps.element_causality[node->leaf.index] = c;
    ps.element_config[node->leaf.index] = cfg;
    ps.placed.insert(node->leaf.index);
    bool impedance_out = c == Causality::Z;
    std::string gain = (impedance_out == (e.law == StaticLaw::impedance)) ? e.name : "1/" + e.name;
    ps.trace.push_back("  " + e.name + " -> " + cfg + ", " + (impedance_out ? "across output" : "through output") +
                       ", gain " + gain);
  }
  return ps;
}

// ------------------------------------------------------------- emission

namespace detail {

class SchemeBuilder {
 public:
  SchemeBuilder(const PartialScheme& ps, PogScheme& out) : ps_(ps), s_(out), net_(ps.chain.net) {
    elem_vars_.assign(net_.elements.size(), {});
    source_dual_.assign(net_.sources.size(), {});
    source_signal_.assign(net_.sources.size(), -1);
    int order = 0;
    for (const auto& l : ps_.ladders)
      for_each_leaf(l, [&](const LeafRef& r) {
        if (r.kind == LeafKind::element) chain_order_[r.index] = order++;
      });
    for (const auto& seg : ps_.chain.segments)
      for (const auto& it : seg.items) {
        if (!it.nested()) continue;
        std::string name;
        auto names = element_names(net_, it.node);
        for (std::size_t i = 0; i < names.size(); ++i)
          name += (i ? (it.node.kind == SPNode::Kind::parallel ? "|" : "+") : "") + names[i];
        for_each_leaf(it.node, [&](const LeafRef& r) {
          if (r.kind == LeafKind::element) group_of_[r.index] = name;
        });
      }
  }

  void build() {
    if (ps_.ladders.empty()) return;
    // Section number of every ladder node.
    for (std::size_t k = 0; k < ps_.ladders.size(); ++k) {
      const SPNode* n = &ps_.ladders[k];
      int sec = ps_.chain.segments[k].first_section;
      for (;;) {
        section_of_[n->id] = sec++;
        if (n->is_leaf()) break;
        n = &n->children[1];
      }
    }
    // Inputs in chain order: the driving generator, then the terminating one.
    const auto& seg0 = ps_.chain.segments.front();
    add_input(seg0.entry.index);
    const auto& segN = ps_.chain.segments.back();
    if (segN.exit && segN.exit->kind == LeafKind::source) add_input(segN.exit->index);

    SignalRef u{source_signal_[seg0.entry.index], 1};
    source_dual_[seg0.entry.index] = emit(ps_.ladders[0], ps_.root_causality[0], u, 0);

    std::stable_sort(s_.nodes.begin(), s_.nodes.end(),
                     [](const SummationNode& a, const SummationNode& b) { return a.section < b.section; });
    for (std::size_t i = 0; i < s_.nodes.size(); ++i) s_.nodes[i].id = "SN" + std::to_string(i + 1);

    // States in chain order.
    std::sort(s_.states.begin(), s_.states.end(), [](const StateInfo& a, const StateInfo& b) { return a.order < b.order; });

    for (const auto& o : net_.outputs) s_.outputs.push_back(resolve_output(o));

    for (auto& ps : s_.sections) {
      auto it = section_vars_.find(ps.index);
      if (it == section_vars_.end()) continue;
      ps.across_var = s_.ref_str(it->second.first);
      ps.through_var = s_.ref_str(it->second.second);
    }
  }

 private:
  int new_signal(std::string name, Domain d, bool across) {
    std::string base = name;
    int k = 2;
    while (used_names_.count(name)) name = base + "_" + std::to_string(k++);
    used_names_.insert(name);
    s_.signals.push_back({name, d, across});
    return static_cast<int>(s_.signals.size()) - 1;
  }

  void add_input(std::size_t src_index) {
    const Source& src = net_.sources[src_index];
    int id = new_signal(src.name, src.domain, src.across);
    source_signal_[src_index] = id;
    s_.inputs.push_back({src.name, {id, 1}});
  }

  std::string leaf_quantity_name(const LeafRef& r, bool across) const {
    switch (r.kind) {
      case LeafKind::element: {
        const auto& e = net_.elements[r.index];
        return variable_label(e.domain, across, e.name);
      }
      case LeafKind::source: {
        const auto& s = net_.sources[r.index];
        return variable_label(s.domain, across, s.name);
      }
      case LeafKind::coupling: {
        const auto& c = net_.couplings[r.index];
        const auto& port = r.side == 0 ? c.port_a : c.port_b;
        return variable_label(port.domain, across, c.name);
      }
      case LeafKind::open: return "open";
    }
    return "";
  }

  std::string composite_name(const SPNode& n, bool across, Domain d) const {
    auto it = section_of_.find(n.id);
    std::string sym = across ? across_symbol(d) : through_symbol(d);
    if (it != section_of_.end()) return sym + "_s" + std::to_string(it->second);
    std::string s = sym;
    for (const auto& e : element_names(net_, n)) s += "_" + e;
    return s;
  }

  std::string input_signal_name(const SPNode& n, bool across, Domain d) const {
    return n.is_leaf() ? leaf_quantity_name(n.leaf, across) : composite_name(n, across, d);
  }

  void record_section(const SPNode& n, Causality c, SignalRef in, SignalRef out) {
    auto it = section_of_.find(n.id);
    if (it == section_of_.end()) return;
    if (section_vars_.count(it->second)) return;
    section_vars_[it->second] = c == Causality::Y ? std::make_pair(in, out) : std::make_pair(out, in);
  }

  SignalRef emit(const SPNode& n, Causality c, SignalRef in, std::size_t seg) {
    SignalRef out = n.is_leaf() ? emit_leaf(n, c, in, seg) : emit_composite(n, c, in, seg);
    record_section(n, c, in, out);
    return out;
  }

  int section_for(const SPNode& n) const {
    int id = n.id;
    while (id >= 0) {
      auto it = section_of_.find(id);
      if (it != section_of_.end()) return it->second;
      id = ps_.node_parent[id];
    }
    return 0;
  }

  SignalRef emit_leaf(const SPNode& n, Causality c, SignalRef in, std::size_t seg) {
    const LeafRef& r = n.leaf;
    switch (r.kind) {
      case LeafKind::open: return {};
      case LeafKind::source: {
        source_dual_[r.index] = in.flipped(r.sigma);
        return {source_signal_[r.index], r.sigma};
      }
      case LeafKind::element: return emit_element(n, c, in);
      case LeafKind::coupling: return emit_coupling(n, c, in, seg);
    }
    return {};
  }

  SignalRef emit_element(const SPNode& n, Causality c, SignalRef in) {
    const auto& e = net_.elements[n.leaf.index];
    PogBlock b;
    b.variant = BlockVariant::elaboration;
    b.id = e.name;
    b.element = n.leaf.index;
    b.causality = c;
    b.config = ps_.element_config.at(n.leaf.index);
    b.section = section_for(n);
    b.group = group_name(n);
    b.in = in.flipped(n.leaf.sigma);
    const auto& info = type_info(e.type);
    bool out_across = c == Causality::Z;
    if (e.kind == ElementKind::static_element) {
      bool plain = out_across == (e.law == StaticLaw::impedance);
      b.gain = plain ? sym::Poly::symbol(e.name) : sym::Poly::symbol(e.name, -1);
    } else {
      b.integral = true;
      b.gain = sym::Poly::symbol(e.name, info.inverse_energy ? -1 : 1);
    }
    b.out = new_signal(variable_label(e.domain, out_across, e.name), e.domain, out_across);
    s_.blocks.push_back(b);
    if (b.integral) {
      s_.states.push_back({s_.signals[b.out].name, s_.blocks.size() - 1, b.out, b.gain, chain_order_[n.leaf.index]});
    }
    auto& vars = elem_vars_[n.leaf.index];
    if (out_across) {
      vars.across = {b.out, 1};
      vars.through = b.in;
    } else {
      vars.through = {b.out, 1};
      vars.across = b.in;
    }
    return {b.out, n.leaf.sigma};
  }

  SignalRef emit_coupling(const SPNode& n, Causality c, SignalRef in, std::size_t seg) {
    const auto& link = ps_.chain.links[seg];
    const auto& cpl = net_.couplings[link.coupling];
    const auto& down_seg = ps_.chain.segments[seg + 1];
    const auto& up_port = n.leaf.side == 0 ? cpl.port_a : cpl.port_b;
    bool gyr = link.kind == CouplingKind::gyrator;
    // Same-type conversion when the incoming variable keeps its kind.
    bool divide = gyr ? c == Causality::Z : c == Causality::Y;
    sym::Poly gain = divide ? link.ratio.inverse() : link.ratio;
    Causality down = ps_.root_causality[seg + 1];
    bool down_in_across = down == Causality::Y;

    PogBlock b;
    b.variant = BlockVariant::connection;
    b.id = cpl.name;
    b.coupling = link.coupling;
    b.gain = gain;
    b.section = section_for(n);
    b.in_fwd = in.flipped(n.leaf.sigma);
    std::string down_name =
        std::string(down_in_across ? across_symbol(down_seg.domain) : through_symbol(down_seg.domain)) + "_s" +
        std::to_string(down_seg.first_section);
    b.out_fwd = new_signal(down_name, down_seg.domain, down_in_across);
    std::size_t bi = s_.blocks.size();
    s_.blocks.push_back(b);

    SignalRef back = emit(ps_.ladders[seg + 1], down, {b.out_fwd, 1}, seg + 1);
    bool up_out_across = c == Causality::Z;
    int out_bwd = new_signal(variable_label(up_port.domain, up_out_across, cpl.name), up_port.domain, up_out_across);
    s_.blocks[bi].in_bwd = back;
    s_.blocks[bi].out_bwd = out_bwd;
    return {out_bwd, n.leaf.sigma};
  }

  SignalRef add_node(int output, Line line, std::vector<SignalRef> inputs, const SPNode& owner_of, int section) {
    SummationNode sn;
    sn.id = "SN" + std::to_string(s_.nodes.size() + 1);
    sn.line = line;
    for (auto& r : inputs)
      if (!r.zero()) sn.inputs.push_back(r);
    sn.output = output;
    sn.owner = leaf_name(net_, rightmost_leaf(owner_of));
    sn.section = section;
    s_.nodes.push_back(std::move(sn));
    return {output, 1};
  }

  // Common nested group of every element below n, or empty.
  std::string group_name(const SPNode& n) const {
    std::optional<std::string> g;
    bool mixed = false;
    for_each_leaf(n, [&](const LeafRef& r) {
      std::string here;
      if (r.kind == LeafKind::element) {
        auto it = group_of_.find(r.index);
        if (it != group_of_.end()) here = it->second;
      }
      if (!g) g = here;
      else if (*g != here) mixed = true;
    });
    return g && !mixed ? *g : std::string();
  }

  Domain domain_of(std::size_t seg) const { return ps_.chain.segments[seg].domain; }

  SignalRef emit_composite(const SPNode& n, Causality c, SignalRef in, std::size_t seg) {
    const SPNode& a = n.children[0];
    const SPNode& b = n.children[1];
    Causality ca = ps_.node_causality[a.id];
    Causality cb = ps_.node_causality[b.id];
    bool series = n.kind == SPNode::Kind::series;
    Line line = series ? Line::across : Line::through;
    Domain d = domain_of(seg);
    int section = section_for(n);
    Causality even = series ? Causality::Z : Causality::Y;

    if (c == even) {
      SignalRef oa = emit(a, even, in, seg);
      SignalRef ob = emit(b, even, in, seg);
      // Output is the composite's own variable: across for series, through for parallel.
      int sig = new_signal(composite_name(n, series, d), d, series);
      SignalRef r = add_node(sig, line, {oa, ob}, a, section);
      s_.nodes.back().group = group_name(n);
      return r;
    }
    bool a_odd = ca != even;
    const SPNode& odd = a_odd ? a : b;
    const SPNode& other = a_odd ? b : a;
    (void)cb;
    int sigma = odd.is_leaf() && odd.leaf.kind != LeafKind::open ? odd.leaf.sigma : 1;
    // The node output feeds the odd child: across for series, through for parallel.
    int sig = new_signal(input_signal_name(odd, series, d), d, series);
    SignalRef odd_out = emit(odd, c, {sig, sigma}, seg);
    SignalRef other_out = emit(other, even, odd_out, seg);
    add_node(sig, line, {in.flipped(sigma), other_out.flipped(-sigma)}, a, section);
    s_.nodes.back().group = group_name(n);
    return odd_out;
  }

  PortSignal resolve_output(const OutputDecl& o) {
    if (const Source* src = net_.find_source(o.target)) {
      std::size_t idx = static_cast<std::size_t>(src - net_.sources.data());
      bool want_across = o.which.empty() ? !src->across : o.which == "across";
      std::string label = variable_label(src->domain, want_across, src->name);
      if (want_across == src->across) return {src->name, {source_signal_[idx], 1}};
      return {label, source_dual_[idx]};
    }
    const Element* e = net_.find_element(o.target);
    if (!e) throw ModelError(ErrorCode::ValidationFailed, "output refers to unknown variable '" + o.target + "'", {o.target});
    std::size_t idx = static_cast<std::size_t>(e - net_.elements.data());
    bool want_across;
    if (!o.which.empty()) want_across = o.which == "across";
    else if (e->kind == ElementKind::across_dynamic) want_across = true;
    else want_across = false;
    const auto& vars = elem_vars_[idx];
    return {variable_label(e->domain, want_across, e->name), want_across ? vars.across : vars.through};
  }

  struct ElementVars {
    SignalRef across, through;
  };

  const PartialScheme& ps_;
  PogScheme& s_;
  const Netlist& net_;
  std::vector<ElementVars> elem_vars_;
  std::vector<SignalRef> source_dual_;
  std::vector<int> source_signal_;
  std::map<std::size_t, int> chain_order_;
  std::map<int, int> section_of_;
  std::map<std::size_t, std::string> group_of_;
  std::map<int, std::pair<SignalRef, SignalRef>> section_vars_;
  std::set<std::string> used_names_;
};

}  // namespace detail

inline sym::ParamMap netlist_parameters(const Netlist& net) {
  sym::ParamMap p;
  for (const auto& e : net.elements) p[e.name] = e.value;
  for (const auto& c : net.couplings) p[c.name] = c.ratio;
  return p;
}

// Step 6: signals, blocks and signed summation nodes.
inline PogScheme assign_signs(const PartialScheme& in, const Netlist& raw) {
  PartialScheme ps = in;
  detail::reindex(ps);
  if (!ps.solved) throw std::logic_error("assign_signs needs a solved partial scheme");
  PogScheme s;
  s.sections = ps.chain.sections;
  for (const auto& seg : ps.chain.segments) s.across_upper.push_back(seg.across_upper);
  s.params = netlist_parameters(ps.chain.net);
  s.flags = ps.flags;
  for (const auto& n : ps.chain.notes) s.flags.push_back(n);

  // Rule 2 on the tree: consecutive series items share the through variable,
  // parallel leaves share the across variable.
  const auto& net = ps.chain.net;
  for (const auto& seg : ps.chain.segments) {
    const LeafRef* prev = nullptr;
    for (const auto& it : seg.items) {
      if (it.position != Position::series || it.nested()) {
        prev = nullptr;
        continue;
      }
      if (prev && prev->kind == LeafKind::element && it.node.leaf.kind == LeafKind::element &&
          prev->sigma != it.node.leaf.sigma) {
        std::string a = net.elements[prev->index].name, b = net.elements[it.node.leaf.index].name;
        throw ModelError(ErrorCode::SignInconsistency,
                         "series elements '" + a + "' and '" + b + "' carry opposite positive directions", {a, b});
      }
      prev = &it.node.leaf;
    }
  }

  s.trace.push_back("Step 1: positive directions");
  for (const auto& e : net.elements)
    s.trace.push_back("  " + e.name + ": " + e.node_plus + " -> " + e.node_minus);
  for (const auto& src : net.sources)
    s.trace.push_back("  " + src.name + ": " + src.node_plus + " -> " + src.node_minus);
  (void)raw;

  s.trace.push_back("Step 2: series/parallel structure");
  for (std::size_t k = 0; k < ps.chain.segments.size(); ++k) {
    const auto& seg = ps.chain.segments[k];
    std::string line = std::string("  segment ") + std::to_string(k + 1) + " (" + domain_keyword(seg.domain) + ", across line " +
                       (seg.across_upper ? "upper" : "lower") + "):";
    for (const auto& it : seg.items) {
      std::string name = it.nested() ? "(" : leaf_name(net, it.node.leaf);
      if (it.nested()) {
        auto names = element_names(net, it.node);
        for (std::size_t i = 0; i < names.size(); ++i)
          name += (i ? (it.node.kind == SPNode::Kind::parallel ? "|" : "+") : "") + names[i];
        name += ")";
      }
      line += " " + name + (it.position == Position::series ? "[s]" : "[p]");
    }
    s.trace.push_back(line);
  }
  for (const auto& p : summation_node_plan(ps.chain))
    s.trace.push_back("  section " + std::to_string(p.section) + ": " + p.kind + " for " + p.element);
  for (const auto& t : ps.trace) s.trace.push_back(t);

  detail::SchemeBuilder builder(ps, s);
  builder.build();

  s.trace.push_back("Step 6: summation nodes");
  for (const auto& n : s.nodes) {
    std::string eq = "  " + n.id + ": " + s.signals[n.output].name + " =";
    bool first = true;
    for (const auto& r : n.inputs) {
      eq += first ? (r.sign < 0 ? " -" : " ") : (r.sign < 0 ? " - " : " + ");
      eq += s.signals[r.id].name;
      first = false;
    }
    if (n.inputs.empty()) eq += " 0";
    s.trace.push_back(eq);
  }
  return s;
}

inline PogScheme build_scheme(const SPChain& chain) {
  return assign_signs(place_statics(place_flexible_dynamics(place_forced_dynamics(chain))), chain.net);
}

// ----------------------------------------------------------------- checks

struct SchemeEdge {
  std::size_t from = 0, to = 0;
  int sign = 1;
  bool integrator = false;
  enum class Owner { node, block_fwd, block_bwd } owner = Owner::node;
  std::size_t index = 0;  // node or block index
  std::size_t input = 0;  // input slot for summation nodes
};

inline std::vector<SchemeEdge> signal_edges(const PogScheme& s) {
  std::vector<SchemeEdge> out;
  auto gain_sign = [&](const sym::Poly& g) { return g.eval(s.params) < 0 ? -1 : 1; };
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const auto& n = s.nodes[i];
    for (std::size_t k = 0; k < n.inputs.size(); ++k)
      out.push_back({static_cast<std::size_t>(n.inputs[k].id), static_cast<std::size_t>(n.output), n.inputs[k].sign, false,
                     SchemeEdge::Owner::node, i, k});
  }
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    const auto& b = s.blocks[i];
    if (b.variant == BlockVariant::elaboration) {
      if (b.in.zero()) continue;
      int sg = b.in.sign * (b.integral ? 1 : gain_sign(b.gain));
      out.push_back({static_cast<std::size_t>(b.in.id), static_cast<std::size_t>(b.out), sg, b.integral,
                     SchemeEdge::Owner::block_fwd, i, 0});
    } else {
      int g = gain_sign(b.gain);
      if (!b.in_fwd.zero())
        out.push_back({static_cast<std::size_t>(b.in_fwd.id), static_cast<std::size_t>(b.out_fwd), b.in_fwd.sign * g, false,
                       SchemeEdge::Owner::block_fwd, i, 0});
      if (!b.in_bwd.zero())
        out.push_back({static_cast<std::size_t>(b.in_bwd.id), static_cast<std::size_t>(b.out_bwd), b.in_bwd.sign * g, false,
                       SchemeEdge::Owner::block_bwd, i, 0});
    }
  }
  return out;
}

struct LoopInfo {
  std::vector<std::string> signals;
  int minus_signs = 0;
  bool has_integrator = false;
};

struct LoopReport {
  std::vector<LoopInfo> violations;
  std::size_t loops_checked = 0;
  bool truncated = false;
  bool ok() const { return violations.empty() && !truncated; }
};

namespace detail {

inline LoopInfo describe_loop(const PogScheme& s, const std::vector<SchemeEdge>& edges, const std::vector<std::size_t>& cyc) {
  LoopInfo li;
  for (auto e : cyc) {
    li.signals.push_back(s.signals[edges[e].from].name);
    if (edges[e].sign < 0) ++li.minus_signs;
    if (edges[e].integrator) li.has_integrator = true;
  }
  return li;
}

}  // namespace detail

inline std::string loop_text(const LoopInfo& l) {
  std::string s;
  for (const auto& n : l.signals) s += n + " -> ";
  if (!l.signals.empty()) s += l.signals.front();
  return s;
}

// Every directed loop must carry an odd number of minus signs.
inline LoopReport check_loop_signs(const PogScheme& s, std::size_t limit = 200000) {
  LoopReport rep;
  auto edges = signal_edges(s);
  std::vector<graph::Edge> g;
  for (const auto& e : edges) g.push_back({e.from, e.to});
  auto cyc = graph::elementary_cycles(s.signals.size(), g, limit);
  rep.truncated = cyc.truncated;
  rep.loops_checked = cyc.cycles.size();
  for (const auto& c : cyc.cycles) {
    auto li = detail::describe_loop(s, edges, c);
    if (li.minus_signs % 2 == 0) rep.violations.push_back(std::move(li));
  }
  return rep;
}

// Integrator-free directed cycles.
inline LoopReport detect_algebraic_loops(const PogScheme& s, std::size_t limit = 200000) {
  LoopReport rep;
  auto all = signal_edges(s);
  std::vector<SchemeEdge> edges;
  for (const auto& e : all)
    if (!e.integrator) edges.push_back(e);
  std::vector<graph::Edge> g;
  for (const auto& e : edges) g.push_back({e.from, e.to});
  auto cyc = graph::elementary_cycles(s.signals.size(), g, limit);
  rep.truncated = cyc.truncated;
  rep.loops_checked = cyc.cycles.size();
  for (const auto& c : cyc.cycles) rep.violations.push_back(detail::describe_loop(s, edges, c));
  return rep;
}

// Summation-node input slots lying on at least one directed loop.
inline std::vector<std::pair<std::size_t, std::size_t>> loop_node_inputs(const PogScheme& s) {
  auto edges = signal_edges(s);
  std::vector<graph::Edge> g;
  for (const auto& e : edges) g.push_back({e.from, e.to});
  auto cyc = graph::elementary_cycles(s.signals.size(), g);
  std::set<std::pair<std::size_t, std::size_t>> slots;
  for (const auto& c : cyc.cycles)
    for (auto e : c)
      if (edges[e].owner == SchemeEdge::Owner::node) slots.insert({edges[e].index, edges[e].input});
  return {slots.begin(), slots.end()};
}

inline PogScheme flip_node_sign(PogScheme s, std::size_t node, std::size_t input) {
  auto& r = s.nodes.at(node).inputs.at(input);
  r.sign = -r.sign;
  return s;
}

}  // namespace pogc
