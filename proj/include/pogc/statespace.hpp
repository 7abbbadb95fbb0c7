#pragma once

// POG state-space models: L x' = A x + B u, y = C x + D u.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdio>
#include <deque>
#include <limits>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pogc/error.hpp"
#include "pogc/netlist.hpp"
#include "pogc/pogir.hpp"
#include "pogc/sym.hpp"
#include "pogc/topology.hpp"

namespace pogc {

// Overrides (L, A, B) for state- or time-dependent fixtures.
using TimeVariantHook =
    std::function<void(double t, const Eigen::VectorXd& x, Eigen::MatrixXd& L, Eigen::MatrixXd& A, Eigen::MatrixXd& B)>;

struct SymbolicModel {
  sym::SymMatrix L, A, B, C, D;
};

struct PogStateSpace {
  Eigen::MatrixXd L, A, B, C, D;
  std::vector<std::string> state_labels, input_labels, output_labels;
  std::optional<SymbolicModel> symbolic;
  sym::ParamMap params;
  std::string hook_name;
  TimeVariantHook hook;

  Eigen::Index n() const { return L.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index p() const { return C.rows(); }
  bool time_variant() const { return static_cast<bool>(hook); }

  void matrices_at(double t, const Eigen::VectorXd& x, Eigen::MatrixXd& l, Eigen::MatrixXd& a, Eigen::MatrixXd& b) const {
    l = L;
    a = A;
    b = B;
    if (hook) hook(t, x, l, a, b);
  }
};

struct ClassicalStateSpace {
  Eigen::MatrixXd A, B, C, D;
};

inline Eigen::MatrixXd evaluate(const sym::SymMatrix& m, const sym::ParamMap& params) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).eval(params);
  return out;
}

inline void check_dimensions(const PogStateSpace& ss) {
  auto n = ss.L.rows(), m = ss.B.cols(), p = ss.C.rows();
  bool ok = ss.L.cols() == n && ss.A.rows() == n && ss.A.cols() == n && ss.B.rows() == n && ss.C.cols() == n &&
            ss.D.rows() == p && ss.D.cols() == m && static_cast<Eigen::Index>(ss.state_labels.size()) == n &&
            static_cast<Eigen::Index>(ss.input_labels.size()) == m && static_cast<Eigen::Index>(ss.output_labels.size()) == p;
  if (!ok) throw ModelError(ErrorCode::InvalidModel, "matrix dimensions disagree with the label lists");
}

inline PogStateSpace from_symbolic(SymbolicModel model, const sym::ParamMap& params, std::vector<std::string> states,
                                   std::vector<std::string> inputs, std::vector<std::string> outputs) {
  PogStateSpace ss;
  ss.L = evaluate(model.L, params);
  ss.A = evaluate(model.A, params);
  ss.B = evaluate(model.B, params);
  ss.C = evaluate(model.C, params);
  ss.D = evaluate(model.D, params);
  ss.state_labels = std::move(states);
  ss.input_labels = std::move(inputs);
  ss.output_labels = std::move(outputs);
  ss.symbolic = std::move(model);
  ss.params = params;
  check_dimensions(ss);
  return ss;
}

// Re-evaluate a symbolic model after changing some coefficients.
inline PogStateSpace with_params(const PogStateSpace& ss, const sym::ParamMap& overrides) {
  if (!ss.symbolic) throw ModelError(ErrorCode::InvalidModel, "model has no symbolic coefficients to override");
  sym::ParamMap p = ss.params;
  for (const auto& [k, v] : overrides) {
    if (!p.count(k)) throw ModelError(ErrorCode::InvalidModel, "model has no parameter '" + k + "'", {k});
    p[k] = v;
  }
  PogStateSpace out = from_symbolic(*ss.symbolic, p, ss.state_labels, ss.input_labels, ss.output_labels);
  out.hook_name = ss.hook_name;
  out.hook = ss.hook;
  return out;
}

// ------------------------------------------------------------ extraction

namespace detail {

template <class V>
struct GainAlgebra;

template <>
struct GainAlgebra<sym::Poly> {
  const sym::ParamMap* params = nullptr;
  sym::Poly zero() const { return {}; }
  sym::Poly one() const { return 1; }
  sym::Poly gain(const sym::Poly& g) const { return g; }
};

template <>
struct GainAlgebra<double> {
  const sym::ParamMap* params = nullptr;
  double zero() const { return 0.0; }
  double one() const { return 1.0; }
  double gain(const sym::Poly& g) const { return g.eval(*params); }
};

// Sum of static-path gains from every state and input to each signal,
// memoized per signal; a signal reached again while still open is a static loop.
template <class V>
class PathGains {
 public:
  PathGains(const PogScheme& s, GainAlgebra<V> alg) : s_(s), alg_(alg) {
    std::size_t ns = s.signals.size();
    prod_.assign(ns, {Kind::none, 0});
    state_.assign(ns, 0);
    memo_.assign(ns, {});
    n_ = s.states.size();
    m_ = s.inputs.size();
    for (std::size_t i = 0; i < s.states.size(); ++i) prod_[s.states[i].signal] = {Kind::state, i};
    for (std::size_t k = 0; k < s.inputs.size(); ++k) prod_[s.inputs[k].ref.id] = {Kind::input, k};
    for (std::size_t i = 0; i < s.nodes.size(); ++i) prod_[s.nodes[i].output] = {Kind::node, i};
    for (std::size_t i = 0; i < s.blocks.size(); ++i) {
      const auto& b = s.blocks[i];
      if (b.variant == BlockVariant::elaboration) {
        if (!b.integral) prod_[b.out] = {Kind::block, i};
      } else {
        prod_[b.out_fwd] = {Kind::fwd, i};
        prod_[b.out_bwd] = {Kind::bwd, i};
      }
    }
  }

  std::vector<V> of(const SignalRef& r) {
    std::vector<V> out(n_ + m_, alg_.zero());
    if (r.zero()) return out;
    const auto& v = signal(r.id);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = r.sign < 0 ? -v[k] : v[k];
    return out;
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

 private:
  enum class Kind { none, state, input, node, block, fwd, bwd };

  void accumulate(std::vector<V>& acc, const SignalRef& r, const V& g) {
    if (r.zero()) return;
    const auto& v = signal(r.id);
    V f = r.sign < 0 ? V(-g) : g;
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += f * v[k];
  }

  const std::vector<V>& signal(int id) {
    if (state_[id] == 2) return memo_[id];
    if (state_[id] == 1)
      throw ModelError(ErrorCode::AlgebraicLoop,
                       "integrator-free loop through '" + s_.signals[id].name + "'", {s_.signals[id].name});
    state_[id] = 1;
    std::vector<V> acc(n_ + m_, alg_.zero());
    auto [kind, idx] = prod_[id];
    switch (kind) {
      case Kind::none: break;
      case Kind::state: acc[idx] = alg_.one(); break;
      case Kind::input: acc[n_ + idx] = alg_.one(); break;
      case Kind::node:
        for (const auto& r : s_.nodes[idx].inputs) accumulate(acc, r, alg_.one());
        break;
      case Kind::block: accumulate(acc, s_.blocks[idx].in, alg_.gain(s_.blocks[idx].gain)); break;
      case Kind::fwd: accumulate(acc, s_.blocks[idx].in_fwd, alg_.gain(s_.blocks[idx].gain)); break;
      case Kind::bwd: accumulate(acc, s_.blocks[idx].in_bwd, alg_.gain(s_.blocks[idx].gain)); break;
    }
    memo_[id] = std::move(acc);
    state_[id] = 2;
    return memo_[id];
  }

  const PogScheme& s_;
  GainAlgebra<V> alg_;
  std::vector<std::pair<Kind, std::size_t>> prod_;
  std::vector<int> state_;
  std::vector<std::vector<V>> memo_;
  std::size_t n_ = 0, m_ = 0;
};

inline std::vector<std::string> port_labels(const std::vector<PortSignal>& v) {
  std::vector<std::string> out;
  for (const auto& p : v) out.push_back(p.label);
  return out;
}

}  // namespace detail

inline SymbolicModel extract_symbolic(const PogScheme& s) {
  detail::PathGains<sym::Poly> pg(s, {});
  std::size_t n = pg.n(), m = pg.m(), p = s.outputs.size();
  SymbolicModel sm{sym::SymMatrix(n, n), sym::SymMatrix(n, n), sym::SymMatrix(n, m), sym::SymMatrix(p, n),
                   sym::SymMatrix(p, m)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = s.states[i];
    sm.L(i, i) = st.energy;
    auto row = pg.of(s.blocks[st.block].in);
    for (std::size_t j = 0; j < n; ++j) sm.A(i, j) = row[j];
    for (std::size_t k = 0; k < m; ++k) sm.B(i, k) = row[n + k];
  }
  for (std::size_t i = 0; i < p; ++i) {
    auto row = pg.of(s.outputs[i].ref);
    for (std::size_t j = 0; j < n; ++j) sm.C(i, j) = row[j];
    for (std::size_t k = 0; k < m; ++k) sm.D(i, k) = row[n + k];
  }
  return sm;
}

inline PogStateSpace extract_state_space(const PogScheme& s) {
  std::vector<std::string> states;
  for (const auto& st : s.states) states.push_back(st.label);
  return from_symbolic(extract_symbolic(s), s.params, states, detail::port_labels(s.inputs), detail::port_labels(s.outputs));
}

// Same path sums carried out directly in floating point.
inline PogStateSpace extract_numeric(const PogScheme& s, const sym::ParamMap& params) {
  detail::GainAlgebra<double> alg;
  alg.params = &params;
  detail::PathGains<double> pg(s, alg);
  Eigen::Index n = static_cast<Eigen::Index>(pg.n()), m = static_cast<Eigen::Index>(pg.m());
  Eigen::Index p = static_cast<Eigen::Index>(s.outputs.size());
  PogStateSpace ss;
  ss.L = Eigen::MatrixXd::Zero(n, n);
  ss.A.resize(n, n);
  ss.B.resize(n, m);
  ss.C.resize(p, n);
  ss.D.resize(p, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& st = s.states[i];
    ss.L(i, i) = st.energy.eval(params);
    auto row = pg.of(s.blocks[st.block].in);
    for (Eigen::Index j = 0; j < n; ++j) ss.A(i, j) = row[j];
    for (Eigen::Index k = 0; k < m; ++k) ss.B(i, k) = row[n + k];
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    auto row = pg.of(s.outputs[i].ref);
    for (Eigen::Index j = 0; j < n; ++j) ss.C(i, j) = row[j];
    for (Eigen::Index k = 0; k < m; ++k) ss.D(i, k) = row[n + k];
  }
  for (const auto& st : s.states) ss.state_labels.push_back(st.label);
  ss.input_labels = detail::port_labels(s.inputs);
  ss.output_labels = detail::port_labels(s.outputs);
  ss.params = params;
  return ss;
}

// ------------------------------------------------------ direct assembly

namespace detail {

// Branch/node equations of the oriented netlist, solved by elimination.
// Knowns are the states and inputs.
class DirectAssembler {
 public:
  explicit DirectAssembler(const SPChain& chain) : chain_(chain), net_(chain.net) {}

  PogStateSpace run() {
    collect_knowns();
    build_equations();
    solve();

    std::size_t n = states_.size(), m = inputs_.size(), p = net_.outputs.size();
    SymbolicModel sm{sym::SymMatrix(n, n), sym::SymMatrix(n, n), sym::SymMatrix(n, m), sym::SymMatrix(p, n),
                     sym::SymMatrix(p, m)};
    std::vector<std::string> state_labels, output_labels;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = net_.elements[states_[i]];
      bool across_state = e.kind == ElementKind::across_dynamic;
      sm.L(i, i) = sym::Poly::symbol(e.name, type_info(e.type).inverse_energy ? -1 : 1);
      // Row i: the power variable driving the storage.
      auto row = value(across_state ? branch_i(BranchKind::element, states_[i]) : branch_v(BranchKind::element, states_[i]));
      for (std::size_t j = 0; j < n; ++j) sm.A(i, j) = row[j];
      for (std::size_t k = 0; k < m; ++k) sm.B(i, k) = row[n + k];
      state_labels.push_back(variable_label(e.domain, across_state, e.name));
    }
    for (std::size_t r = 0; r < p; ++r) {
      auto [label, row] = output(net_.outputs[r]);
      output_labels.push_back(label);
      for (std::size_t j = 0; j < n; ++j) sm.C(r, j) = row[j];
      for (std::size_t k = 0; k < m; ++k) sm.D(r, k) = row[n + k];
    }
    std::vector<std::string> input_labels;
    for (auto s : inputs_) input_labels.push_back(net_.sources[s].name);
    return from_symbolic(std::move(sm), netlist_parameters(net_), state_labels, input_labels, output_labels);
  }

 private:
  using Lin = std::vector<sym::Poly>;
  enum class BranchKind { element, source, port };

  struct Branch {
    BranchKind kind;
    std::size_t index;
    Domain domain;
    std::string plus, minus;
  };

  struct Equation {
    std::map<int, sym::Poly> coef;
    Lin known;
  };

  void collect_knowns() {
    for (std::size_t i = 0; i < net_.elements.size(); ++i)
      if (net_.elements[i].kind != ElementKind::static_element) states_.push_back(i);
    if (chain_.segments.empty()) return;
    input_index_ = chain_.segments.front().entry.index;
    inputs_.push_back(input_index_);
    const auto& last = chain_.segments.back();
    if (last.exit && last.exit->kind == LeafKind::source) inputs_.push_back(last.exit->index);
  }

  std::size_t width() const { return states_.size() + inputs_.size(); }

  Lin zero() const { return Lin(width()); }

  int node_unknown(Domain d, const std::string& node) {
    if (node == kReferenceNode) return -1;
    auto key = std::make_pair(static_cast<int>(d), node);
    auto it = node_ids_.find(key);
    if (it != node_ids_.end()) return it->second;
    int id = unknowns_++;
    node_ids_[key] = id;
    return id;
  }

  void add_branch(BranchKind k, std::size_t idx, Domain d, const std::string& p, const std::string& m) {
    branches_.push_back({k, idx, d, p, m});
    int v = unknowns_++;
    int i = unknowns_++;
    branch_vars_[{static_cast<int>(k), idx}] = {v, i};
  }

  int branch_v(BranchKind k, std::size_t idx) const { return branch_vars_.at({static_cast<int>(k), idx}).first; }
  int branch_i(BranchKind k, std::size_t idx) const { return branch_vars_.at({static_cast<int>(k), idx}).second; }

  Equation& new_eq() {
    eqs_.push_back({{}, zero()});
    return eqs_.back();
  }

  static void add(std::map<int, sym::Poly>& c, int id, const sym::Poly& g) {
    if (id < 0) return;
    c[id] += g;
    if (c[id].is_zero()) c.erase(id);
  }

  int state_slot(std::size_t element) const {
    for (std::size_t i = 0; i < states_.size(); ++i)
      if (states_[i] == element) return static_cast<int>(i);
    return -1;
  }

  int input_slot(std::size_t source) const {
    for (std::size_t k = 0; k < inputs_.size(); ++k)
      if (inputs_[k] == source) return static_cast<int>(states_.size() + k);
    return -1;
  }

  void build_equations() {
    for (std::size_t i = 0; i < net_.elements.size(); ++i) {
      const auto& e = net_.elements[i];
      add_branch(BranchKind::element, i, e.domain, e.node_plus, e.node_minus);
    }
    for (std::size_t i = 0; i < net_.sources.size(); ++i) {
      const auto& s = net_.sources[i];
      add_branch(BranchKind::source, i, s.domain, s.node_plus, s.node_minus);
    }
    for (std::size_t i = 0; i < net_.couplings.size(); ++i) {
      const auto& c = net_.couplings[i];
      add_branch(BranchKind::port, 2 * i, c.port_a.domain, c.port_a.node_plus, c.port_a.node_minus);
      add_branch(BranchKind::port, 2 * i + 1, c.port_b.domain, c.port_b.node_plus, c.port_b.node_minus);
    }

    // Branch voltage in terms of node potentials, and node balances.
    std::map<int, std::map<int, sym::Poly>> kcl;
    for (const auto& b : branches_) {
      int v = branch_v(b.kind, b.index), i = branch_i(b.kind, b.index);
      int np = node_unknown(b.domain, b.plus), nm = node_unknown(b.domain, b.minus);
      auto& eq = new_eq();
      add(eq.coef, v, 1);
      add(eq.coef, np, -1);
      add(eq.coef, nm, 1);
      if (np >= 0) add(kcl[np], i, 1);
      if (nm >= 0) add(kcl[nm], i, -1);
    }
    for (auto& [node, c] : kcl) {
      auto& eq = new_eq();
      eq.coef = c;
    }

    for (std::size_t idx = 0; idx < net_.elements.size(); ++idx) {
      const auto& e = net_.elements[idx];
      int v = branch_v(BranchKind::element, idx), i = branch_i(BranchKind::element, idx);
      auto& eq = new_eq();
      if (e.kind == ElementKind::across_dynamic) {
        add(eq.coef, v, 1);
        eq.known[state_slot(idx)] = -1;
      } else if (e.kind == ElementKind::through_dynamic) {
        add(eq.coef, i, 1);
        eq.known[state_slot(idx)] = -1;
      } else if (e.law == StaticLaw::impedance) {
        add(eq.coef, v, 1);
        add(eq.coef, i, -sym::Poly::symbol(e.name));
      } else {
        add(eq.coef, i, 1);
        add(eq.coef, v, -sym::Poly::symbol(e.name));
      }
    }

    for (std::size_t idx = 0; idx < net_.sources.size(); ++idx) {
      const auto& s = net_.sources[idx];
      int slot = input_slot(idx);
      if (slot < 0)
        throw ModelError(ErrorCode::InvalidModel, "generator '" + s.name + "' is not a port of the chain", {s.name});
      auto& eq = new_eq();
      if (s.across) {
        add(eq.coef, branch_v(BranchKind::source, idx), 1);
        eq.known[slot] = -1;
      } else {
        // The driving generator pushes its flow out of n+; the terminating one absorbs it.
        add(eq.coef, branch_i(BranchKind::source, idx), 1);
        eq.known[slot] = idx == input_index_ ? 1 : -1;
      }
    }

    for (std::size_t idx = 0; idx < net_.couplings.size(); ++idx) {
      const auto& c = net_.couplings[idx];
      sym::Poly k = sym::Poly::symbol(c.name);
      int va = branch_v(BranchKind::port, 2 * idx), ia = branch_i(BranchKind::port, 2 * idx);
      int vb = branch_v(BranchKind::port, 2 * idx + 1), ib = branch_i(BranchKind::port, 2 * idx + 1);
      auto& e1 = new_eq();
      auto& e2 = new_eq();
      if (c.kind == CouplingKind::transformer) {
        add(e1.coef, va, 1);
        add(e1.coef, vb, -k);
        add(e2.coef, ib, 1);
        add(e2.coef, ia, k);
      } else {
        add(e1.coef, ia, 1);
        add(e1.coef, vb, -k);
        add(e2.coef, ib, 1);
        add(e2.coef, va, k);
      }
    }
  }

  // Gaussian elimination with single-term pivots, sparsest equation first,
  // then back substitution.
  void solve() {
    std::vector<Equation*> open;
    for (auto& eq : eqs_)
      if (!eq.coef.empty()) open.push_back(&eq);
    std::vector<std::pair<int, Equation*>> pivots;
    for (;;) {
      Equation* best = nullptr;
      int best_u = -1;
      std::size_t best_size = 0;
      bool best_unit = false;
      for (auto* eq : open) {
        for (const auto& [u, c] : eq->coef) {
          if (!c.is_monomial()) continue;
          bool unit = c == sym::Poly(1) || c == sym::Poly(-1);
          std::size_t size = eq->coef.size();
          if (!best || size < best_size || (size == best_size && unit && !best_unit)) {
            best = eq;
            best_u = u;
            best_size = size;
            best_unit = unit;
          }
        }
      }
      if (!best) break;
      const sym::Poly inv = best->coef.at(best_u).inverse();
      open.erase(std::find(open.begin(), open.end(), best));
      for (auto* eq : open) {
        auto it = eq->coef.find(best_u);
        if (it == eq->coef.end()) continue;
        sym::Poly f = it->second * inv;
        for (const auto& [v, c] : best->coef) add(eq->coef, v, -(f * c));
        eq->coef.erase(best_u);
        for (std::size_t k = 0; k < eq->known.size(); ++k)
          if (!best->known[k].is_zero()) eq->known[k] -= f * best->known[k];
      }
      for (auto* eq : open)
        if (eq->coef.empty() && std::any_of(eq->known.begin(), eq->known.end(), [](const sym::Poly& p) { return !p.is_zero(); }))
          constraints_.push_back(eq->known);
      open.erase(std::remove_if(open.begin(), open.end(), [](const Equation* e) { return e->coef.empty(); }), open.end());
      pivots.push_back({best_u, best});
    }

    solved_.assign(static_cast<std::size_t>(unknowns_), std::nullopt);
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
      auto [u, eq] = *it;
      Lin rest = eq->known;
      bool ok = true;
      for (const auto& [v, c] : eq->coef) {
        if (v == u) continue;
        if (!solved_[static_cast<std::size_t>(v)]) {
          ok = false;
          break;
        }
        const Lin& val = *solved_[static_cast<std::size_t>(v)];
        for (std::size_t k = 0; k < rest.size(); ++k)
          if (!val[k].is_zero()) rest[k] += c * val[k];
      }
      if (!ok) continue;
      sym::Poly inv = -eq->coef.at(u).inverse();
      for (auto& r : rest) r = r * inv;
      solved_[static_cast<std::size_t>(u)] = std::move(rest);
    }
  }

  Lin value(int unknown) const {
    if (!solved_[unknown])
      throw ModelError(ErrorCode::AlgebraicLoop, "branch equations only close through simultaneous static relations");
    return *solved_[unknown];
  }

  std::pair<std::string, Lin> output(const OutputDecl& o) const {
    if (const Source* src = net_.find_source(o.target)) {
      std::size_t idx = static_cast<std::size_t>(src - net_.sources.data());
      bool want_across = o.which.empty() ? !src->across : o.which == "across";
      if (want_across == src->across) {
        Lin l = zero();
        l[input_slot(idx)] = 1;
        return {src->name, l};
      }
      std::string label = variable_label(src->domain, want_across, src->name);
      if (want_across) return {label, value(branch_v(BranchKind::source, idx))};
      Lin l = value(branch_i(BranchKind::source, idx));
      if (idx == input_index_)
        for (auto& x : l) x = -x;
      return {label, l};
    }
    const Element* e = net_.find_element(o.target);
    if (!e) throw ModelError(ErrorCode::ValidationFailed, "output refers to unknown variable '" + o.target + "'", {o.target});
    std::size_t idx = static_cast<std::size_t>(e - net_.elements.data());
    bool want_across = o.which.empty() ? e->kind == ElementKind::across_dynamic : o.which == "across";
    return {variable_label(e->domain, want_across, e->name),
            value(want_across ? branch_v(BranchKind::element, idx) : branch_i(BranchKind::element, idx))};
  }

  const SPChain& chain_;
  const Netlist& net_;
  std::vector<std::size_t> states_;
  std::vector<std::size_t> inputs_;
  std::size_t input_index_ = 0;
  int unknowns_ = 0;
  std::map<std::pair<int, std::string>, int> node_ids_;
  std::vector<Branch> branches_;
  std::map<std::pair<int, std::size_t>, std::pair<int, int>> branch_vars_;
  std::deque<Equation> eqs_;  // references stay valid while appending
  std::vector<std::optional<Lin>> solved_;

 public:
  // Relations among states and inputs left over by elimination: dependent storage.
  std::vector<Lin> constraints_;
  std::size_t constraint_count() {
    collect_knowns();
    build_equations();
    solve();
    return constraints_.size();
  }
};

}  // namespace detail

// Independent model from branch and node balances, states in declaration order.
inline PogStateSpace assemble_direct(const SPChain& chain) { return detail::DirectAssembler(chain).run(); }

// Number of independent-looking relations the branch equations impose on the
// states and inputs; nonzero means storage elements are not independent.
inline std::size_t storage_constraints(const SPChain& chain) { return detail::DirectAssembler(chain).constraint_count(); }

// Reorder states to `labels` (a permutation of the current ones).
inline PogStateSpace permute_states(const PogStateSpace& ss, const std::vector<std::string>& labels) {
  if (labels.size() != ss.state_labels.size())
    throw ModelError(ErrorCode::IncompatibleLabels, "state label lists differ in length");
  std::vector<std::size_t> perm;
  for (const auto& l : labels) {
    auto it = std::find(ss.state_labels.begin(), ss.state_labels.end(), l);
    if (it == ss.state_labels.end()) throw ModelError(ErrorCode::IncompatibleLabels, "unknown state label '" + l + "'", {l});
    perm.push_back(static_cast<std::size_t>(it - ss.state_labels.begin()));
  }
  std::size_t n = perm.size();
  PogStateSpace out = ss;
  auto N = static_cast<Eigen::Index>(n);
  for (Eigen::Index i = 0; i < N; ++i) {
    auto pi = static_cast<Eigen::Index>(perm[i]);
    for (Eigen::Index j = 0; j < N; ++j) {
      out.L(i, j) = ss.L(pi, static_cast<Eigen::Index>(perm[j]));
      out.A(i, j) = ss.A(pi, static_cast<Eigen::Index>(perm[j]));
    }
    out.B.row(i) = ss.B.row(pi);
    out.C.col(i) = ss.C.col(pi);
  }
  if (ss.symbolic) {
    auto& s = *out.symbolic;
    const auto& o = *ss.symbolic;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        s.L(i, j) = o.L(perm[i], perm[j]);
        s.A(i, j) = o.A(perm[i], perm[j]);
      }
      for (std::size_t k = 0; k < o.B.cols(); ++k) s.B(i, k) = o.B(perm[i], k);
      for (std::size_t r = 0; r < o.C.rows(); ++r) s.C(r, i) = o.C(r, perm[i]);
    }
  }
  out.state_labels = labels;
  return out;
}

// ----------------------------------------------------------- model algebra

struct EnergyMatrixCheck {
  bool symmetric = true;
  bool psd = true;
  double min_eigenvalue = 0.0;
  double condition = 1.0;
  // Condition after scaling by the diagonal, so mixed units do not count as
  // singularity. Equals `condition` when some diagonal entry is not positive.
  double scaled_condition = 1.0;
};

inline EnergyMatrixCheck check_energy_matrix(const Eigen::MatrixXd& L) {
  EnergyMatrixCheck c;
  if (L.size() == 0) return c;
  double norm = L.norm();
  c.symmetric = (L - L.transpose()).norm() <= 1e-12 * std::max(norm, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()), Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  c.psd = c.min_eigenvalue >= -1e-12 * norm;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L);
  const auto& sv = svd.singularValues();
  double lo = sv(sv.size() - 1);
  c.condition = lo > 0 ? sv(0) / lo : std::numeric_limits<double>::infinity();
  c.scaled_condition = c.condition;
  Eigen::VectorXd d = L.diagonal();
  if (d.minCoeff() > 0) {
    Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
    Eigen::JacobiSVD<Eigen::MatrixXd> ssvd(s.asDiagonal() * L * s.asDiagonal());
    const auto& v = ssvd.singularValues();
    double low = v(v.size() - 1);
    c.scaled_condition = low > 0 ? v(0) / low : std::numeric_limits<double>::infinity();
  }
  return c;
}

inline void require_invertible_energy(const Eigen::MatrixXd& L) {
  if (L.size() == 0) return;
  auto c = check_energy_matrix(L);
  if (!(c.scaled_condition <= 1e12)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", c.scaled_condition);
    throw ModelError(ErrorCode::SingularEnergyMatrix,
                     std::string("energy matrix is singular (condition ") + buf + "); eliminate the degenerate state first");
  }
}

inline ClassicalStateSpace to_classical(const PogStateSpace& ss) {
  require_invertible_energy(ss.L);
  ClassicalStateSpace cs;
  if (ss.n() == 0) {
    cs.A = ss.A;
    cs.B = ss.B;
  } else {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(ss.L);
    cs.A = lu.solve(ss.A);
    cs.B = lu.solve(ss.B);
  }
  cs.C = ss.C;
  cs.D = ss.D;
  return cs;
}

inline Eigen::MatrixXcd transfer_matrix(const Eigen::MatrixXd& L, const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                        const Eigen::MatrixXd& C, const Eigen::MatrixXd& D, std::complex<double> s) {
  Eigen::MatrixXcd H = D.cast<std::complex<double>>();
  if (L.rows() == 0) return H;
  Eigen::MatrixXcd M = s * L.cast<std::complex<double>>() - A.cast<std::complex<double>>();
  // Equilibrate first; unit scales spread coefficients over many decades.
  const auto n = M.rows();
  Eigen::VectorXd r(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double m = M.row(i).cwiseAbs().maxCoeff();
    r(i) = m > 0 ? 1.0 / m : 1.0;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    double m = (r.asDiagonal() * M.col(j)).cwiseAbs().maxCoeff();
    c(j) = m > 0 ? 1.0 / m : 1.0;
  }
  Eigen::MatrixXcd Ms = r.asDiagonal() * M * c.asDiagonal();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Ms);
  if (!(lu.rcond() > 1e-14)) throw ModelError(ErrorCode::PoleAtS, "s lies on (or numerically at) a pole");
  Eigen::MatrixXcd X = c.asDiagonal() * lu.solve(r.asDiagonal() * B.cast<std::complex<double>>());
  H += C.cast<std::complex<double>>() * X;
  return H;
}

inline Eigen::MatrixXcd transfer_matrix(const PogStateSpace& ss, std::complex<double> s) {
  return transfer_matrix(ss.L, ss.A, ss.B, ss.C, ss.D, s);
}

inline Eigen::MatrixXcd transfer_matrix(const ClassicalStateSpace& cs, std::complex<double> s) {
  return transfer_matrix(Eigen::MatrixXd::Identity(cs.A.rows(), cs.A.rows()), cs.A, cs.B, cs.C, cs.D, s);
}

inline double stored_energy(const Eigen::MatrixXd& L, const Eigen::VectorXd& x) { return 0.5 * x.dot(L * x); }
inline double stored_energy(const PogStateSpace& ss, const Eigen::VectorXd& x) { return stored_energy(ss.L, x); }

inline double dissipated_power(const Eigen::MatrixXd& A, const Eigen::VectorXd& x) {
  Eigen::MatrixXd As = 0.5 * (A + A.transpose());
  return x.dot(As * x);
}
inline double dissipated_power(const PogStateSpace& ss, const Eigen::VectorXd& x) { return dissipated_power(ss.A, x); }

inline double supplied_power(const Eigen::MatrixXd& B, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  return x.dot(B * u);
}

inline ClassicalStateSpace similitude_transform(const ClassicalStateSpace& cs, const Eigen::MatrixXd& T,
                                                const Eigen::MatrixXd& Tdot) {
  if (T.rows() != T.cols() || T.rows() != cs.A.rows())
    throw ModelError(ErrorCode::InvalidModel, "similitude transform must be square and match the state dimension");
  ClassicalStateSpace out;
  if (T.rows() == 0) return cs;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(T);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) throw ModelError(ErrorCode::SingularT, "transformation matrix is singular");
  Eigen::MatrixXd td = Tdot.size() ? Tdot : Eigen::MatrixXd::Zero(T.rows(), T.cols());
  out.A = lu.solve(cs.A * T - td);
  out.B = lu.solve(cs.B);
  out.C = cs.C * T;
  out.D = cs.D;
  return out;
}

}  // namespace pogc
