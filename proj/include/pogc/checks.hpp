#pragma once

// Structural and numerical checks run by `pogc check` and reported in JSON.

#include <optional>
#include <string>
#include <vector>

#include "pogc/pogir.hpp"
#include "pogc/statespace.hpp"
#include "pogc/topology.hpp"

namespace pogc {

struct CheckItem {
  std::string name;
  bool ok = true;
  bool applicable = true;
  std::string detail;
  std::vector<std::string> subjects;  // offending loops etc.
};

struct CheckReport {
  std::vector<CheckItem> items;
  LoopReport parity, algebraic;
  std::optional<EnergyMatrixCheck> energy;

  bool ok() const {
    for (const auto& i : items)
      if (!i.ok) return false;
    return true;
  }
  const CheckItem* find(const std::string& name) const {
    for (const auto& i : items)
      if (i.name == name) return &i;
    return nullptr;
  }
};

namespace detail {

inline bool same_model(const PogStateSpace& a, const PogStateSpace& b, std::string& why) {
  if (a.state_labels != b.state_labels || a.input_labels != b.input_labels || a.output_labels != b.output_labels) {
    why = "label lists differ";
    return false;
  }
  if (a.symbolic && b.symbolic) {
    const auto &x = *a.symbolic, &y = *b.symbolic;
    const char* names[] = {"L", "A", "B", "C", "D"};
    const sym::SymMatrix* ma[] = {&x.L, &x.A, &x.B, &x.C, &x.D};
    const sym::SymMatrix* mb[] = {&y.L, &y.A, &y.B, &y.C, &y.D};
    for (int k = 0; k < 5; ++k)
      if (!(*ma[k] == *mb[k])) {
        why = std::string("symbolic ") + names[k] + " differs";
        return false;
      }
  }
  const char* names[] = {"L", "A", "B", "C", "D"};
  const Eigen::MatrixXd* na[] = {&a.L, &a.A, &a.B, &a.C, &a.D};
  const Eigen::MatrixXd* nb[] = {&b.L, &b.A, &b.B, &b.C, &b.D};
  for (int k = 0; k < 5; ++k)
    if (na[k]->rows() != nb[k]->rows() || na[k]->cols() != nb[k]->cols() || *na[k] != *nb[k]) {
      why = std::string("numeric ") + names[k] + " differs";
      return false;
    }
  return true;
}

}  // namespace detail

// Extraction against the direct-assembly oracle, states aligned by label.
inline CheckItem oracle_check(const SPChain& chain, const PogStateSpace& model) {
  CheckItem item;
  item.name = "oracle_equivalence";
  try {
    PogStateSpace oracle = permute_states(assemble_direct(chain), model.state_labels);
    std::string why;
    item.ok = detail::same_model(model, oracle, why);
    item.detail = item.ok ? "extraction equals direct assembly" : why;
  } catch (const std::exception& e) {
    item.ok = false;
    item.detail = e.what();
  }
  return item;
}

inline CheckItem energy_check(const PogStateSpace& model, CheckReport& rep) {
  CheckItem item;
  item.name = "energy_matrix";
  auto c = check_energy_matrix(model.L);
  rep.energy = c;
  item.ok = c.symmetric && c.psd;
  item.detail = std::string(c.symmetric ? "symmetric" : "not symmetric") + ", " + (c.psd ? "positive semidefinite" : "indefinite") +
                ", min eigenvalue " + format_real(c.min_eigenvalue);
  return item;
}

// Any pointer may be null; the matching checks are then reported as not applicable.
inline CheckReport run_checks(const SPChain* chain, const PogScheme* scheme, const PogStateSpace* model) {
  CheckReport rep;
  CheckItem parity, algebraic;
  parity.name = "loop_parity";
  algebraic.name = "algebraic_loops";
  if (scheme) {
    rep.parity = check_loop_signs(*scheme);
    parity.ok = rep.parity.ok();
    parity.detail = std::to_string(rep.parity.loops_checked) + " loops, " + std::to_string(rep.parity.violations.size()) +
                    " with an even number of minus signs";
    if (rep.parity.truncated) parity.detail += " (enumeration truncated)";
    for (const auto& l : rep.parity.violations) parity.subjects.push_back(loop_text(l));

    rep.algebraic = detect_algebraic_loops(*scheme);
    algebraic.ok = rep.algebraic.ok();
    algebraic.detail = rep.algebraic.violations.empty() ? "no integrator-free loop"
                                                        : std::to_string(rep.algebraic.violations.size()) + " algebraic loop(s)";
    for (const auto& l : rep.algebraic.violations) algebraic.subjects.push_back(loop_text(l));
  } else {
    parity.applicable = algebraic.applicable = false;
    parity.detail = algebraic.detail = "no block scheme";
  }
  rep.items.push_back(parity);
  rep.items.push_back(algebraic);

  if (model) {
    rep.items.push_back(energy_check(*model, rep));
  } else {
    CheckItem e;
    e.name = "energy_matrix";
    e.applicable = false;
    e.detail = "no model";
    rep.items.push_back(e);
  }

  if (chain && model) {
    rep.items.push_back(oracle_check(*chain, *model));
  } else {
    CheckItem o;
    o.name = "oracle_equivalence";
    o.applicable = false;
    o.detail = model ? "model not derived from a netlist" : "no model";
    rep.items.push_back(o);
  }
  return rep;
}

}  // namespace pogc
