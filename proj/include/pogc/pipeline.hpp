#pragma once

// parse -> validate -> series/parallel chain -> block scheme -> model.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "pogc/checks.hpp"
#include "pogc/error.hpp"
#include "pogc/model_json.hpp"
#include "pogc/netlist.hpp"
#include "pogc/pogir.hpp"
#include "pogc/sim.hpp"
#include "pogc/statespace.hpp"
#include "pogc/topology.hpp"

namespace pogc {

struct Derivation {
  Netlist net;
  SPChain chain;
  PogScheme scheme;
  std::optional<PogStateSpace> model;  // absent when algebraic loops block extraction
  LoopReport algebraic;
};

inline void require_valid(const Netlist& net) {
  auto rep = validate(net);
  if (rep.ok()) return;
  std::vector<std::string> subjects;
  for (const auto& v : rep.violations) subjects.insert(subjects.end(), v.subjects.begin(), v.subjects.end());
  std::string msg = rep.str();
  if (!msg.empty() && msg.back() == '\n') msg.pop_back();
  throw ModelError(ErrorCode::ValidationFailed, msg, subjects);
}

// With `need_model` false an algebraic loop leaves `model` empty instead of throwing.
inline Derivation derive_netlist(const Netlist& net, bool need_model = true) {
  require_valid(net);
  Derivation d;
  d.net = net;
  d.chain = build_sp_chain(net);
  d.scheme = build_scheme(d.chain);
  d.algebraic = detect_algebraic_loops(d.scheme);
  if (!d.algebraic.violations.empty()) {
    if (need_model) {
      std::vector<std::string> loops;
      for (const auto& l : d.algebraic.violations) loops.push_back(loop_text(l));
      throw ModelError(ErrorCode::AlgebraicLoop, "algebraic loop " + loops.front(), loops);
    }
    return d;
  }
  d.model = extract_state_space(d.scheme);
  return d;
}

inline Derivation derive_text(const std::string& text, bool need_model = true) {
  return derive_netlist(parse_netlist(text), need_model);
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool is_model_json(const std::filesystem::path& path) { return path.extension() == ".json"; }

inline CheckReport check_derivation(const Derivation& d) {
  return run_checks(&d.chain, &d.scheme, d.model ? &*d.model : nullptr);
}

// Netlist sources in model input order.
inline InputSet netlist_inputs(const Derivation& d, const std::filesystem::path& base = {}) {
  InputSet u;
  for (const auto& label : d.model->input_labels) {
    const Source* s = d.chain.net.find_source(label);
    if (!s) throw ModelError(ErrorCode::InvalidModel, "input '" + label + "' has no source", {label});
    u.signals.push_back(signal_from_spec(s->signal, base));
  }
  return u;
}

}  // namespace pogc
