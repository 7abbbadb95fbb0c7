#pragma once

// Line-oriented multi-domain netlist: parsing, printing and validation.
//
//   el  <name> <type> <dom> <n+> <n-> <value> [impedance|admittance]
//   src <name> <across|through> <dom> <n+> <n-> <signal>
//   cb  <name> <xfmr|gyr> <dom>(<n+>,<n->) <dom>(<n+>,<n->) <K>
//   out <name>[.across|.through]
//   dir <name> <+|->

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pogc/error.hpp"

namespace pogc {

enum class Domain { electrical, mech_translational, mech_rotational, hydraulic };

enum class ElementKind { across_dynamic, through_dynamic, static_element, across_generator, through_generator };

enum class ElementType { cap, ind, res, mass, spring, fric, inertia, rspring, rfric, hcap, hind, hres };

// impedance: across = K * through; admittance: through = K * across.
enum class StaticLaw { impedance, admittance };

enum class CouplingKind { transformer, gyrator };

struct SourceLoc {
  int line = 0;
  int column = 0;
};

inline constexpr const char* kReferenceNode = "gnd";

struct ElementTypeInfo {
  ElementType type;
  const char* keyword;
  Domain domain;
  ElementKind kind;
  StaticLaw default_law;
  // Springs are given by stiffness; their energy coefficient is 1/K.
  bool inverse_energy;
};

inline constexpr std::array<ElementTypeInfo, 12> kElementTypes{{
    {ElementType::cap, "cap", Domain::electrical, ElementKind::across_dynamic, StaticLaw::impedance, false},
    {ElementType::ind, "ind", Domain::electrical, ElementKind::through_dynamic, StaticLaw::impedance, false},
    {ElementType::res, "res", Domain::electrical, ElementKind::static_element, StaticLaw::impedance, false},
    {ElementType::mass, "mass", Domain::mech_translational, ElementKind::across_dynamic, StaticLaw::impedance, false},
    {ElementType::spring, "spring", Domain::mech_translational, ElementKind::through_dynamic, StaticLaw::impedance, true},
    {ElementType::fric, "fric", Domain::mech_translational, ElementKind::static_element, StaticLaw::admittance, false},
    {ElementType::inertia, "inertia", Domain::mech_rotational, ElementKind::across_dynamic, StaticLaw::impedance, false},
    {ElementType::rspring, "rspring", Domain::mech_rotational, ElementKind::through_dynamic, StaticLaw::impedance, true},
    {ElementType::rfric, "rfric", Domain::mech_rotational, ElementKind::static_element, StaticLaw::admittance, false},
    {ElementType::hcap, "hcap", Domain::hydraulic, ElementKind::across_dynamic, StaticLaw::impedance, false},
    {ElementType::hind, "hind", Domain::hydraulic, ElementKind::through_dynamic, StaticLaw::impedance, false},
    {ElementType::hres, "hres", Domain::hydraulic, ElementKind::static_element, StaticLaw::impedance, false},
}};

inline const ElementTypeInfo& type_info(ElementType t) {
  for (const auto& info : kElementTypes)
    if (info.type == t) return info;
  throw std::logic_error("unknown element type");
}

inline const char* domain_keyword(Domain d) {
  switch (d) {
    case Domain::electrical: return "e";
    case Domain::mech_translational: return "mt";
    case Domain::mech_rotational: return "mr";
    case Domain::hydraulic: return "hy";
  }
  return "?";
}

inline std::optional<Domain> domain_from_keyword(std::string_view s) {
  if (s == "e") return Domain::electrical;
  if (s == "mt") return Domain::mech_translational;
  if (s == "mr") return Domain::mech_rotational;
  if (s == "hy") return Domain::hydraulic;
  return std::nullopt;
}

inline const char* across_symbol(Domain d) {
  switch (d) {
    case Domain::electrical: return "V";
    case Domain::mech_translational: return "v";
    case Domain::mech_rotational: return "w";
    case Domain::hydraulic: return "P";
  }
  return "?";
}

inline const char* through_symbol(Domain d) {
  switch (d) {
    case Domain::electrical: return "I";
    case Domain::mech_translational: return "F";
    case Domain::mech_rotational: return "tau";
    case Domain::hydraulic: return "Q";
  }
  return "?";
}

inline std::string variable_label(Domain d, bool across, const std::string& name) {
  return std::string(across ? across_symbol(d) : through_symbol(d)) + "_" + name;
}

struct Element {
  std::string name;
  ElementType type = ElementType::res;
  ElementKind kind = ElementKind::static_element;
  Domain domain = Domain::electrical;
  std::string node_plus;
  std::string node_minus;
  double value = 0.0;
  StaticLaw law = StaticLaw::impedance;
  SourceLoc loc;
};

struct SignalSpec {
  enum class Kind { constant, step, sine, csv };
  Kind kind = Kind::constant;
  double value = 0.0;  // constant level or step height
  double t0 = 0.0;     // step time
  double amplitude = 0.0;
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad
  std::string path;
};

struct Source {
  std::string name;
  bool across = true;
  Domain domain = Domain::electrical;
  std::string node_plus;
  std::string node_minus;
  SignalSpec signal;
  SourceLoc loc;

  ElementKind kind() const { return across ? ElementKind::across_generator : ElementKind::through_generator; }
};

struct CouplingPort {
  Domain domain = Domain::electrical;
  std::string node_plus;
  std::string node_minus;
};

struct Coupling {
  std::string name;
  CouplingKind kind = CouplingKind::transformer;
  CouplingPort port_a;
  CouplingPort port_b;
  double ratio = 1.0;
  SourceLoc loc;
};

struct OutputDecl {
  std::string target;
  std::string which;  // "", "across" or "through"
  SourceLoc loc;
};

struct Orientation {
  std::string variable;
  int sign = 1;
  SourceLoc loc;
};

struct Netlist {
  std::vector<Element> elements;
  std::vector<Coupling> couplings;
  std::vector<Source> sources;
  std::vector<OutputDecl> outputs;
  std::vector<Orientation> orientations;

  const Element* find_element(const std::string& name) const {
    for (const auto& e : elements)
      if (e.name == name) return &e;
    return nullptr;
  }
  const Source* find_source(const std::string& name) const {
    for (const auto& s : sources)
      if (s.name == name) return &s;
    return nullptr;
  }
  const Coupling* find_coupling(const std::string& name) const {
    for (const auto& c : couplings)
      if (c.name == name) return &c;
    return nullptr;
  }
};

// ---------------------------------------------------------------- printing

// Shortest text that reads back identically.
inline std::string format_real(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string signal_text(const SignalSpec& s) {
  switch (s.kind) {
    case SignalSpec::Kind::constant: return "const:" + format_real(s.value);
    case SignalSpec::Kind::step: return "step:" + format_real(s.value) + "@" + format_real(s.t0);
    case SignalSpec::Kind::sine:
      return "sin:" + format_real(s.amplitude) + "," + format_real(s.frequency) + "," + format_real(s.phase);
    case SignalSpec::Kind::csv: return "csv:" + s.path;
  }
  return "";
}

inline std::string print_netlist(const Netlist& net) {
  std::ostringstream os;
  for (const auto& e : net.elements) {
    const auto& info = type_info(e.type);
    os << "el " << e.name << ' ' << info.keyword << ' ' << domain_keyword(e.domain) << ' ' << e.node_plus << ' '
       << e.node_minus << ' ' << format_real(e.value);
    if (e.kind == ElementKind::static_element && e.law != info.default_law)
      os << (e.law == StaticLaw::impedance ? " impedance" : " admittance");
    os << '\n';
  }
  for (const auto& s : net.sources)
    os << "src " << s.name << ' ' << (s.across ? "across" : "through") << ' ' << domain_keyword(s.domain) << ' '
       << s.node_plus << ' ' << s.node_minus << ' ' << signal_text(s.signal) << '\n';
  for (const auto& c : net.couplings)
    os << "cb " << c.name << ' ' << (c.kind == CouplingKind::transformer ? "xfmr" : "gyr") << ' '
       << domain_keyword(c.port_a.domain) << '(' << c.port_a.node_plus << ',' << c.port_a.node_minus << ") "
       << domain_keyword(c.port_b.domain) << '(' << c.port_b.node_plus << ',' << c.port_b.node_minus << ") "
       << format_real(c.ratio) << '\n';
  for (const auto& o : net.outputs) os << "out " << o.target << (o.which.empty() ? "" : "." + o.which) << '\n';
  for (const auto& d : net.orientations) os << "dir " << d.variable << ' ' << (d.sign > 0 ? '+' : '-') << '\n';
  return os.str();
}

// Structural equality; source locations are ignored.
inline bool same_netlist(const Netlist& a, const Netlist& b) { return print_netlist(a) == print_netlist(b); }

// ----------------------------------------------------------------- parsing

namespace detail {

struct Token {
  std::string text;
  int column = 0;
};

inline std::vector<Token> tokenize_line(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline bool is_node_name(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string tmp(s);
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line) : toks_(std::move(toks)), line_(line) {}

  [[noreturn]] void fail(std::size_t idx, const std::string& msg) const {
    int col = idx < toks_.size() ? toks_[idx].column
                                 : (toks_.empty() ? 1 : toks_.back().column + static_cast<int>(toks_.back().text.size()));
    throw ParseError(line_, col, msg);
  }
  const Token& at(std::size_t idx, const char* expected) const {
    if (idx >= toks_.size()) fail(idx, std::string("expected ") + expected);
    return toks_[idx];
  }
  std::size_t size() const { return toks_.size(); }
  SourceLoc loc() const { return {line_, toks_.empty() ? 1 : toks_[0].column}; }

  std::string identifier(std::size_t idx, const char* what) const {
    const auto& t = at(idx, what);
    if (!is_identifier(t.text)) fail(idx, std::string("expected ") + what + ", got '" + t.text + "'");
    return t.text;
  }
  std::string node(std::size_t idx) const {
    const auto& t = at(idx, "node name");
    if (!is_node_name(t.text)) fail(idx, "expected node name, got '" + t.text + "'");
    return t.text;
  }
  Domain domain(std::size_t idx) const {
    const auto& t = at(idx, "domain (e, mt, mr, hy)");
    auto d = domain_from_keyword(t.text);
    if (!d) fail(idx, "unknown domain '" + t.text + "'");
    return *d;
  }
  double real(std::size_t idx, const char* what) const {
    const auto& t = at(idx, what);
    auto v = parse_real(t.text);
    if (!v) fail(idx, std::string("expected ") + what + ", got '" + t.text + "'");
    return *v;
  }
  void end(std::size_t idx) const {
    if (idx < toks_.size()) fail(idx, "unexpected token '" + toks_[idx].text + "'");
  }

 private:
  std::vector<Token> toks_;
  int line_;
};

inline SignalSpec parse_signal(const LineParser& p, std::size_t idx) {
  const auto& t = p.at(idx, "signal (const:, step:, sin:, csv:)");
  const std::string& s = t.text;
  auto colon = s.find(':');
  if (colon == std::string::npos) p.fail(idx, "expected signal (const:, step:, sin:, csv:), got '" + s + "'");
  std::string kind = s.substr(0, colon);
  std::string rest = s.substr(colon + 1);
  SignalSpec sig;
  auto num = [&](const std::string& text) {
    auto v = parse_real(text);
    if (!v) p.fail(idx, "malformed number '" + text + "' in signal");
    return *v;
  };
  if (kind == "const") {
    sig.kind = SignalSpec::Kind::constant;
    sig.value = num(rest);
  } else if (kind == "step") {
    auto at = rest.find('@');
    if (at == std::string::npos) p.fail(idx, "expected step:<v>@<t>");
    sig.kind = SignalSpec::Kind::step;
    sig.value = num(rest.substr(0, at));
    sig.t0 = num(rest.substr(at + 1));
  } else if (kind == "sin") {
    std::vector<std::string> parts;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 3) p.fail(idx, "expected sin:<amp>,<freq>,<phase>");
    sig.kind = SignalSpec::Kind::sine;
    sig.amplitude = num(parts[0]);
    sig.frequency = num(parts[1]);
    sig.phase = num(parts[2]);
  } else if (kind == "csv") {
    if (rest.empty()) p.fail(idx, "expected csv:<path>");
    sig.kind = SignalSpec::Kind::csv;
    sig.path = rest;
  } else {
    p.fail(idx, "unknown signal kind '" + kind + "'");
  }
  return sig;
}

inline CouplingPort parse_port(const LineParser& p, std::size_t idx) {
  const auto& t = p.at(idx, "<dom>(<n+>,<n->)");
  const std::string& s = t.text;
  auto open = s.find('(');
  auto comma = s.find(',');
  if (open == std::string::npos || comma == std::string::npos || comma < open || s.back() != ')')
    p.fail(idx, "expected <dom>(<n+>,<n->), got '" + s + "'");
  auto d = domain_from_keyword(s.substr(0, open));
  if (!d) p.fail(idx, "unknown domain '" + s.substr(0, open) + "'");
  CouplingPort port;
  port.domain = *d;
  port.node_plus = s.substr(open + 1, comma - open - 1);
  port.node_minus = s.substr(comma + 1, s.size() - comma - 2);
  if (!is_node_name(port.node_plus) || !is_node_name(port.node_minus))
    p.fail(idx, "expected node names in '" + s + "'");
  return port;
}

}  // namespace detail

inline Netlist parse_netlist(const std::string& text) {
  Netlist net;
  std::set<std::string> names;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto toks = detail::tokenize_line(raw);
    if (toks.empty()) continue;
    detail::LineParser p(toks, line_no);
    const std::string& rec = toks[0].text;
    auto claim = [&](std::size_t idx, const std::string& name) {
      if (!names.insert(name).second) p.fail(idx, "duplicate name '" + name + "'");
    };

    if (rec == "el") {
      Element e;
      e.name = p.identifier(1, "element name");
      const auto& tt = p.at(2, "element type");
      const ElementTypeInfo* info = nullptr;
      for (const auto& ti : kElementTypes)
        if (tt.text == ti.keyword) info = &ti;
      if (!info) p.fail(2, "unknown element type '" + tt.text + "'");
      e.type = info->type;
      e.kind = info->kind;
      e.law = info->default_law;
      e.domain = p.domain(3);
      if (e.domain != info->domain)
        p.fail(3, std::string("element type '") + info->keyword + "' belongs to domain '" +
                      domain_keyword(info->domain) + "'");
      e.node_plus = p.node(4);
      e.node_minus = p.node(5);
      e.value = p.real(6, "coefficient");
      if (!(e.value > 0.0)) p.fail(6, "non-positive coefficient " + toks[6].text);
      std::size_t next = 7;
      if (p.size() > 7) {
        if (e.kind != ElementKind::static_element) p.fail(7, "static law given for a dynamic element");
        if (toks[7].text == "impedance") e.law = StaticLaw::impedance;
        else if (toks[7].text == "admittance") e.law = StaticLaw::admittance;
        else p.fail(7, "expected 'impedance' or 'admittance', got '" + toks[7].text + "'");
        next = 8;
      }
      p.end(next);
      claim(1, e.name);
      e.loc = p.loc();
      net.elements.push_back(std::move(e));
    } else if (rec == "src") {
      Source s;
      s.name = p.identifier(1, "source name");
      const auto& kt = p.at(2, "'across' or 'through'");
      if (kt.text == "across") s.across = true;
      else if (kt.text == "through") s.across = false;
      else p.fail(2, "expected 'across' or 'through', got '" + kt.text + "'");
      s.domain = p.domain(3);
      s.node_plus = p.node(4);
      s.node_minus = p.node(5);
      s.signal = detail::parse_signal(p, 6);
      p.end(7);
      claim(1, s.name);
      s.loc = p.loc();
      net.sources.push_back(std::move(s));
    } else if (rec == "cb") {
      Coupling c;
      c.name = p.identifier(1, "coupling name");
      const auto& kt = p.at(2, "'xfmr' or 'gyr'");
      if (kt.text == "xfmr") c.kind = CouplingKind::transformer;
      else if (kt.text == "gyr") c.kind = CouplingKind::gyrator;
      else p.fail(2, "expected 'xfmr' or 'gyr', got '" + kt.text + "'");
      c.port_a = detail::parse_port(p, 3);
      c.port_b = detail::parse_port(p, 4);
      c.ratio = p.real(5, "coupling ratio");
      if (c.ratio == 0.0) p.fail(5, "zero coupling ratio");
      p.end(6);
      claim(1, c.name);
      c.loc = p.loc();
      net.couplings.push_back(std::move(c));
    } else if (rec == "out") {
      OutputDecl o;
      const auto& t = p.at(1, "output variable");
      auto dot = t.text.find('.');
      o.target = t.text.substr(0, dot);
      if (dot != std::string::npos) {
        o.which = t.text.substr(dot + 1);
        if (o.which != "across" && o.which != "through") p.fail(1, "expected '.across' or '.through' suffix");
      }
      if (!detail::is_identifier(o.target)) p.fail(1, "expected output variable, got '" + t.text + "'");
      p.end(2);
      o.loc = p.loc();
      net.outputs.push_back(std::move(o));
    } else if (rec == "dir") {
      Orientation d;
      d.variable = p.identifier(1, "variable name");
      const auto& st = p.at(2, "'+' or '-'");
      if (st.text == "+") d.sign = 1;
      else if (st.text == "-") d.sign = -1;
      else p.fail(2, "expected '+' or '-', got '" + st.text + "'");
      p.end(3);
      d.loc = p.loc();
      net.orientations.push_back(std::move(d));
    } else {
      p.fail(0, "unknown record '" + rec + "' (expected el, src, cb, out, dir)");
    }
  }
  return net;
}

// ---------------------------------------------------------------- validate

struct Violation {
  enum class Kind {
    self_loop,
    dangling_node,
    series_orientation,
    parallel_orientation,
    domain_mismatch,
    unknown_orientation,
    duplicate_orientation,
    unknown_output,
  };
  Kind kind;
  std::string message;
  std::vector<std::string> subjects;
  int line = 0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const {
    std::string s;
    for (const auto& v : violations) {
      if (v.line > 0) s += "line " + std::to_string(v.line) + ": ";
      s += v.message + "\n";
    }
    return s;
  }
};

// Positive directions from `dir` records folded into the node order.
inline Netlist apply_orientations(const Netlist& net) {
  Netlist out = net;
  for (const auto& d : net.orientations) {
    if (d.sign > 0) continue;
    for (auto& e : out.elements)
      if (e.name == d.variable) std::swap(e.node_plus, e.node_minus);
    for (auto& s : out.sources)
      if (s.name == d.variable) std::swap(s.node_plus, s.node_minus);
  }
  out.orientations.clear();
  return out;
}

inline ValidationReport validate(const Netlist& raw) {
  ValidationReport rep;
  auto add = [&](Violation::Kind k, std::string msg, std::vector<std::string> subj, int line) {
    rep.violations.push_back({k, std::move(msg), std::move(subj), line});
  };

  std::set<std::string> known;
  for (const auto& e : raw.elements) known.insert(e.name);
  for (const auto& s : raw.sources) known.insert(s.name);
  std::set<std::string> seen_dir;
  for (const auto& d : raw.orientations) {
    if (!known.count(d.variable))
      add(Violation::Kind::unknown_orientation, "orientation for unknown variable '" + d.variable + "'", {d.variable},
          d.loc.line);
    else if (!seen_dir.insert(d.variable).second)
      add(Violation::Kind::duplicate_orientation, "orientation of '" + d.variable + "' declared twice", {d.variable},
          d.loc.line);
  }
  for (const auto& o : raw.outputs)
    if (!known.count(o.target))
      add(Violation::Kind::unknown_output, "output refers to unknown element or source '" + o.target + "'", {o.target},
          o.loc.line);

  Netlist net = apply_orientations(raw);

  // Terminal incidence per (domain, node): owner name and polarity.
  struct Terminal {
    std::string owner;
    bool plus;
    bool element;
  };
  std::map<std::pair<Domain, std::string>, std::vector<Terminal>> terminals;
  std::map<std::string, std::set<Domain>> node_domains;
  std::map<std::string, int> owner_line;
  auto attach = [&](Domain d, const std::string& n, const std::string& owner, bool plus, bool element) {
    terminals[{d, n}].push_back({owner, plus, element});
    if (n != kReferenceNode) node_domains[n].insert(d);
  };
  auto self_loop = [&](const std::string& a, const std::string& b, const std::string& owner, int line) {
    if (a == b) add(Violation::Kind::self_loop, "'" + owner + "' connects node '" + a + "' to itself", {owner}, line);
  };

  for (const auto& e : net.elements) {
    self_loop(e.node_plus, e.node_minus, e.name, e.loc.line);
    attach(e.domain, e.node_plus, e.name, true, true);
    attach(e.domain, e.node_minus, e.name, false, true);
    owner_line[e.name] = e.loc.line;
  }
  for (const auto& s : net.sources) {
    self_loop(s.node_plus, s.node_minus, s.name, s.loc.line);
    attach(s.domain, s.node_plus, s.name, true, false);
    attach(s.domain, s.node_minus, s.name, false, false);
    owner_line[s.name] = s.loc.line;
  }
  for (const auto& c : net.couplings) {
    for (const auto* port : {&c.port_a, &c.port_b}) {
      self_loop(port->node_plus, port->node_minus, c.name, c.loc.line);
      attach(port->domain, port->node_plus, c.name, true, false);
      attach(port->domain, port->node_minus, c.name, false, false);
    }
    owner_line[c.name] = c.loc.line;
  }

  for (const auto& [node, doms] : node_domains) {
    if (doms.size() < 2) continue;
    std::string list;
    std::vector<std::string> owners;
    for (Domain d : doms) {
      list += std::string(list.empty() ? "" : ", ") + domain_keyword(d);
      for (const auto& t : terminals[{d, node}]) owners.push_back(t.owner);
    }
    add(Violation::Kind::domain_mismatch, "node '" + node + "' is used in several domains (" + list + ")", owners, 0);
  }

  for (const auto& [key, ts] : terminals) {
    if (key.second == kReferenceNode) continue;
    if (ts.size() < 2) {
      add(Violation::Kind::dangling_node,
          "dangling node '" + key.second + "' (" + domain_keyword(key.first) + ") reached only by '" + ts[0].owner + "'",
          {ts[0].owner}, owner_line[ts[0].owner]);
      continue;
    }
    // Two elements meeting at a plain node carry the same through variable.
    if (ts.size() == 2 && ts[0].element && ts[1].element && ts[0].plus == ts[1].plus) {
      add(Violation::Kind::series_orientation,
          "series elements '" + ts[0].owner + "' and '" + ts[1].owner + "' declare opposite positive directions at node '" +
              key.second + "'",
          {ts[0].owner, ts[1].owner}, owner_line[ts[1].owner]);
    }
  }

  for (std::size_t i = 0; i < net.elements.size(); ++i)
    for (std::size_t j = i + 1; j < net.elements.size(); ++j) {
      const auto& a = net.elements[i];
      const auto& b = net.elements[j];
      if (a.domain != b.domain) continue;
      if (a.node_plus == b.node_minus && a.node_minus == b.node_plus && a.node_plus != a.node_minus)
        add(Violation::Kind::parallel_orientation,
            "parallel elements '" + a.name + "' and '" + b.name + "' declare opposite positive directions",
            {a.name, b.name}, b.loc.line);
    }
  return rep;
}

}  // namespace pogc
