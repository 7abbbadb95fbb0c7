// pogc: derive, simulate, check and reduce power-oriented graph models.
// Exit codes: 0 success, 1 usage or IO or syntax, 2 model diagnostics.

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pogc/pogc.hpp"

namespace fs = std::filesystem;
using namespace pogc;

namespace {

constexpr int kOk = 0, kUsage = 1, kModel = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------- diagnostics

struct Context {
  std::string path;
  std::optional<Netlist> net;
};

std::optional<SourceLoc> locate(const Netlist& net, std::string name) {
  auto try_name = [&](const std::string& n) -> std::optional<SourceLoc> {
    if (auto e = net.find_element(n)) return e->loc;
    if (auto s = net.find_source(n)) return s->loc;
    if (auto c = net.find_coupling(n)) return c->loc;
    return std::nullopt;
  };
  if (auto l = try_name(name)) return l;
  // State and input labels look like v_C1.
  auto us = name.find('_');
  if (us != std::string::npos) return try_name(name.substr(us + 1));
  return std::nullopt;
}

int report_model_error(const Context& ctx, const ModelError& e) {
  std::optional<SourceLoc> where;
  if (ctx.net)
    for (const auto& s : e.subjects())
      if ((where = locate(*ctx.net, s))) break;
  std::cerr << ctx.path << ":";
  if (where) std::cerr << where->line << ":" << where->column << ":";
  std::cerr << " error: " << e.what() << "\n";
  if (ctx.net)
    for (const auto& s : e.subjects()) {
      auto l = locate(*ctx.net, s);
      if (l && (!where || l->line != where->line)) std::cerr << ctx.path << ":" << l->line << ":" << l->column << ": note: " << s << "\n";
    }
  return kModel;
}

template <class F>
int guarded(Context& ctx, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::string msg = e.what();
    auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    std::cerr << ctx.path << ":" << e.line() << ":" << e.column() << ": error: " << msg << "\n";
    return kUsage;
  } catch (const ModelError& e) {
    return report_model_error(ctx, e);
  } catch (const UsageError& e) {
    std::cerr << "pogc: error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << (ctx.path.empty() ? std::string("pogc") : ctx.path) << ": error: " << e.what() << "\n";
    return kUsage;
  }
}

// --------------------------------------------------------------- helpers

sym::ParamMap parse_params(const std::vector<std::string>& items) {
  sym::ParamMap out;
  for (const auto& s : items) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got '" + s + "'");
    auto v = detail::parse_real(s.substr(eq + 1));
    if (!v) throw UsageError("--param value is not a number: '" + s + "'");
    out[s.substr(0, eq)] = *v;
  }
  return out;
}

SignalSpec parse_signal_text(const std::string& text) {
  auto toks = detail::tokenize_line(text);
  if (toks.size() != 1) throw UsageError("bad signal '" + text + "'");
  detail::LineParser p(toks, 1);
  try {
    return parse_signal(p, 0);
  } catch (const ParseError& e) {
    throw UsageError(std::string("bad signal '") + text + "': " + e.what());
  }
}

struct Loaded {
  std::optional<Derivation> derivation;  // netlists only
  PogStateSpace model;
  fs::path base;
};

Loaded load_model(Context& ctx, const sym::ParamMap& params, bool need_model = true) {
  Loaded l;
  l.base = fs::path(ctx.path).parent_path();
  std::string text = read_text_file(ctx.path);
  if (is_model_json(ctx.path)) {
    l.model = model_from_json_text(text);
  } else {
    ctx.net = parse_netlist(text);
    l.derivation = derive_netlist(*ctx.net, need_model);
    if (l.derivation->model) l.model = *l.derivation->model;
  }
  if (!params.empty()) {
    l.model = apply_params(l.model, params);
    if (l.derivation && l.derivation->model) l.derivation->model = l.model;
  }
  return l;
}

std::string extension_for(const std::string& kind) {
  if (kind == "dot") return ".dot";
  if (kind == "latex") return ".tex";
  if (kind == "json") return ".json";
  return ".txt";
}

// One emission: to stdout, to --out as a file, or with several kinds to
// --out as a directory holding <stem>.<kind><ext>.
void write_emissions(const std::vector<std::pair<std::string, std::string>>& parts, const std::optional<std::string>& out,
                     const std::string& stem) {
  if (!out) {
    for (const auto& [k, text] : parts) std::cout << text;
    return;
  }
  if (parts.size() == 1) {
    write_text_file(*out, parts[0].second);
    return;
  }
  std::error_code ec;
  fs::create_directories(*out, ec);
  if (ec) throw std::runtime_error("cannot create '" + *out + "': " + ec.message());
  // Text kinds share .txt, so they keep the kind in the name.
  for (const auto& [k, text] : parts) {
    std::string ext = extension_for(k);
    write_text_file(fs::path(*out) / (stem + (ext == ".txt" ? "." + k : "") + ext), text);
  }
}

// ---------------------------------------------------------------- derive

struct DeriveOpts {
  std::string path;
  std::vector<std::string> emit, params;
  std::optional<std::string> out;
  bool numeric = false;
};

int cmd_derive(const DeriveOpts& o) {
  Context ctx{o.path, {}};
  return guarded(ctx, [&] {
    std::vector<std::string> kinds = o.emit.empty() ? std::vector<std::string>{"matrices"} : o.emit;
    auto l = load_model(ctx, parse_params(o.params));
    const PogScheme* scheme = l.derivation ? &l.derivation->scheme : nullptr;
    std::vector<std::pair<std::string, std::string>> parts;
    for (const auto& k : kinds) {
      if (!scheme && (k == "dot" || k == "steps" || k == "sections"))
        throw UsageError("--emit " + k + " needs a netlist, not a model file");
      if (k == "matrices") parts.emplace_back(k, matrices_text(l.model, !o.numeric));
      else if (k == "json") parts.emplace_back(k, dump_json(report_json(l.model, nullptr, !o.numeric)));
      else if (k == "latex") parts.emplace_back(k, render_latex(l.model));
      else if (k == "dot") parts.emplace_back(k, render_dot(*scheme));
      else if (k == "steps") parts.emplace_back(k, steps_text(*scheme));
      else if (k == "sections") parts.emplace_back(k, sections_table(*scheme));
    }
    write_emissions(parts, o.out, fs::path(o.path).stem().string());
    return kOk;
  });
}

// -------------------------------------------------------------- simulate

struct SimOpts {
  std::string path;
  double t_end = 1.0, dt = 1e-5;
  std::string method = "rk4";
  std::optional<std::string> out;
  std::vector<std::string> params, inputs, x0, param_files;
  std::size_t record_every = 1;
  bool plot = false;
  unsigned jobs = 1;
};

InputSet build_inputs(const Loaded& l, const SimOpts& o) {
  InputSet u;
  if (l.derivation) {
    u = netlist_inputs(*l.derivation, l.base);
  } else {
    for (Eigen::Index k = 0; k < l.model.m(); ++k) u.signals.push_back(InputSignal::constant(0.0));
  }
  for (const auto& item : o.inputs) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--input expects name=signal, got '" + item + "'");
    std::string name = item.substr(0, eq);
    const auto& labels = l.model.input_labels;
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end()) throw UsageError("no input named '" + name + "'");
    u.signals[static_cast<std::size_t>(it - labels.begin())] = signal_from_spec(parse_signal_text(item.substr(eq + 1)), l.base);
  }
  return u;
}

Eigen::VectorXd build_x0(const PogStateSpace& ss, const std::vector<std::string>& items) {
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(ss.n());
  for (const auto& [name, v] : parse_params(items)) {
    auto it = std::find(ss.state_labels.begin(), ss.state_labels.end(), name);
    if (it == ss.state_labels.end()) throw UsageError("no state named '" + name + "'");
    x0(it - ss.state_labels.begin()) = v;
  }
  return x0;
}

SimConfig sim_config(const SimOpts& o) {
  SimConfig cfg;
  cfg.dt = o.dt;
  cfg.t_end = o.t_end;
  cfg.method = o.method == "trap" ? Method::trapezoidal : Method::rk4;
  cfg.record_every = o.record_every;
  return cfg;
}

void write_trajectory(const Trajectory& tr, const std::optional<std::string>& out, bool plot) {
  if (!out) {
    write_csv(std::cout, tr);
    return;
  }
  std::ofstream os(*out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + *out + "'");
  write_csv(os, tr);
  if (!os) throw std::runtime_error("write failed for '" + *out + "'");
  if (plot) {
    fs::path script = fs::path(*out).replace_extension(".plot.py");
    write_text_file(script, plot_script(fs::path(*out).filename().string()));
  }
}

sym::ParamMap read_param_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(1, static_cast<int>(e.byte), "invalid JSON in '" + path + "'");
  }
  if (!j.is_object()) throw UsageError("parameter file '" + path + "' must hold a JSON object");
  sym::ParamMap p;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw UsageError("parameter '" + k + "' in '" + path + "' is not a number");
    p[k] = v.get<double>();
  }
  return p;
}

int cmd_simulate(const SimOpts& o) {
  Context ctx{o.path, {}};
  return guarded(ctx, [&] {
    if (o.jobs > 1 && o.param_files.empty()) throw UsageError("--jobs is only allowed with --param-file");
    auto base_params = parse_params(o.params);
    auto l = load_model(ctx, base_params);
    SimConfig cfg = sim_config(o);
    InputSet u = build_inputs(l, o);
    Eigen::VectorXd x0 = build_x0(l.model, o.x0);

    if (o.param_files.empty()) {
      auto tr = simulate(l.model, u, x0, cfg);
      write_trajectory(tr, o.out, o.plot);
      if (o.out)
        std::cerr << "wrote " << *o.out << " (" << tr.size() << " samples, max power-balance residual "
                  << format_real(tr.max_balance_residual) << ")\n";
      return kOk;
    }

    // Batch: one run per parameter file, written next to --out.
    if (!o.out) throw UsageError("batch simulation needs --out");
    std::vector<sym::ParamMap> sets;
    for (const auto& f : o.param_files) sets.push_back(read_param_file(f));
    std::vector<std::string> errors(sets.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k; (k = next++) < sets.size();) {
        try {
          auto model = apply_params(l.model, sets[k]);
          fs::path out = fs::path(*o.out);
          out.replace_filename(out.stem().string() + "." + fs::path(o.param_files[k]).stem().string() + out.extension().string());
          write_trajectory(simulate(model, u, x0, cfg), out.string(), o.plot);
        } catch (const std::exception& e) {
          errors[k] = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    unsigned n = std::min<unsigned>(o.jobs, static_cast<unsigned>(sets.size()));
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    int rc = kOk;
    for (std::size_t k = 0; k < errors.size(); ++k)
      if (!errors[k].empty()) {
        std::cerr << o.param_files[k] << ": error: " << errors[k] << "\n";
        rc = kModel;
      }
    return rc;
  });
}

// ----------------------------------------------------------------- check

struct CheckOpts {
  std::string path;
  std::optional<std::string> flip;
  std::optional<std::uint64_t> seed;
  std::size_t count = 100;
  bool json = false;
};

int finish_check(const CheckReport& rep, bool json) {
  std::cout << (json ? dump_json(checks_json(rep)) : checks_text(rep));
  if (rep.ok()) return kOk;
  for (const auto& i : rep.items)
    if (!i.ok) {
      std::cerr << "error: " << i.name << " failed: " << i.detail << "\n";
      for (const auto& s : i.subjects) {
        if (i.name == "loop_parity") std::cerr << "  even-parity loop: " << s << "\n";
        else if (i.name == "algebraic_loops") std::cerr << "  algebraic loop: " << s << "\n";
        else std::cerr << "  " << s << "\n";
      }
    }
  return kModel;
}

int check_random(const CheckOpts& o) {
  RandomNetlist gen(*o.seed);
  std::size_t accepted = 0, rejected = 0;
  for (std::size_t k = 0; k < o.count; ++k) {
    std::string text = gen.generate();
    Derivation d;
    try {
      d = derive_text(text);
    } catch (const ModelError&) {
      ++rejected;  // outside the series-parallel causal class
      continue;
    }
    ++accepted;
    auto rep = check_derivation(d);
    if (!rep.ok()) {
      std::cerr << "netlist " << k << " (seed " << *o.seed << ") fails:\n" << text << checks_text(rep);
      return kModel;
    }
  }
  std::cout << "seed " << *o.seed << ": " << accepted << " netlists checked, " << rejected << " rejected by derivation\n";
  return kOk;
}

int cmd_check(const CheckOpts& o) {
  Context ctx{o.path, {}};
  return guarded(ctx, [&] {
    if (o.seed) return check_random(o);
    if (o.path.empty()) throw UsageError("check needs a path or --seed");
    auto l = load_model(ctx, {}, false);
    if (!l.derivation) {
      if (o.flip) throw UsageError("--flip-sign needs a netlist");
      return finish_check(run_checks(nullptr, nullptr, &l.model), o.json);
    }
    const Derivation& d = *l.derivation;
    PogScheme scheme = d.scheme;
    if (o.flip) {
      auto colon = o.flip->find(':');
      if (colon == std::string::npos) throw UsageError("--flip-sign expects node:input");
      std::size_t node = 0, input = 0;
      try {
        node = std::stoul(o.flip->substr(0, colon));
        input = std::stoul(o.flip->substr(colon + 1));
      } catch (const std::exception&) {
        throw UsageError("--flip-sign expects node:input");
      }
      if (node >= scheme.nodes.size() || input >= scheme.nodes[node].inputs.size())
        throw UsageError("--flip-sign " + *o.flip + " is out of range");
      scheme = flip_node_sign(scheme, node, input);
    }
    return finish_check(run_checks(&d.chain, &scheme, d.model ? &*d.model : nullptr), o.json);
  });
}

// ---------------------------------------------------------------- reduce

struct ReduceOpts {
  std::string path;
  std::optional<std::string> eliminate, transform, out;
  std::string limit = "zero";
  std::optional<double> t;
  std::vector<std::string> emit, params;
};

Eigen::MatrixXd numeric_matrix(const Json& j, const sym::ParamMap& params, const std::string& what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ModelError(ErrorCode::InvalidModel, what + " must be a matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != j[0].size()) throw ModelError(ErrorCode::InvalidModel, what + " has ragged rows");
    for (std::size_t c = 0; c < j[i].size(); ++c)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = detail::entry_poly(j[i][c]).eval(params);
  }
  return m;
}

// Piecewise-linear interpolation of sampled matrices.
MatrixOfTime sampled(std::vector<double> ts, std::vector<Eigen::MatrixXd> ms) {
  return [ts = std::move(ts), ms = std::move(ms)](double t) -> Eigen::MatrixXd {
    if (t <= ts.front()) return ms.front();
    if (t >= ts.back()) return ms.back();
    auto k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    double w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
    return (1 - w) * ms[k - 1] + w * ms[k];
  };
}

CongruentTransform read_transform(const std::string& path, const PogStateSpace& ss) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ParseError(1, static_cast<int>(e.byte), "invalid JSON in '" + path + "'");
  }
  CongruentTransform tr;
  try {
    if (j.contains("labels")) tr.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("Tu")) tr.Tu = numeric_matrix(j.at("Tu"), ss.params, "Tu");
    if (j.contains("samples")) {
      const auto& s = j.at("samples");
      std::vector<double> ts;
      std::vector<Eigen::MatrixXd> Ts, Tds;
      for (const auto& row : s) {
        ts.push_back(row.at("t").get<double>());
        Ts.push_back(numeric_matrix(row.at("T"), ss.params, "T"));
        if (row.contains("Tdot")) Tds.push_back(numeric_matrix(row.at("Tdot"), ss.params, "Tdot"));
      }
      if (ts.empty() || !std::is_sorted(ts.begin(), ts.end()))
        throw ModelError(ErrorCode::InvalidModel, "transform samples need increasing times");
      if (!Tds.empty() && Tds.size() != Ts.size())
        throw ModelError(ErrorCode::MissingTdot, "Tdot given for some samples only");
      tr.T_of = sampled(ts, Ts);
      if (!Tds.empty()) tr.Tdot_of = sampled(ts, Tds);
      tr.finite_difference_fallback = !j.value("require_tdot", false);
    } else {
      tr.T = numeric_matrix(j.at("T"), ss.params, "T");
      if (!ss.time_variant() && ss.symbolic) {
        bool any_string = false;
        sym::SymMatrix Ts, Tus;
        Eigen::MatrixXd dummy;
        detail::read_matrix(j, "T", static_cast<std::size_t>(tr.T.rows()), static_cast<std::size_t>(tr.T.cols()), Ts, dummy,
                            any_string);
        tr.T_sym = Ts;
        if (j.contains("Tu")) {
          detail::read_matrix(j, "Tu", static_cast<std::size_t>(tr.Tu.rows()), static_cast<std::size_t>(tr.Tu.cols()), Tus,
                              dummy, any_string);
          tr.Tu_sym = Tus;
        }
      }
    }
  } catch (const Json::exception& e) {
    throw ModelError(ErrorCode::InvalidModel, std::string("malformed transform JSON: ") + e.what());
  }
  return tr;
}

int cmd_reduce(const ReduceOpts& o) {
  Context ctx{o.path, {}};
  return guarded(ctx, [&] {
    if (o.eliminate.has_value() == o.transform.has_value()) throw UsageError("reduce needs exactly one of --eliminate, --transform");
    auto l = load_model(ctx, parse_params(o.params));
    PogStateSpace reduced;
    TransformReport rep;
    if (o.eliminate) {
      auto e = eliminate_degenerate_state(l.model, *o.eliminate, o.limit == "inf" ? Limit::infinity : Limit::zero);
      reduced = e.model;
      rep = e.report;
    } else {
      auto tr = read_transform(*o.transform, l.model);
      std::optional<double> t = o.t;
      if (tr.time_varying() && !t) t = 0.0;
      reduced = apply_congruent(l.model, tr, t, &rep);
    }
    for (const auto& w : rep.warnings) std::cerr << o.path << ": warning: " << w << "\n";
    std::vector<std::string> kinds = o.emit.empty() ? std::vector<std::string>{"matrices"} : o.emit;
    std::vector<std::pair<std::string, std::string>> parts;
    for (const auto& k : kinds) {
      if (k == "matrices") parts.emplace_back(k, matrices_text(reduced));
      else if (k == "json") parts.emplace_back(k, dump_json(report_json(reduced)));
      else if (k == "latex") parts.emplace_back(k, render_latex(reduced));
    }
    write_emissions(parts, o.out, fs::path(o.path).stem().string() + ".reduced");
    return kOk;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-oriented graph modelling of physical systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pogc 1.0");

  DeriveOpts d;
  auto* derive = app.add_subcommand("derive", "derive the POG state-space model of a netlist");
  derive->add_option("path", d.path, "netlist (.pog) or model (.json)")->required();
  derive->add_option("--emit", d.emit, "artifact to print, repeatable")
      ->check(CLI::IsMember({"matrices", "dot", "latex", "steps", "sections", "json"}));
  derive->add_option("--out", d.out, "output file, or directory when several --emit are given");
  derive->add_option("--param", d.params, "override a coefficient, name=value");
  derive->add_flag("--numeric", d.numeric, "print evaluated numbers instead of symbolic entries");

  SimOpts s;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate a netlist or model file");
  simulate_cmd->add_option("path", s.path, "netlist (.pog) or model (.json)")->required();
  simulate_cmd->add_option("--t-end", s.t_end, "end time [s]")->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--dt", s.dt, "time step [s]")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--method", s.method, "integrator")->check(CLI::IsMember({"rk4", "trap"}));
  simulate_cmd->add_option("--out", s.out, "CSV file (stdout if absent)");
  simulate_cmd->add_option("--param", s.params, "override a coefficient, name=value");
  simulate_cmd->add_option("--input", s.inputs, "replace an input signal, name=const:v|step:v@t|sin:a,f,p|csv:file");
  simulate_cmd->add_option("--x0", s.x0, "initial state, label=value");
  simulate_cmd->add_option("--record-every", s.record_every, "keep every k-th step")->check(CLI::PositiveNumber);
  simulate_cmd->add_flag("--plot", s.plot, "also write a matplotlib script next to the CSV");
  simulate_cmd->add_option("--param-file", s.param_files, "JSON object of parameters; one run per file");
  simulate_cmd->add_option("--jobs", s.jobs, "parallel runs for --param-file batches")->check(CLI::PositiveNumber);

  CheckOpts c;
  auto* check = app.add_subcommand("check", "run loop-parity, energy, algebraic-loop and oracle checks");
  check->add_option("path", c.path, "netlist (.pog) or model (.json)");
  check->add_option("--seed", c.seed, "check randomly generated netlists instead of a file");
  check->add_option("--count", c.count, "random netlists to generate")->check(CLI::PositiveNumber);
  check->add_flag("--json", c.json, "print the report as JSON");
  check->add_option("--flip-sign", c.flip, "negate summation-node input node:k before checking")->group("");

  ReduceOpts r;
  auto* reduce = app.add_subcommand("reduce", "apply a congruent transformation or eliminate a degenerate state");
  reduce->add_option("path", r.path, "netlist (.pog) or model (.json)")->required();
  reduce->add_option("--eliminate", r.eliminate, "state label to eliminate");
  reduce->add_option("--limit", r.limit, "limit of its energy coefficient")->check(CLI::IsMember({"zero", "inf"}));
  reduce->add_option("--transform", r.transform, "JSON file with T, Tu, labels, optional samples");
  reduce->add_option("--t", r.t, "evaluation time for time-varying models and transforms");
  reduce->add_option("--emit", r.emit, "artifact to print, repeatable")->check(CLI::IsMember({"matrices", "json", "latex"}));
  reduce->add_option("--out", r.out, "output file, or directory when several --emit are given");
  reduce->add_option("--param", r.params, "override a coefficient, name=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*derive) return cmd_derive(d);
  if (*simulate_cmd) return cmd_simulate(s);
  if (*check) return cmd_check(c);
  if (*reduce) return cmd_reduce(r);
  return kUsage;
}
