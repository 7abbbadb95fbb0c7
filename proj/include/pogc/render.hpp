#pragma once

// Text artifacts: DOT block schemes, matrix reports, LaTeX, FMPOG trace,
// plot scripts.

#include <Eigen/Dense>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pogc/checks.hpp"
#include "pogc/model_json.hpp"
#include "pogc/pogir.hpp"
#include "pogc/statespace.hpp"

namespace pogc {

// ------------------------------------------------------------------- DOT

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string circled(int k) {
  static const char* digits[] = {"①", "②", "③", "④", "⑤", "⑥", "⑦", "⑧", "⑨", "⑩",
                                 "⑪", "⑫", "⑬", "⑭", "⑮", "⑯", "⑰", "⑱", "⑲", "⑳"};
  if (k >= 1 && k <= 20) return digits[k - 1];
  return "(" + std::to_string(k) + ")";
}

}  // namespace detail

inline std::string render_dot(const PogScheme& s) {
  std::ostringstream os;
  os << "digraph pog {\n";
  os << "  rankdir=LR;\n";
  os << "  node [fontname=\"Helvetica\", fontsize=10];\n";
  os << "  edge [fontname=\"Helvetica\", fontsize=9];\n";
  if (s.blocks.empty() && s.nodes.empty()) {
    os << "}\n";
    return os.str();
  }

  // Where each signal comes from: "node:port".
  std::vector<std::string> producer(s.signals.size());
  std::vector<bool> across_line(s.signals.size(), true);
  for (std::size_t i = 0; i < s.signals.size(); ++i) across_line[i] = s.signals[i].across;

  for (std::size_t k = 0; k < s.inputs.size(); ++k) {
    const auto& in = s.inputs[k];
    std::string id = "in" + std::to_string(k + 1);
    os << "  " << id << " [shape=plaintext, class=\"input\", label=\"" << detail::dot_escape(in.label) << "\"];\n";
    if (!in.ref.zero()) producer[static_cast<std::size_t>(in.ref.id)] = id;
  }

  std::map<std::string, std::vector<std::string>> clusters;  // group -> node lines
  std::vector<std::string> top;
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    const auto& b = s.blocks[i];
    std::string id = "b" + std::to_string(i + 1);
    std::ostringstream line;
    if (b.variant == BlockVariant::elaboration) {
      line << id << " [shape=box, class=\"eb\", label=\"" << detail::dot_escape(b.id) << "\\n"
           << detail::dot_escape(b.gain_text()) << "\"";
      if (b.integral) line << ", style=bold";
      line << "];";
      producer[static_cast<std::size_t>(b.out)] = id;
    } else {
      std::string g = detail::dot_escape(b.gain.str());
      line << id << " [shape=record, class=\"cb\", label=\"{<f> " << g << "|<b> " << g << "ᵀ}\", xlabel=\""
           << detail::dot_escape(b.id) << "\"];";
      producer[static_cast<std::size_t>(b.out_fwd)] = id + ":f";
      producer[static_cast<std::size_t>(b.out_bwd)] = id + ":b";
    }
    (b.group.empty() ? top : clusters[b.group]).push_back(line.str());
  }
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const auto& n = s.nodes[i];
    std::string id = "n" + std::to_string(i + 1);
    std::ostringstream line;
    std::string signs;
    for (const auto& r : n.inputs) signs += r.sign < 0 ? '-' : '+';
    line << id << " [shape=circle, class=\"sn\", width=0.3, fixedsize=true, label=\"" << signs << "\", xlabel=\"" << n.id
         << "\"];";
    producer[static_cast<std::size_t>(n.output)] = id;
    (n.group.empty() ? top : clusters[n.group]).push_back(line.str());
  }
  for (const auto& l : top) os << "  " << l << "\n";
  int ci = 0;
  for (const auto& [g, lines] : clusters) {
    os << "  subgraph cluster_" << ++ci << " {\n";
    os << "    label=\"" << detail::dot_escape(g) << "\";\n";
    os << "    style=dashed;\n";
    for (const auto& l : lines) os << "    " << l << "\n";
    os << "  }\n";
  }

  // Power sections: dashed separators in section order.
  std::vector<int> secs;
  for (const auto& p : s.sections) secs.push_back(p.index);
  std::sort(secs.begin(), secs.end());
  for (int k : secs)
    os << "  sec" << k << " [shape=plaintext, class=\"section\", label=\"" << detail::circled(k) << "\"];\n";
  for (std::size_t k = 1; k < secs.size(); ++k)
    os << "  sec" << secs[k - 1] << " -> sec" << secs[k] << " [style=dashed, arrowhead=none];\n";

  // One rank per section: marker, then the upper line, then the lower line.
  // The across line is upper unless a gyrator swapped it for the segment.
  std::map<int, std::size_t> seg_of;
  for (const auto& p : s.sections) seg_of[p.index] = p.segment;
  auto upper = [&](int section, int sig) {
    auto it = seg_of.find(section);
    bool au = it == seg_of.end() || it->second >= s.across_upper.size() || s.across_upper[it->second];
    return across_line[static_cast<std::size_t>(sig)] == au;
  };
  std::map<int, std::pair<std::vector<std::string>, std::vector<std::string>>> rank;
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    const auto& b = s.blocks[i];
    int sig = b.variant == BlockVariant::elaboration ? b.out : b.out_fwd;
    auto& r = rank[b.section];
    (upper(b.section, sig) ? r.first : r.second).push_back("b" + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const auto& n = s.nodes[i];
    auto& r = rank[n.section];
    (upper(n.section, n.output) ? r.first : r.second).push_back("n" + std::to_string(i + 1));
  }
  for (const auto& [k, r] : rank) {
    os << "  { rank=same;";
    if (seg_of.count(k)) os << " sec" << k << ";";
    for (const auto& x : r.first) os << " " << x << ";";
    for (const auto& x : r.second) os << " " << x << ";";
    os << " }\n";
  }

  auto edge = [&](const SignalRef& r, const std::string& to) {
    if (r.zero()) return;
    const std::string& from = producer[static_cast<std::size_t>(r.id)];
    if (from.empty()) return;
    os << "  " << from << " -> " << to << " [label=\"" << (r.sign < 0 ? "-" : "")
       << detail::dot_escape(s.signals[static_cast<std::size_t>(r.id)].name) << "\"";
    if (!across_line[static_cast<std::size_t>(r.id)]) os << ", style=solid, color=\"gray30\"";
    os << "];\n";
  };
  for (std::size_t i = 0; i < s.nodes.size(); ++i)
    for (const auto& r : s.nodes[i].inputs) edge(r, "n" + std::to_string(i + 1));
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    const auto& b = s.blocks[i];
    std::string id = "b" + std::to_string(i + 1);
    if (b.variant == BlockVariant::elaboration) {
      edge(b.in, id);
    } else {
      edge(b.in_fwd, id + ":f");
      edge(b.in_bwd, id + ":b");
    }
  }
  for (std::size_t k = 0; k < s.outputs.size(); ++k) {
    std::string id = "out" + std::to_string(k + 1);
    os << "  " << id << " [shape=plaintext, class=\"output\", label=\"" << detail::dot_escape(s.outputs[k].label) << "\"];\n";
    edge(s.outputs[k].ref, id);
  }
  os << "}\n";
  return os.str();
}

// --------------------------------------------------------------- matrices

namespace detail {

inline std::vector<std::vector<std::string>> numeric_cells(const Eigen::MatrixXd& m) {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(format_real(m(i, j)));
  return out;
}

inline void text_matrix(std::ostream& os, const std::string& name, const std::vector<std::vector<std::string>>& cells,
                        const std::vector<std::string>& row_labels, const std::vector<std::string>& col_labels) {
  os << name << " (" << cells.size() << "x" << col_labels.size() << ")\n";
  if (cells.empty() || col_labels.empty()) {
    os << "  []\n";
    return;
  }
  std::size_t lw = 0;
  for (const auto& l : row_labels) lw = std::max(lw, l.size());
  std::vector<std::size_t> w(col_labels.size());
  for (std::size_t j = 0; j < col_labels.size(); ++j) {
    w[j] = col_labels[j].size();
    for (const auto& r : cells) w[j] = std::max(w[j], r[j].size());
  }
  auto pad = [](const std::string& s, std::size_t n) { return s + std::string(n > s.size() ? n - s.size() : 0, ' '); };
  os << "  " << pad("", lw);
  for (std::size_t j = 0; j < col_labels.size(); ++j) os << "  " << pad(col_labels[j], w[j]);
  os << "\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    os << "  " << pad(row_labels[i], lw);
    for (std::size_t j = 0; j < cells[i].size(); ++j) os << "  " << pad(cells[i][j], w[j]);
    os << "\n";
  }
}

}  // namespace detail

// Aligned text; named coefficients when the model is symbolic.
inline std::string matrices_text(const PogStateSpace& ss, bool symbolic = true) {
  bool sym = symbolic && ss.symbolic.has_value();
  auto cells = [&](const Eigen::MatrixXd& m, const sym::SymMatrix* s) {
    return sym ? s->strings() : detail::numeric_cells(m);
  };
  const SymbolicModel* sm = sym ? &*ss.symbolic : nullptr;
  std::vector<std::string> dx;
  for (const auto& l : ss.state_labels) dx.push_back("d" + l);
  std::ostringstream os;
  detail::text_matrix(os, "L", cells(ss.L, sm ? &sm->L : nullptr), dx, ss.state_labels);
  detail::text_matrix(os, "A", cells(ss.A, sm ? &sm->A : nullptr), dx, ss.state_labels);
  detail::text_matrix(os, "B", cells(ss.B, sm ? &sm->B : nullptr), dx, ss.input_labels);
  detail::text_matrix(os, "C", cells(ss.C, sm ? &sm->C : nullptr), ss.output_labels, ss.state_labels);
  detail::text_matrix(os, "D", cells(ss.D, sm ? &sm->D : nullptr), ss.output_labels, ss.input_labels);
  if (!ss.hook_name.empty()) os << "time-variant hook: " << ss.hook_name << "\n";
  return os.str();
}

inline Json checks_json(const CheckReport& rep) {
  Json j = Json::object();
  for (const auto& i : rep.items) {
    Json e;
    e["ok"] = i.ok;
    e["applicable"] = i.applicable;
    e["detail"] = i.detail;
    if (!i.subjects.empty()) e["loops"] = i.subjects;
    j[i.name] = e;
  }
  if (rep.energy) {
    j["energy_matrix"]["min_eigenvalue"] = rep.energy->min_eigenvalue;
    j["energy_matrix"]["condition"] = rep.energy->condition;
    j["energy_matrix"]["scaled_condition"] = rep.energy->scaled_condition;
  }
  j["all_ok"] = rep.ok();
  return j;
}

inline Json report_json(const PogStateSpace& ss, const CheckReport* checks = nullptr, bool symbolic = true) {
  Json j = model_to_json(ss, symbolic);
  if (checks) j["checks"] = checks_json(*checks);
  return j;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

// ------------------------------------------------------------------ LaTeX

inline std::string render_latex(const PogStateSpace& ss) {
  bool sym = ss.symbolic.has_value();
  auto body = [&](const Eigen::MatrixXd& m, const sym::SymMatrix* s, std::size_t rows, std::size_t cols) {
    std::ostringstream os;
    if (rows == 0 || cols == 0) return std::string("[\\,]");
    os << "\\begin{bmatrix}\n";
    for (std::size_t i = 0; i < rows; ++i) {
      os << "  ";
      for (std::size_t j = 0; j < cols; ++j) {
        if (j) os << " & ";
        os << (s ? (*s)(i, j).latex() : format_real(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
      }
      os << (i + 1 < rows ? " \\\\\n" : "\n");
    }
    os << "\\end{bmatrix}";
    return os.str();
  };
  auto vec = [](const std::vector<std::string>& labels, bool dot) {
    if (labels.empty()) return std::string("[\\,]");
    std::string s = "\\begin{bmatrix}";
    for (std::size_t i = 0; i < labels.size(); ++i) {
      std::string l = sym::Poly::latex_name(labels[i]);
      s += (i ? " \\\\ " : " ") + (dot ? "\\dot{" + l + "}" : l);
    }
    return s + " \\end{bmatrix}";
  };
  auto n = static_cast<std::size_t>(ss.n()), m = static_cast<std::size_t>(ss.m()), p = static_cast<std::size_t>(ss.p());
  const SymbolicModel* sm = sym ? &*ss.symbolic : nullptr;
  std::ostringstream os;
  os << "\\begin{equation}\n\\left\\{\\begin{aligned}\n";
  os << body(ss.L, sm ? &sm->L : nullptr, n, n) << "\n" << vec(ss.state_labels, true) << " &= "
     << body(ss.A, sm ? &sm->A : nullptr, n, n) << "\n" << vec(ss.state_labels, false) << " + "
     << body(ss.B, sm ? &sm->B : nullptr, n, m) << "\n" << vec(ss.input_labels, false) << " \\\\\n";
  os << vec(ss.output_labels, false) << " &= " << body(ss.C, sm ? &sm->C : nullptr, p, n) << "\n"
     << vec(ss.state_labels, false) << " + " << body(ss.D, sm ? &sm->D : nullptr, p, m) << "\n"
     << vec(ss.input_labels, false) << "\n";
  os << "\\end{aligned}\\right.\n\\end{equation}\n";
  return os.str();
}

// --------------------------------------------------------- trace, tables

inline std::string steps_text(const PogScheme& s) {
  std::ostringstream os;
  for (const auto& l : s.trace) os << l << "\n";
  for (const auto& f : s.flags) os << "note: " << f << "\n";
  return os.str();
}

inline std::string sections_table(const PogScheme& s) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"section", "segment", "across", "through", "left", "right"});
  auto secs = s.sections;
  std::sort(secs.begin(), secs.end(), [](const PowerSection& a, const PowerSection& b) { return a.index < b.index; });
  for (const auto& p : secs)
    rows.push_back({std::to_string(p.index), std::to_string(p.segment + 1), p.across_var, p.through_var, p.left_block,
                    p.right_block});
  std::vector<std::size_t> w(rows[0].size(), 0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < r.size(); ++j) w[j] = std::max(w[j], r[j].size());
  std::ostringstream os;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      os << r[j];
      if (j + 1 < r.size()) os << std::string(w[j] - r[j].size() + 2, ' ');
    }
    os << "\n";
  }
  return os.str();
}

// Matplotlib script plotting every column of a trajectory CSV.
inline std::string plot_script(const std::string& csv_name) {
  std::ostringstream os;
  os << "import csv\n"
        "import sys\n\n"
        "import matplotlib.pyplot as plt\n\n"
        "path = sys.argv[1] if len(sys.argv) > 1 else \""
     << csv_name
     << "\"\n"
        "with open(path) as f:\n"
        "    rows = list(csv.reader(f))\n"
        "head, data = rows[0], [[float(v) for v in r] for r in rows[1:]]\n"
        "t = [r[0] for r in data]\n"
        "skip = {\"E_s\", \"balance_residual\"}\n"
        "fig, (ax, ae) = plt.subplots(2, 1, sharex=True)\n"
        "for k, name in enumerate(head[1:], start=1):\n"
        "    if name not in skip:\n"
        "        ax.plot(t, [r[k] for r in data], label=name)\n"
        "ae.plot(t, [r[head.index(\"E_s\")] for r in data], label=\"E_s\")\n"
        "ax.legend()\n"
        "ae.legend()\n"
        "ae.set_xlabel(\"t [s]\")\n"
        "plt.tight_layout()\n"
        "plt.savefig(path.rsplit(\".\", 1)[0] + \".png\", dpi=150)\n";
  return os.str();
}

// ----------------------------------------------------------------- report

struct Report {
  std::string matrices;  // aligned text
  std::string json;
  std::string steps;
  std::string checks;
  std::optional<std::string> csv_path;
};

inline std::string checks_text(const CheckReport& rep) {
  std::ostringstream os;
  for (const auto& i : rep.items) {
    os << (i.applicable ? (i.ok ? "ok   " : "FAIL ") : "n/a  ") << i.name << ": " << i.detail << "\n";
    for (const auto& s : i.subjects) os << "       " << s << "\n";
  }
  return os.str();
}

inline Report export_report(const PogStateSpace& model, const PogScheme* scheme, const CheckReport& checks,
                            std::optional<std::string> csv_path = {}) {
  Report r;
  r.matrices = matrices_text(model);
  Json j = report_json(model, &checks);
  if (csv_path) j["trajectory_csv"] = *csv_path;
  r.json = dump_json(j);
  r.steps = scheme ? steps_text(*scheme) : std::string();
  r.checks = checks_text(checks);
  r.csv_path = std::move(csv_path);
  return r;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

// Writes <stem>.matrices.txt, <stem>.json, <stem>.steps.txt and <stem>.checks.txt.
inline std::vector<std::filesystem::path> write_report(const Report& r, const std::filesystem::path& dir,
                                                       const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> out{dir / (stem + ".matrices.txt"), dir / (stem + ".json"), dir / (stem + ".checks.txt")};
  write_text_file(out[0], r.matrices);
  write_text_file(out[1], r.json);
  write_text_file(out[2], r.checks);
  if (!r.steps.empty()) {
    out.push_back(dir / (stem + ".steps.txt"));
    write_text_file(out.back(), r.steps);
  }
  return out;
}

}  // namespace pogc
