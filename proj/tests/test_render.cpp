#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "support/common.hpp"
#include "support/oracles.hpp"

using namespace pogc;
using testing_support::derive_fixture;

namespace {

int count_class(const oracle::DotGraph& g, const std::string& cls) {
  int k = 0;
  for (const auto& [id, attrs] : g.nodes) {
    auto it = attrs.find("class");
    if (it != attrs.end() && it->second == cls) ++k;
  }
  return k;
}

}  // namespace

TEST_CASE("DOT output parses and counts blocks") {
  struct Case {
    const char* file;
    int eb, cb;
  };
  for (Case c : {Case{"electrical_fig10.pog", 6, 0}, Case{"motor_pump.pog", 6, 2}, Case{"clutch.pog", 5, 1},
                 Case{"hydraulic_nested.pog", 8, 0}}) {
    INFO(c.file);
    auto d = derive_fixture(c.file);
    auto g = oracle::parse_dot(render_dot(d.scheme));
    CHECK(count_class(g, "eb") == c.eb);
    CHECK(count_class(g, "cb") == c.cb);
    CHECK(count_class(g, "sn") == static_cast<int>(d.scheme.nodes.size()));
    CHECK(count_class(g, "input") == static_cast<int>(d.scheme.inputs.size()));
    CHECK(count_class(g, "output") == static_cast<int>(d.scheme.outputs.size()));
    CHECK(count_class(g, "section") == static_cast<int>(d.scheme.sections.size()));
    // Every edge joins declared nodes.
    for (const auto& [a, b] : g.edges) {
      CHECK(g.nodes.count(a) == 1);
      CHECK(g.nodes.count(b) == 1);
    }
  }
}

TEST_CASE("nested groups become clusters") {
  auto d = derive_fixture("hydraulic_nested.pog");
  auto g = oracle::parse_dot(render_dot(d.scheme));
  CHECK(g.subgraphs == 1);
  auto flat = derive_fixture("electrical_fig10.pog");
  CHECK(oracle::parse_dot(render_dot(flat.scheme)).subgraphs == 0);
}

TEST_CASE("empty scheme renders an empty graph") {
  PogScheme s;
  auto g = oracle::parse_dot(render_dot(s));
  CHECK(g.nodes.empty());
  CHECK(g.edges.empty());
}

TEST_CASE("matrices text and LaTeX") {
  auto d = derive_fixture("clutch.pog");
  std::string t = matrices_text(*d.model);
  CHECK(t.find("-R_v") != std::string::npos);
  CHECK(t.find("1/K_m") != std::string::npos);
  std::string n = matrices_text(*d.model, false);
  CHECK(n.find("1/K_m") == std::string::npos);
  CHECK(n.find("-1e-09") != std::string::npos);
  std::string l = render_latex(*d.model);
  CHECK(l.find("\\begin{equation}") == 0);
  CHECK(l.find("\\frac{1}{K_{m}}") != std::string::npos);
  CHECK(l.find("\\dot{P_{C,m}}") != std::string::npos);
  // \left\{ is the one unpaired brace
  CHECK(std::count(l.begin(), l.end(), '{') == std::count(l.begin(), l.end(), '}') + 1);
}

TEST_CASE("report files") {
  auto d = derive_fixture("motor_pump.pog");
  auto checks = check_derivation(d);
  auto r = export_report(*d.model, &d.scheme, checks, std::string("traj.csv"));
  auto j = Json::parse(r.json);
  CHECK(j["trajectory_csv"] == "traj.csv");
  CHECK(j["checks"]["all_ok"] == true);
  CHECK(j["states"].size() == 3);
  auto dir = std::filesystem::temp_directory_path() / "pogc_render_test";
  std::filesystem::remove_all(dir);
  auto files = write_report(r, dir, "mp");
  CHECK(files.size() == 4);
  for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("steps, sections and plot script") {
  auto d = derive_fixture("electrical_fig10.pog");
  std::string s = steps_text(d.scheme);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(d.scheme.trace.size() + d.scheme.flags.size()));
  std::string tab = sections_table(d.scheme);
  CHECK(tab.rfind("section", 0) == 0);
  CHECK(std::count(tab.begin(), tab.end(), '\n') == static_cast<long>(d.scheme.sections.size() + 1));
  std::string py = plot_script("run.csv");
  CHECK(py.find("\"run.csv\"") != std::string::npos);
  CHECK(py.find("import matplotlib") != std::string::npos);
}

TEST_CASE("checks text") {
  auto d = derive_text(read_text_file(testing_support::fixture("resistor_ring.pog")), false);
  auto rep = check_derivation(d);
  CHECK_FALSE(rep.ok());
  std::string t = checks_text(rep);
  CHECK(t.find("FAIL algebraic_loops") != std::string::npos);
  CHECK(t.find("n/a  energy_matrix") != std::string::npos);
  auto j = checks_json(rep);
  CHECK(j["all_ok"] == false);
  CHECK(j["algebraic_loops"]["loops"].size() >= 1);
}
