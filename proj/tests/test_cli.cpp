#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/common.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using testing_support::fixture;

namespace {

struct Run {
  int code;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("pogc_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run_cli(const std::string& args) {
  fs::path o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
  std::string cmd = std::string("\"") + POGC_BIN + "\" " + args + " >\"" + o.string() + "\" 2>\"" + e.string() + "\"";
  int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o), slurp(e)};
}

std::string fx(const std::string& name) { return "\"" + fixture(name) + "\""; }

std::vector<std::vector<double>> read_csv(const std::string& text, std::vector<std::string>* head = nullptr) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (head) {
    std::istringstream h(line);
    std::string c;
    while (std::getline(h, c, ',')) head->push_back(c);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::istringstream r(line);
    std::string c;
    rows.emplace_back();
    while (std::getline(r, c, ',')) rows.back().push_back(std::stod(c));
  }
  return rows;
}

}  // namespace

TEST_CASE("derive prints the motor-pump matrices") {
  auto r = run_cli("derive " + fx("motor_pump.pog") + " --emit matrices");
  CHECK(r.code == 0);
  CHECK(r.out.find("dI_L1  -R1   -K12  0") != std::string::npos);
  CHECK(r.out.find("dw_J2  K12   -b2   -K23") != std::string::npos);
  CHECK(r.out.find("dP_C3  0     K23   -R3") != std::string::npos);
}

TEST_CASE("bridge fails with NonSeriesParallel") {
  auto r = run_cli("derive " + fx("bridge.pog"));
  CHECK(r.code == 2);
  CHECK(r.err.find("NonSeriesParallel") != std::string::npos);
  CHECK(r.err.find("bridge.pog:") != std::string::npos);
}

TEST_CASE("DOT output of the ladder") {
  fs::path out = scratch() / "ladder.dot";
  auto r = run_cli("derive " + fx("electrical_fig10.pog") + " --emit dot --out \"" + out.string() + "\"");
  REQUIRE(r.code == 0);
  auto g = oracle::parse_dot(slurp(out));
  int eb = 0;
  for (const auto& [id, a] : g.nodes)
    if (a.count("class") && a.at("class") == "eb") ++eb;
  CHECK(eb == 6);
}

TEST_CASE("several emissions go to a directory") {
  fs::path dir = scratch() / "multi";
  auto r = run_cli("derive " + fx("clutch.pog") + " --emit matrices --emit json --emit latex --emit steps --out \"" + dir.string() + "\"");
  REQUIRE(r.code == 0);
  for (const char* f : {"clutch.matrices.txt", "clutch.json", "clutch.tex", "clutch.steps.txt"}) {
    INFO(f);
    CHECK(fs::exists(dir / f));
  }
}

TEST_CASE("simulate the ladder to steady state") {
  fs::path out = scratch() / "ladder.csv";
  auto r = run_cli("simulate " + fx("electrical_fig10.pog") + " --t-end 5 --dt 1e-5 --record-every 1000 --plot --out \"" +
                out.string() + "\"");
  REQUIRE(r.code == 0);
  std::vector<std::string> head;
  auto rows = read_csv(slurp(out), &head);
  REQUIRE(rows.size() == 501);
  CHECK(head[1] == "V_C1");
  const auto& last = rows.back();
  CHECK(last[0] == Catch::Approx(5.0));
  CHECK(std::abs(last[1] - 0.0) <= 1e-3);
  CHECK(std::abs(last[2] - 5.0) <= 1e-3);
  CHECK(std::abs(last[3] + 5.0) <= 1e-3);
  CHECK(std::abs(last[4] - 5.0) <= 1e-3);
  CHECK(fs::exists(scratch() / "ladder.plot.py"));
}

TEST_CASE("simulate options") {
  CHECK(run_cli("simulate " + fx("electrical_fig10.pog") + " --dt 0").code == 1);
  CHECK(run_cli("simulate " + fx("electrical_fig10.pog") + " --method euler").code == 1);
  CHECK(run_cli("simulate " + fx("electrical_fig10.pog") + " --x0 nope=1 --t-end 0.001").code == 1);

  auto r = run_cli("simulate " + fx("electrical_fig10.pog") + " --t-end 0 --x0 V_C1=2 --input Vb=const:0");
  REQUIRE(r.code == 0);
  auto rows = read_csv(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][1] == 2.0);

  // Input replaced by a CSV signal: ramps to 10 V at 1 s.
  fs::path sig = scratch() / "vb.csv";
  {
    std::ofstream f(sig);
    f << "t,v\n0,0\n1,10\n";
  }
  r = run_cli("simulate " + fx("electrical_fig10.pog") + " --t-end 0.01 --dt 1e-3 --input \"Vb=csv:" + sig.string() + "\"");
  CHECK(r.code == 0);

  r = run_cli("simulate " + fx("pmsm.json") + " --t-end 0.01 --dt 1e-5 --input V_q=const:10 --method trap --record-every 100");
  CHECK(r.code == 0);
  CHECK(read_csv(r.out).size() == 11);
}

TEST_CASE("parameter sweep with jobs") {
  fs::path a = scratch() / "lo.json", b = scratch() / "hi.json", out = scratch() / "sweep.csv";
  {
    std::ofstream(a) << R"({"R3": 0.5})";
    std::ofstream(b) << R"({"R3": 2})";
  }
  auto r = run_cli("simulate " + fx("electrical_fig10.pog") + " --t-end 0.01 --dt 1e-4 --jobs 2 --param-file \"" + a.string() +
                "\" --param-file \"" + b.string() + "\" --out \"" + out.string() + "\"");
  REQUIRE(r.code == 0);
  auto lo = read_csv(slurp(scratch() / "sweep.lo.csv")), hi = read_csv(slurp(scratch() / "sweep.hi.csv"));
  REQUIRE(lo.size() == hi.size());
  CHECK(lo.back()[3] != hi.back()[3]);

  // Same run serially gives the same file.
  fs::path single = scratch() / "single.csv";
  r = run_cli("simulate " + fx("electrical_fig10.pog") + " --t-end 0.01 --dt 1e-4 --param R3=0.5 --out \"" + single.string() + "\"");
  CHECK(slurp(single) == slurp(scratch() / "sweep.lo.csv"));
  CHECK(run_cli("simulate " + fx("electrical_fig10.pog") + " --jobs 2").code == 1);
}

TEST_CASE("check on the bundled fixtures") {
  for (const char* f : {"motor_pump.pog", "clutch.pog", "electrical_fig10.pog", "hydraulic_nested.pog", "cvt.json", "pmsm.json"}) {
    INFO(f);
    auto r = run_cli(std::string("check ") + fx(f));
    CHECK(r.code == 0);
  }
  auto r = run_cli("check " + fx("motor_pump.pog") + " --json");
  REQUIRE(r.code == 0);
  auto j = pogc::Json::parse(r.out);
  CHECK(j["all_ok"] == true);
  CHECK(j["oracle_equivalence"]["ok"] == true);
}

TEST_CASE("check reports broken parity and algebraic loops") {
  auto d = testing_support::derive_fixture("electrical_fig10.pog");
  auto slots = pogc::loop_node_inputs(d.scheme);
  REQUIRE_FALSE(slots.empty());
  std::string slot = std::to_string(slots[0].first) + ":" + std::to_string(slots[0].second);
  auto r = run_cli("check " + fx("electrical_fig10.pog") + " --flip-sign " + slot);
  CHECK(r.code == 2);
  CHECK(r.err.find("even-parity loop") != std::string::npos);
  r = run_cli("check " + fx("resistor_ring.pog"));
  CHECK(r.code == 2);
  CHECK(r.err.find("algebraic loop") != std::string::npos);
}

TEST_CASE("check on random netlists") {
  auto r = run_cli("check --seed 7 --count 40");
  CHECK(r.code == 0);
  CHECK(r.out.find("seed 7: ") == 0);
}

TEST_CASE("syntax errors point at the offending token") {
  fs::path bad = scratch() / "bad.pog";
  std::ofstream(bad) << "el R1 res e a gnd 1\nel C1 cap e a gnd -\n";
  auto r = run_cli("derive \"" + bad.string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.err.find("bad.pog:2:") != std::string::npos);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(run_cli("derive /nonexistent/x.pog").code == 1);
  CHECK(run_cli("frobnicate").code == 1);
}

TEST_CASE("reduce from the command line") {
  auto r = run_cli("reduce " + fx("clutch.pog") + " --eliminate P_C_m");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("-A^2/R_v - b_p") != std::string::npos);

  fs::path t = scratch() / "swap.json";
  std::ofstream(t) << R"({"T": [[0,0,1],[0,1,0],[1,0,0]], "labels": ["a","b","c"]})";
  r = run_cli("reduce " + fx("motor_pump.pog") + " --transform \"" + t.string() + "\" --emit json");
  REQUIRE(r.code == 0);
  auto j = pogc::Json::parse(r.out);
  CHECK(j["states"] == pogc::Json::array({"a", "b", "c"}));
  CHECK(j["L"][0][0] == "C3");

  CHECK(run_cli("reduce " + fx("motor_pump.pog")).code == 1);
  CHECK(run_cli("reduce " + fx("motor_pump.pog") + " --eliminate nope").code == 2);
  r = run_cli("reduce " + fx("cvt.json") + " --eliminate w_c --limit inf --t 0.2");
  CHECK(r.code == 0);
}
