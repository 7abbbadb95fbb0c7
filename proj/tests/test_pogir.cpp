#include <catch_amalgamated.hpp>

#include "support/common.hpp"

using namespace pogc;
using testing_support::derive_fixture;

namespace {

const PogBlock& block(const PogScheme& s, const std::string& id) {
  for (const auto& b : s.blocks)
    if (b.id == id) return b;
  throw std::runtime_error("no block " + id);
}

std::size_t count_eb(const PogScheme& s) {
  return std::count_if(s.blocks.begin(), s.blocks.end(), [](const PogBlock& b) { return b.variant == BlockVariant::elaboration; });
}

}  // namespace

TEST_CASE("RLC ladder scheme: six elaboration blocks in integral causality") {
  auto d = derive_fixture("electrical_fig10.pog");
  const auto& s = d.scheme;
  CHECK(count_eb(s) == 6);
  CHECK(s.nodes.size() == 6);
  CHECK(s.states.size() == 4);
  for (const char* dyn : {"C1", "L2", "L3", "C4"}) CHECK(block(s, dyn).integral);
  CHECK_FALSE(block(s, "R3").integral);
  CHECK(block(s, "R3").gain_text() == "R3");
  // R4 sees the across difference and returns a through variable.
  CHECK(block(s, "R4").gain_text() == "1/R4");
  CHECK(block(s, "C1").config == "S-c");
  CHECK(block(s, "L2").config == "P-b");
  CHECK(s.flags.empty());
}

TEST_CASE("motor-pump scheme") {
  auto d = derive_fixture("motor_pump.pog");
  const auto& s = d.scheme;
  CHECK(s.blocks.size() == 8);
  CHECK(count_eb(s) == 6);
  CHECK(s.nodes.size() == 6);
  CHECK(s.sections.size() == 9);
  CHECK(block(s, "K12").variant == BlockVariant::connection);
  CHECK(block(s, "K23").gain == sym::Poly::symbol("K23"));
  CHECK(block(s, "J2").section == 4);
}

TEST_CASE("nested group is recorded on blocks and nodes") {
  auto d = derive_fixture("hydraulic_nested.pog");
  CHECK(block(d.scheme, "L3").group == "L3|R5");
  CHECK(block(d.scheme, "R5").group == "L3|R5");
  CHECK(block(d.scheme, "C4").group.empty());
  std::size_t grouped = std::count_if(d.scheme.nodes.begin(), d.scheme.nodes.end(),
                                      [](const SummationNode& n) { return n.group == "L3|R5"; });
  CHECK(grouped == 1);
}

TEST_CASE("fixture schemes pass the loop parity rule") {
  for (const char* f : {"electrical_fig10.pog", "hydraulic_nested.pog", "motor_pump.pog", "clutch.pog"}) {
    INFO(f);
    auto d = derive_fixture(f);
    auto r = check_loop_signs(d.scheme);
    CHECK(r.ok());
    CHECK(r.loops_checked > 0);
    CHECK(detect_algebraic_loops(d.scheme).ok());
  }
}

TEST_CASE("a flipped node sign breaks parity on some loop") {
  auto d = derive_fixture("electrical_fig10.pog");
  auto slots = loop_node_inputs(d.scheme);
  REQUIRE(!slots.empty());
  for (auto [n, k] : slots) {
    auto r = check_loop_signs(flip_node_sign(d.scheme, n, k));
    CHECK_FALSE(r.ok());
    CHECK(r.violations.front().minus_signs % 2 == 0);
  }
}

TEST_CASE("storage-free ring has algebraic loops") {
  auto d = derive_text(read_text_file(testing_support::fixture("resistor_ring.pog")), false);
  CHECK_FALSE(d.model.has_value());
  CHECK_FALSE(d.algebraic.ok());
  CHECK(loop_text(d.algebraic.violations.front()).find("->") != std::string::npos);
  CHECK_THROWS_AS(derive_text(read_text_file(testing_support::fixture("resistor_ring.pog"))), ModelError);
}

TEST_CASE("causality conflict: two capacitors in parallel") {
  try {
    derive_text("src V through e a gnd const:1\nel C1 cap e a gnd 1\nel C2 cap e a gnd 2\n");
    FAIL("expected CausalityConflict");
  } catch (const ModelError& e) {
    CHECK(e.code() == ErrorCode::CausalityConflict);
  }
}

TEST_CASE("step trace covers the six steps") {
  auto d = derive_fixture("electrical_fig10.pog");
  std::string all;
  for (const auto& t : d.scheme.trace) all += t + "\n";
  for (int k = 1; k <= 6; ++k) CHECK(all.find("Step " + std::to_string(k)) != std::string::npos);
}
