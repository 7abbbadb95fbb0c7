#include <catch_amalgamated.hpp>

#include "support/common.hpp"

using namespace pogc;
using testing_support::fixture;

namespace {

SPChain chain_of(const std::string& text) { return build_sp_chain(parse_netlist(text)); }

std::string items_text(const SPChain& c, std::size_t seg) {
  std::string s;
  for (const auto& it : c.segments[seg].items) {
    s += it.position == Position::series ? "S:" : "P:";
    if (it.nested()) {
      std::string g;
      for (const auto& n : element_names(c.net, it.node)) g += (g.empty() ? "" : "|") + n;
      s += "(" + g + ")";
    } else {
      s += leaf_name(c.net, it.node.leaf);
    }
    s += " ";
  }
  return s;
}

ErrorCode failure(const std::string& text) {
  try {
    chain_of(text);
  } catch (const ModelError& e) {
    return e.code();
  }
  FAIL("expected a topology error");
  return ErrorCode::InvalidModel;
}

}  // namespace

TEST_CASE("RLC ladder") {
  auto c = build_sp_chain(parse_netlist(read_text_file(fixture("electrical_fig10.pog"))));
  REQUIRE(c.segments.size() == 1);
  CHECK(items_text(c, 0) == "S:C1 P:L2 S:L3 S:R3 P:C4 S:R4 ");
  CHECK(c.sections.size() == 7);
  CHECK(c.sections.front().left_block == "Va");
  CHECK(c.sections.back().right_block == "Vb");
  CHECK(c.segments[0].exit.has_value());
}

TEST_CASE("motor and pump: three segments joined by two couplings") {
  auto c = build_sp_chain(parse_netlist(read_text_file(fixture("motor_pump.pog"))));
  REQUIRE(c.segments.size() == 3);
  REQUIRE(c.links.size() == 2);
  CHECK(c.links[0].kind == CouplingKind::transformer);
  CHECK(c.links[1].kind == CouplingKind::gyrator);
  CHECK(c.links[0].ratio == sym::Poly::symbol("K12"));
  CHECK(items_text(c, 0) == "S:R1 S:L1 ");
  CHECK(items_text(c, 1) == "P:J2 P:b2 ");
  CHECK(items_text(c, 2) == "P:C3 P:R3 ");
  CHECK(c.sections.size() == 9);
  // The gyrator swaps which rail carries the across variable.
  CHECK(c.segments[0].across_upper);
  CHECK(c.segments[1].across_upper);
  CHECK_FALSE(c.segments[2].across_upper);
}

TEST_CASE("hydraulic circuit keeps the parallel pair as one nested item") {
  auto c = build_sp_chain(parse_netlist(read_text_file(fixture("hydraulic_nested.pog"))));
  CHECK(items_text(c, 0) == "S:L1 S:R1 P:C2 P:R2 S:(L3|R5) P:C4 P:R4 ");
  CHECK(c.sections.size() == 8);
}

TEST_CASE("line order does not change the chain") {
  std::string text = read_text_file(fixture("hydraulic_nested.pog"));
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  std::reverse(lines.begin(), lines.end());
  std::string rev;
  for (const auto& l : lines) rev += l + "\n";
  auto a = build_sp_chain(parse_netlist(text));
  auto b = build_sp_chain(parse_netlist(rev));
  CHECK(items_text(a, 0) == items_text(b, 0));
}

TEST_CASE("topology errors") {
  CHECK(failure(read_text_file(fixture("bridge.pog"))) == ErrorCode::NonSeriesParallel);
  CHECK(failure("src V across e a gnd const:1\nel R1 res e a gnd 1\nel R2 res e b c 1\nel R3 res e c b 1\n") ==
        ErrorCode::DisconnectedSegment);
  CHECK(failure("el R1 res e a gnd 1\nel R2 res e a gnd 1\n") == ErrorCode::DisconnectedSegment);
  CHECK(failure("src V across e a gnd const:1\nel R1 res e a gnd 1\nsrc W across e a gnd const:1\nsrc X through e a gnd const:1\n") ==
        ErrorCode::MultiPortSegment);
  RandomNetlist gen(3);
  for (int k = 0; k < 50; ++k) CHECK(failure(gen.wheatstone()) == ErrorCode::NonSeriesParallel);
}

TEST_CASE("summation-node plan: one node per element") {
  auto c = build_sp_chain(parse_netlist(read_text_file(fixture("hydraulic_nested.pog"))));
  auto plan = summation_node_plan(c);
  CHECK(plan.size() == 8);
  std::size_t vkl = std::count_if(plan.begin(), plan.end(), [](const PlannedNode& n) { return n.kind == "VKL"; });
  CHECK(vkl == 3);  // L1, R1 and the nested L3|R5 pair sit in series
}

TEST_CASE("across rail follows the gyrators") {
  auto c = build_sp_chain(parse_netlist(read_text_file(fixture("clutch.pog"))));
  auto flipped = assign_power_lines(c, false);
  CHECK_FALSE(flipped.segments[0].across_upper);
  CHECK(flipped.segments[1].across_upper);
}
