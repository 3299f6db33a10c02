#include <gtest/gtest.h>

#include "iiotsim/harness/builtins.hpp"
#include "iiotsim/harness/scenario_text.hpp"

namespace iiotsim::harness {
namespace {

// serialize -> parse -> serialize is a fixed point for every builtin and
// verification scenario.
TEST(ScenarioText, SerializeParseFixedPoint) {
  std::vector<Scenario> all = builtin_scenarios();
  all.push_back(interference_scenario());
  all.push_back(ring_failure_scenario());
  all.push_back(controller_kill_scenario());
  all.push_back(tamper_integrity_scenario());
  all.push_back(plug_and_produce_scenario());
  for (const Scenario& s : all) {
    std::string text = serialize_scenario(s);
    Scenario parsed = parse_scenario(text);
    EXPECT_EQ(serialize_scenario(parsed), text) << s.name;
    EXPECT_EQ(parsed.name, s.name);
    EXPECT_EQ(parsed.seed, s.seed);
    EXPECT_EQ(parsed.flows.size(), s.flows.size());
    EXPECT_EQ(parsed.events.size(), s.events.size());
  }
}

TEST(ScenarioText, ParsedBuiltinsValidateCleanly) {
  for (const Scenario& s : builtin_scenarios()) {
    Scenario parsed = parse_scenario(serialize_scenario(s));
    EXPECT_TRUE(validate(parsed).empty()) << s.name;
  }
}

TEST(ScenarioText, ParseErrorsCarryLineNumbers) {
  try {
    parse_scenario("iiotsim-scenario 1\nname x\nduration 10\n[nodes]\nnode oops\n");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos);
  }
}

TEST(ScenarioText, HeaderRequired) {
  EXPECT_THROW(parse_scenario("name x\n"), Error);
  EXPECT_THROW(parse_scenario(""), Error);
  EXPECT_THROW(parse_scenario("iiotsim-scenario 99\n"), Error);
}

TEST(ScenarioText, UnknownSectionRejected) {
  EXPECT_THROW(parse_scenario("iiotsim-scenario 1\nname x\n[wat]\nfoo bar\n"), Error);
}

TEST(Validation, TwoFacilityControllersFlagged) {
  Scenario s = ring_failure_scenario();
  s.controllers.push_back(s.controllers[0]);
  s.controllers.back().id = 42;
  auto diags = validate(s);
  ASSERT_FALSE(diags.empty());
  bool mentions_facility = false;
  for (const auto& d : diags)
    if (d.find("facility") != std::string::npos) mentions_facility = true;
  EXPECT_TRUE(mentions_facility);
}

TEST(Validation, PolicyReferencingUnknownSegmentFlagged) {
  Scenario s = ring_failure_scenario();
  policy::SegmentRule r;
  r.from = 10;
  r.to = 777;
  r.allow = true;
  r.require_firewall = true;
  s.segment_rules.push_back(r);
  auto diags = validate(s);
  ASSERT_FALSE(diags.empty());
  bool mentions = false;
  for (const auto& d : diags)
    if (d.find("777") != std::string::npos) mentions = true;
  EXPECT_TRUE(mentions);
}

TEST(Validation, CrossSegmentAllowWithoutFirewallFlagged) {
  Scenario s = ring_failure_scenario();
  policy::SegmentRule r;
  r.from = 10;
  r.to = 20;
  r.allow = true;
  r.require_firewall = false;
  s.segment_rules.push_back(r);
  auto diags = validate(s);
  ASSERT_FALSE(diags.empty());
}

TEST(Validation, UnmetRedundancyDeclarationFlagged) {
  Scenario s = controller_kill_scenario();
  s.checks.redundant_pairs = {{2, 3}}; // star topology: only one disjoint path
  auto diags = validate(s);
  ASSERT_FALSE(diags.empty());
  bool mentions = false;
  for (const auto& d : diags)
    if (d.find("redundant") != std::string::npos) mentions = true;
  EXPECT_TRUE(mentions);
}

TEST(Validation, TimeCriticalFlowNeedsBound) {
  Scenario s = ring_failure_scenario();
  s.flows[0].tclass = TrafficClass::TimeCritical;
  s.flows[0].latency_bound_us.reset();
  auto diags = validate(s);
  ASSERT_FALSE(diags.empty());
}

TEST(Validation, QuarantineVlanReserved) {
  Scenario s = ring_failure_scenario();
  net::Segment q;
  q.vlan = net::kQuarantineVlan;
  q.name = "oops";
  s.segments.push_back(q);
  auto diags = validate(s);
  ASSERT_FALSE(diags.empty());
}

TEST(ScenarioText, FileRoundTrip) {
  Scenario s = interference_scenario();
  std::string path = testing::TempDir() + "/iiotsim_roundtrip.scn";
  write_file(path, serialize_scenario(s));
  Scenario loaded = load_scenario_file(path);
  EXPECT_EQ(serialize_scenario(loaded), serialize_scenario(s));
  EXPECT_THROW(load_scenario_file("/nonexistent/nope.scn"), Error);
}

} // namespace
} // namespace iiotsim::harness
