#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "builders.hpp"
#include "iotsim/presets.hpp"
#include "iotsim/scenario.hpp"

using namespace iotsim;
using namespace iotsim::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(IOTSIM_SOURCE_DIR) / "scenarios";

const char* kMinimal = R"(name: tiny
seed: 3
horizon: 1d
datasets:
  - {name: d, values: [1, 2]}
nodes:
  - id: s1
    kind: sensor
    forward: gw
    metric: m
    interval: 6h
    dataset: d
  - id: gw
    kind: gateway
    forward: cloud
datacenters:
  - id: cloud
    hosts: [{id: h, pes: 2}]
)";

const Diagnostic* find_diag(const std::vector<Diagnostic>& ds, std::string_view needle) {
  for (const auto& d : ds) {
    if (d.message.find(needle) != std::string::npos) return &d;
  }
  return nullptr;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

}  // namespace

TEST(Parse, MinimalDocument) {
  const auto r = parse_scenario(kMinimal);
  ASSERT_TRUE(r.ok()) << (r.diagnostics.empty() ? "" : r.diagnostics[0].str());
  const auto& s = *r.spec;
  EXPECT_EQ(s.name, "tiny");
  EXPECT_EQ(s.seed, 3u);
  EXPECT_EQ(s.horizon_s, kSecondsPerDay);
  ASSERT_EQ(s.nodes.size(), 2u);
  EXPECT_EQ(s.nodes[0].kind(), NodeKind::Sensor);
  EXPECT_EQ(s.nodes[0].sensor()->interval_s, 6 * kSecondsPerHour);
  EXPECT_EQ(s.nodes[1].kind(), NodeKind::Gateway);
  ASSERT_EQ(s.datacenters.size(), 1u);
  EXPECT_EQ(s.datacenters[0].hosts[0].pes, 2u);
}

TEST(Parse, EmptyDocumentIsMissingTopology) {
  for (const char* doc : {"", "   \n", "# only a comment\n"}) {
    const auto r = parse_scenario(doc);
    EXPECT_FALSE(r.ok());
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_NE(r.diagnostics[0].message.find("missing topology"), std::string::npos);
  }
  const auto no_nodes = parse_scenario("name: x\nhorizon: 1d\n");
  EXPECT_FALSE(no_nodes.ok());
  EXPECT_NE(find_diag(no_nodes.diagnostics, "missing topology"), nullptr);
}

TEST(Parse, UndeclaredForwardNamedWithPosition) {
  const auto r = parse_scenario(replace(kMinimal, "forward: gw", "forward: gw9"));
  EXPECT_FALSE(r.ok());
  const auto* d = find_diag(r.diagnostics, "gw9");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->severity, Severity::Error);
  EXPECT_EQ(d->path, "nodes[0].forward");
  EXPECT_EQ(d->line, 9);
  EXPECT_GT(d->column, 0);
  EXPECT_NE(d->str().find("at 9:"), std::string::npos);
}

TEST(Parse, SyntaxErrorCarriesPosition) {
  const auto r = parse_scenario("name: x\nnodes: [\n  - {id: a\n");
  EXPECT_FALSE(r.ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_GT(r.diagnostics[0].line, 0);
  EXPECT_NE(r.diagnostics[0].message.find("syntax error"), std::string::npos);
}

TEST(Parse, UnknownKeysWarnButParse) {
  const auto r = parse_scenario(replace(kMinimal, "    interval: 6h\n", "    interval: 6h\n    colour: red\n"));
  EXPECT_TRUE(r.ok());
  const auto* d = find_diag(r.diagnostics, "colour");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->severity, Severity::Warning);
}

TEST(Parse, ErrorsAreCollectedNotFailFast) {
  std::string doc = replace(kMinimal, "interval: 6h", "interval: soon");
  doc = replace(doc, "kind: gateway", "kind: teleporter");
  doc = replace(doc, "pes: 2", "pes: lots");
  const auto r = parse_scenario(doc);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.spec.has_value());
  EXPECT_NE(find_diag(r.diagnostics, "teleporter"), nullptr);
  EXPECT_NE(find_diag(r.diagnostics, "interval"), nullptr);
  EXPECT_NE(find_diag(r.diagnostics, "pes"), nullptr);
}

TEST(Parse, BadDatasetPathNamed) {
  const auto r = parse_scenario(replace(kMinimal, "values: [1, 2]", "path: nowhere.csv"), kScenarios);
  EXPECT_FALSE(r.ok());
  EXPECT_NE(find_diag(r.diagnostics, "nowhere.csv"), nullptr);
}

TEST(Validate, SemanticChecks) {
  auto base = star(2, kSecondsPerHour, kSecondsPerDay);
  auto has = [](ScenarioSpec s, std::string_view needle) {
    return find_diag(validate(s), needle) != nullptr;
  };
  EXPECT_TRUE(validate(base).empty());

  auto s = base;
  s.nodes[1].id = "s0";
  EXPECT_TRUE(has(s, "duplicate id"));
  s = base;
  s.nodes[0].forward = "s0";
  EXPECT_TRUE(has(s, "forwards to itself"));
  s = base;
  s.nodes.push_back(node("r1", LinkSpec{}, "r2"));
  s.nodes.push_back(node("r2", LinkSpec{}, "r1"));
  EXPECT_TRUE(has(s, "forwarding cycle"));
  s = base;
  s.nodes[0].connection.strength = 1.5;
  EXPECT_TRUE(has(s, "strength"));
  s = base;
  s.nodes[0].sensor()->selection = RandomInRange{2, 1};
  EXPECT_TRUE(has(s, "min <= max"));
  s = base;
  s.nodes[0].sensor()->dataset = "missing";
  EXPECT_TRUE(has(s, "unknown dataset"));
  s = base;
  s.failures = {OutageSpec{"s0", 10, 20}, OutageSpec{"s0", 15, 30}};
  EXPECT_TRUE(has(s, "overlaps"));
  s = base;
  s.failures = {NodeFailureSpec{"ghost", 10}};
  EXPECT_TRUE(has(s, "unknown node 'ghost'"));
  s = base;
  s.datacenters[0].analysis_service = "nope";
  EXPECT_TRUE(has(s, "unknown service type"));
  s = base;
  s.nodes[0].id = "broker";
  EXPECT_TRUE(has(s, "reserved"));
  s = base;
  s.nodes[0] = battery(s.nodes[0], 0.0);
  EXPECT_TRUE(has(s, "battery capacity"));
}

TEST(RoundTrip, SerializeThenParseIsIdentity) {
  std::vector<ScenarioSpec> specs{*parse_scenario(kMinimal).spec, env_iot_preset(),
                                  jose_preset(JoseOptions{3, kSecondsPerDay, 2, 5})};
  for (const char* file : {"minimal.yaml", "field-station.yaml", "env-iot.yaml"}) {
    auto r = parse_scenario_file(kScenarios / file);
    ASSERT_TRUE(r.ok()) << file;
    specs.push_back(*r.spec);
  }
  auto edited = star(2, kSecondsPerHour, kSecondsPerDay);
  edited.defaults.connections.get(ConnectionKind::LoRa).range_m = 1234.5;
  edited.defaults.sense_J = 0.125;
  edited.nodes[0].sensor()->selection = RandomInRange{-1.5, 2.25};
  edited.nodes[1].connection.base_loss = 0.3;
  specs.push_back(edited);

  for (const auto& spec : specs) {
    const std::string doc = serialize_scenario(spec);
    const auto back = parse_scenario(doc, kScenarios);
    ASSERT_TRUE(back.ok()) << spec.name << "\n" << doc;
    EXPECT_EQ(*back.spec, spec) << spec.name;
    EXPECT_EQ(serialize_scenario(*back.spec), doc) << spec.name;
  }
}

TEST(Replicate, PrefixesAndShifts) {
  const auto base = star(2, kSecondsPerHour, kSecondsPerDay);
  const auto three = replicate(base, 3, 1000.0);
  EXPECT_EQ(three.nodes.size(), 3 * base.nodes.size());
  EXPECT_EQ(three.datacenters.size(), 3u);
  EXPECT_EQ(three.datasets, base.datasets);
  const auto* gw = three.find_node("L2.gw");
  ASSERT_NE(gw, nullptr);
  EXPECT_EQ(gw->forward, "L2.cloud");
  EXPECT_DOUBLE_EQ(gw->location.x, 2000.0);
  EXPECT_EQ(three.find_node("L1.s0")->forward, "L1.gw");
  EXPECT_TRUE(validate(three).empty());
  EXPECT_EQ(replicate(base, 1), base);
}

TEST(Replicate, SetReadingInterval) {
  auto s = star(2, kSecondsPerHour, kSecondsPerDay);
  s.nodes[2].role = GatewaySpec{kSecondsPerHour, 600};
  set_reading_interval(s, 3 * kSecondsPerHour);
  EXPECT_EQ(s.nodes[0].sensor()->interval_s, 3 * kSecondsPerHour);
  EXPECT_EQ(s.nodes[1].sensor()->interval_s, 3 * kSecondsPerHour);
  const auto& g = std::get<GatewaySpec>(s.nodes[2].role);
  EXPECT_EQ(g.round_interval_s, 3 * kSecondsPerHour);
  EXPECT_EQ(g.round_timeout_s, 3 * kSecondsPerHour);
}

TEST(Kinds, StringsRoundTrip) {
  for (auto k : {NodeKind::Sensor, NodeKind::MobileSensor, NodeKind::Link, NodeKind::Gateway,
                 NodeKind::Edge, NodeKind::Fog}) {
    EXPECT_EQ(node_kind_from_string(to_string(k)), k);
  }
  EXPECT_FALSE(node_kind_from_string("satellite"));
}
