#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iotsim/dataset.hpp"
#include "iotsim/net.hpp"
#include "iotsim/packet.hpp"
#include "iotsim/power.hpp"
#include "iotsim/services.hpp"
#include "iotsim/time.hpp"

namespace iotsim {

inline constexpr int kScenarioFormatVersion = 1;

struct ConnectionSpec {
  ConnectionKind type = ConnectionKind::WiFi;
  double strength = 1.0;
  double base_loss = 0.0;
  std::string protocol;  // informational label only

  bool operator==(const ConnectionSpec&) const = default;
};

struct PowerSpec {
  PowerKind kind = PowerKind::ContinuousSupply;
  double capacity_J = 0.0;  // batteries only

  bool operator==(const PowerSpec&) const = default;
};

struct SensorSpec {
  std::string metric;
  std::uint64_t interval_s = 0;
  std::string dataset;
  SelectionMode selection = Sequential{};

  bool operator==(const SensorSpec&) const = default;
};

struct MobileSensorSpec {
  SensorSpec sensor;
  std::optional<std::string> trajectory_path;  // when loaded from CSV
  std::vector<Waypoint> trajectory;

  bool operator==(const MobileSensorSpec&) const = default;
};

struct LinkSpec {
  bool operator==(const LinkSpec&) const = default;
};

struct GatewaySpec {
  std::optional<std::uint64_t> round_interval_s;  // default: shortest upstream interval
  std::optional<std::uint64_t> round_timeout_s;   // default: the round interval

  bool operator==(const GatewaySpec&) const = default;
};

struct Passthrough {
  bool operator==(const Passthrough&) const = default;
};
struct Downsample {
  std::uint32_t keep_one_in = 1;
  bool operator==(const Downsample&) const = default;
};
struct ThresholdFilter {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const ThresholdFilter&) const = default;
};
using EdgeProcessing = std::variant<Passthrough, Downsample, ThresholdFilter>;

struct EdgeSpec {
  double mips = 1000.0;
  std::uint64_t storage_bytes = 0;
  EdgeProcessing processing = Passthrough{};
  std::optional<std::string> cloud;
  std::optional<std::string> iot;

  bool operator==(const EdgeSpec&) const = default;
};

struct FogSpec {
  double mips = 1000.0;  // next hop is the node's `forward`

  bool operator==(const FogSpec&) const = default;
};

enum class NodeKind { Sensor, MobileSensor, Link, Gateway, Edge, Fog };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view text);

using NodeRole = std::variant<SensorSpec, MobileSensorSpec, LinkSpec, GatewaySpec, EdgeSpec, FogSpec>;

struct NodeSpec {
  std::string id;
  Location location;
  double coverage_m = 0.0;
  ConnectionSpec connection;
  PowerSpec power;
  std::optional<std::string> forward;
  NodeRole role;

  NodeKind kind() const;
  const SensorSpec* sensor() const;  // sensors and mobile sensors
  SensorSpec* sensor();

  bool operator==(const NodeSpec&) const = default;
};

struct HostSpec {
  std::string id;
  std::uint32_t count = 1;  // expands to id#0 .. id#(count-1) when > 1
  std::uint32_t pes = 1;
  double mips_per_pe = 1000.0;
  std::uint64_t ram_bytes = 0;
  std::uint64_t storage_bytes = 0;
  double idle_W = 0.0;
  double full_W = 0.0;
  std::uint32_t max_vms = 0;  // 0 = bounded by PEs only

  bool operator==(const HostSpec&) const = default;
};

struct DatacenterSpec {
  std::string id;
  std::vector<HostSpec> hosts;
  std::optional<std::string> analysis_service;  // request submitted per stored record

  bool operator==(const DatacenterSpec&) const = default;
};

struct VmSpec {
  std::string id;
  std::uint32_t count = 1;
  std::optional<std::string> datacenter;  // restrict placement
  std::uint32_t pes = 1;
  double mips_per_pe = 1000.0;
  std::uint64_t ram_bytes = 0;
  std::vector<std::string> services;  // empty = serves every type

  bool operator==(const VmSpec&) const = default;
};

struct DatasetSpec {
  std::string name;
  std::optional<std::string> path;  // when loaded from CSV
  std::vector<double> values;

  bool operator==(const DatasetSpec&) const = default;
};

struct NodeFailureSpec {
  std::string node;
  std::uint64_t at_s = 0;
  bool operator==(const NodeFailureSpec&) const = default;
};
struct OutageSpec {
  std::string node;
  std::uint64_t from_s = 0;
  std::uint64_t to_s = 0;
  bool operator==(const OutageSpec&) const = default;
};
struct SignalSpec {
  std::string node;
  std::uint64_t at_s = 0;
  double strength = 1.0;
  bool operator==(const SignalSpec&) const = default;
};
using FailureSpec = std::variant<NodeFailureSpec, OutageSpec, SignalSpec>;

enum class ActuatorTrigger { NodeFailure, SignalLost };

struct ActuatorSpec {
  std::string node;  // the acting node
  ActuatorTrigger on = ActuatorTrigger::NodeFailure;
  std::string watch;
  std::string rewire_to;

  bool operator==(const ActuatorSpec&) const = default;
};

struct TimingDefaults {
  std::uint64_t drain_s = 3600;      // run continues this long past the last round timeout
  std::uint64_t day_close_s = 1800;  // daily averages computed this long after midnight

  bool operator==(const TimingDefaults&) const = default;
};

struct DefaultsSpec {
  ConnectionTable connections = ConnectionTable::defaults();
  double sense_J = 0.5;
  double edge_instructions_per_reading = 1000.0;
  TimingDefaults timing;

  bool operator==(const DefaultsSpec&) const = default;
};

struct ScenarioSpec {
  std::string name;
  std::uint64_t seed = 0;
  std::uint64_t horizon_s = 0;
  DefaultsSpec defaults;
  std::vector<DatasetSpec> datasets;
  std::vector<NodeSpec> nodes;
  std::vector<DatacenterSpec> datacenters;
  std::vector<VmSpec> vms;
  std::vector<IoTServiceType> service_types;
  std::vector<AlertPolicy> alerts;
  std::vector<RuntimeWorkload> workloads;
  std::vector<FailureSpec> failures;
  std::vector<ActuatorSpec> actuators;

  const NodeSpec* find_node(std::string_view id) const;
  NodeSpec* find_node(std::string_view id);
  const DatasetSpec* find_dataset(std::string_view name) const;
  const DatacenterSpec* find_datacenter(std::string_view id) const;

  bool operator==(const ScenarioSpec&) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string path;  // e.g. "nodes[3].forward"
  int line = 0;      // 1-based; 0 when the spec was built in code
  int column = 0;
  std::string message;

  std::string str() const;
};

struct ParseResult {
  std::optional<ScenarioSpec> spec;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

/// Parses and fully validates a scenario document. Relative dataset and
/// trajectory paths resolve against `base_dir`. Diagnostics are collected, not
/// fail-fast; `spec` is set only when there are no errors.
ParseResult parse_scenario(std::string_view document, const std::filesystem::path& base_dir = {});

/// Reads the file and parses it with its directory as base.
ParseResult parse_scenario_file(const std::filesystem::path& path);

/// Semantic checks on a spec built in code (or re-checked after edits).
/// Line/column are taken from `marks` when a path is present there.
std::vector<Diagnostic> validate(const ScenarioSpec& spec,
                                 const std::map<std::string, std::pair<int, int>>& marks = {});

/// Emits the document form; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const ScenarioSpec& spec);

/// Copies every node, datacenter, VM, failure and actuator `copies` times,
/// prefixing ids with "L<i>." and shifting copy i by i * spacing_m along x.
ScenarioSpec replicate(const ScenarioSpec& spec, std::uint32_t copies, double spacing_m = 100000.0);

/// Sets every sensor's reading interval, and any explicit gateway round settings, to `interval_s`.
void set_reading_interval(ScenarioSpec& spec, std::uint64_t interval_s);

}  // namespace iotsim
