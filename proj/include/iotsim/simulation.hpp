#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iotsim/cloud.hpp"
#include "iotsim/fogedge.hpp"
#include "iotsim/kernel.hpp"
#include "iotsim/nodes.hpp"
#include "iotsim/random.hpp"
#include "iotsim/scenario.hpp"
#include "iotsim/trace.hpp"

namespace iotsim {

/// A scenario instantiated as entities on one kernel. Single-threaded; one
/// Simulation per run.
class Simulation {
 public:
  /// Validates and builds; throws Error(InvalidScenario) listing the diagnostics.
  explicit Simulation(const ScenarioSpec& spec, TraceSink* sink = nullptr);
  ~Simulation();

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Runs to end_time() and fills every RunStats field (wall clock and peak
  /// memory included).
  RunStats run();

  /// Horizon + the longest gateway round timeout + the drain window.
  SimTime end_time() const noexcept { return SimTime{end_s_}; }

  /// Advances the kernel only; stats carry packet counters but no timing.
  RunStats run_until(SimTime until);

  RunStats stats() const;

  const ScenarioSpec& spec() const noexcept { return spec_; }
  const DefaultsSpec& defaults() const noexcept { return spec_.defaults; }
  Kernel& kernel() noexcept { return kernel_; }
  SimTime now() const noexcept { return kernel_.now(); }
  SimTime horizon() const noexcept { return SimTime{spec_.horizon_s}; }

  // Lookup.
  std::optional<EntityId> find(std::string_view name) const;
  EntityId id_of(std::string_view name) const;  // throws Error(UnknownEntity)
  const std::string& name_of(EntityId id) const;
  Node* node(EntityId id);
  Node* node(std::string_view name);
  template <typename T>
  T* node_as(std::string_view name) {
    return dynamic_cast<T*>(node(name));
  }
  const std::vector<std::unique_ptr<Node>>& nodes() const noexcept { return nodes_; }
  IoTDatacenter* datacenter(EntityId id);
  IoTDatacenter* datacenter(std::string_view name);
  const std::vector<std::unique_ptr<IoTDatacenter>>& datacenters() const noexcept {
    return datacenters_;
  }
  Broker& broker() noexcept { return *broker_; }

  /// IoT-side nodes plus physical hosts.
  std::size_t nodes_built() const;
  std::size_t sensor_count() const;

  MetricId metric_id(std::string_view name);
  const std::string& metric_name(MetricId id) const;
  std::optional<MetricId> find_metric(std::string_view name) const;
  RandomStream& rng(EntityId id);

  // Used by entities.
  void transmit_from(Node& from, EntityId to, PacketPayload payload, EntityId origin,
                     SimTime created_at);
  void packet_delivered(const DataPacket& packet, std::string_view at);
  void packet_lost(const DataPacket& packet, LossReason reason, std::string_view at);
  void reading_emitted() { ++readings_; }

  bool tracing() const noexcept { return sink_ != nullptr; }
  void trace(TraceKind kind, std::string_view subject, TraceDetail detail = {});
  std::uint64_t trace_count(TraceKind kind) const {
    return kind_counts_[static_cast<std::size_t>(kind)];
  }

  /// Readings a gateway should expect for the round starting at `round_time`:
  /// active upstream sensors whose interval divides it.
  std::size_t expected_readings(const GatewayNode& gateway, SimTime round_time);
  void topology_changed() { ++topology_version_; }

  /// Rewires every node forwarding to `watched` onto `new_target`. Throws
  /// Error(DeadTarget) if the target is missing or inactive. Rewiring to the
  /// current target changes nothing but is still traced.
  void act(EntityId actor, ActuatorTrigger trigger, EntityId watched, EntityId new_target);

  void on_node_failure(Node& node);
  void on_signal_lost(Node& node);

  /// Internal allocation estimate used when no platform peak-memory facility exists.
  std::uint64_t estimated_memory_bytes() const;

 private:
  void build();
  EntityId register_name(const std::string& name, Entity& entity);
  void fire_actuators(ActuatorTrigger trigger, Node& watched);
  const std::vector<const SensorNode*>& upstream_sensors(const GatewayNode& gateway);

  ScenarioSpec spec_;
  TraceSink* sink_;
  Kernel kernel_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<std::unique_ptr<IoTDatacenter>> datacenters_;
  std::unique_ptr<Broker> broker_;
  std::vector<Entity*> by_id_;
  std::vector<Node*> node_index_;  // by entity id; null for non-nodes
  std::vector<std::string> names_;
  std::map<std::string, EntityId, std::less<>> ids_;
  std::vector<std::string> metrics_;
  std::map<std::string, MetricId, std::less<>> metric_ids_;
  std::vector<RandomStream> rngs_;

  std::uint64_t next_packet_id_ = 1;
  std::uint64_t packets_sent_ = 0;
  std::uint64_t packets_delivered_ = 0;
  std::uint64_t packets_lost_ = 0;
  std::uint64_t readings_ = 0;
  std::array<std::uint64_t, kTraceKindCount> kind_counts_{};

  std::uint64_t end_s_ = 0;
  std::uint64_t topology_version_ = 0;
  struct UpstreamCache {
    std::uint64_t version = ~0ULL;
    std::vector<const SensorNode*> sensors;
  };
  std::map<EntityId, UpstreamCache> upstream_;
};

}  // namespace iotsim
