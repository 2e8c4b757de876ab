#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotsim/dataset.hpp"
#include "iotsim/kernel.hpp"
#include "iotsim/net.hpp"
#include "iotsim/packet.hpp"
#include "iotsim/power.hpp"
#include "iotsim/scenario.hpp"

namespace iotsim {

class Simulation;

/// Hook for security/privacy transforms applied to every packet a node emits.
/// Empty means identity.
using PayloadTransform = std::function<void(DataPacket&)>;

struct NodeCommon {
  EntityId id = 0;
  std::string name;
  Location location;
  double coverage_m = 0.0;
  PowerSource power = PowerSource::continuous();
  NetworkConnection connection{ConnectionType{}};
  std::optional<EntityId> forward_target;
  bool alive = true;
  PayloadTransform transform;
};

/// Base of every IoT-side entity. Handles the events all nodes share (packet
/// arrival bookkeeping, failure, outages, signal changes, depletion) and hands
/// the rest to the concrete node.
class Node : public Entity {
 public:
  Node(Simulation& sim, NodeKind kind, NodeCommon common);

  EntityId id() const noexcept { return common_.id; }
  const std::string& name() const noexcept { return common_.name; }
  NodeKind kind() const noexcept { return kind_; }
  NodeCommon& common() noexcept { return common_; }
  const NodeCommon& common() const noexcept { return common_; }

  /// Alive and not out of energy.
  bool active() const noexcept { return common_.alive && !silent_; }
  bool silent() const noexcept { return silent_; }

  void handle(Event& event) final;

  /// Charges `cost`; on depletion the node falls silent and a single battery
  /// record is traced. Returns false if the node could not pay.
  bool charge(Energy cost);

  /// Marks the node failed (NodeFailure event path).
  void fail();

  virtual void start() {}

 protected:
  /// Energy charged when a packet arrives; default is the receive cost.
  virtual Energy receive_cost(const PacketArrival& arrival) const { return arrival.rx_cost; }
  /// A delivered packet. Default: consumed.
  virtual void on_packet(DataPacket&& packet);
  virtual void on_event(Event& event);
  virtual void on_silenced() {}

  /// Sends a payload to `to` over this node's connection.
  void send(EntityId to, PacketPayload payload, EntityId origin, SimTime created_at);
  /// Re-addresses a received packet to the forward target.
  void forward(DataPacket&& packet);

  Simulation& sim_;
  NodeKind kind_;
  NodeCommon common_;
  bool silent_ = false;
};

class SensorNode : public Node {
 public:
  SensorNode(Simulation& sim, NodeCommon common, MetricId metric, std::uint64_t interval_s,
             DatasetHandle dataset, SelectionMode selection, NodeKind kind = NodeKind::Sensor);

  MetricId metric() const noexcept { return metric_; }
  std::uint64_t interval_s() const noexcept { return interval_s_; }
  const DatasetHandle& dataset() const noexcept { return dataset_; }
  std::uint64_t readings_emitted() const noexcept { return emitted_; }

  /// Schedules the first SenseTick at t = interval.
  void start() override;

  /// Takes one reading at `now`: charges the sense and transmit energy, draws
  /// the next value and stamps it. Empty when the node is inactive or cannot pay.
  std::optional<Reading> sense(SimTime now, RandomStream& rng, bool* wrapped = nullptr);

  /// Energy of one sense + transmit cycle.
  Energy cycle_cost() const;

 protected:
  void on_event(Event& event) override;
  void on_silenced() override;

  MetricId metric_;
  std::uint64_t interval_s_;
  DatasetHandle dataset_;
  SelectionMode selection_;
  std::optional<EventHandle> next_tick_;
  std::uint64_t emitted_ = 0;
};

/// Sensor whose location steps to each waypoint at the waypoint's time.
class MobileSensor : public SensorNode {
 public:
  MobileSensor(Simulation& sim, NodeCommon common, MetricId metric, std::uint64_t interval_s,
               DatasetHandle dataset, SelectionMode selection, std::vector<Waypoint> trajectory);

  const std::vector<Waypoint>& trajectory() const noexcept { return trajectory_; }

  void start() override;

 protected:
  void on_event(Event& event) override;

 private:
  std::vector<Waypoint> trajectory_;
};

/// Location at `now` under the step policy: the waypoint with the largest
/// t <= now, or `fallback` before the first waypoint. Sets `m`'s location.
Location move_to(MobileSensor& m, SimTime now);
Location position_at(std::span<const Waypoint> trajectory, SimTime now, const Location& fallback);

/// Relay: receives and re-sends toward its forward target.
class LinkNode : public Node {
 public:
  LinkNode(Simulation& sim, NodeCommon common);

 protected:
  Energy receive_cost(const PacketArrival& arrival) const override;
  void on_packet(DataPacket&& packet) override;
};

struct GatewayBuffer {
  std::vector<Reading> readings;
  std::size_t expected = 0;
  std::optional<EventHandle> timeout;

  std::map<MetricId, std::vector<double>> values_by_metric() const;
};

/// Buffers readings per round and emits one AggregatedRecord when the round is
/// complete or its timeout fires.
class GatewayNode : public Node {
 public:
  GatewayNode(Simulation& sim, NodeCommon common, std::uint64_t round_interval_s,
              std::uint64_t round_timeout_s);

  std::uint64_t round_interval_s() const noexcept { return round_interval_s_; }
  std::uint64_t round_timeout_s() const noexcept { return round_timeout_s_; }
  const std::map<std::uint64_t, GatewayBuffer>& open_rounds() const noexcept { return open_; }
  std::uint64_t records_emitted() const noexcept { return records_emitted_; }

  /// Adds the packet's readings to their rounds; flushes any round that is now complete.
  void collect(const std::vector<Reading>& readings, SimTime now);

  /// Builds the round's record, clears its buffer and sends it on. Empty rounds emit nothing.
  std::optional<AggregatedRecord> flush(std::uint64_t round, SimTime now);

 protected:
  void on_packet(DataPacket&& packet) override;
  void on_event(Event& event) override;
  void on_silenced() override;

 private:
  std::uint64_t round_of(SimTime sensed_at) const;

  std::uint64_t round_interval_s_;
  std::uint64_t round_timeout_s_;
  std::map<std::uint64_t, GatewayBuffer> open_;
  std::vector<std::uint64_t> flushed_;  // sorted
  std::uint64_t records_emitted_ = 0;
};

/// Round index, day and round-of-day for a round starting at k * interval.
struct RoundPosition {
  std::uint64_t round = 0;
  std::uint32_t day = 0;
  std::uint32_t round_in_day = 0;
};
RoundPosition round_position(std::uint64_t round, std::uint64_t interval_s);

}  // namespace iotsim
