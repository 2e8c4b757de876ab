#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "iotsim/nodes.hpp"
#include "iotsim/scenario.hpp"

namespace iotsim {

struct EdgeTargets {
  std::optional<EntityId> cloud;
  std::optional<EntityId> iot;
};

/// Edge device: processes aggregated records (passthrough, downsample or
/// threshold filter), pays a processing delay, then forwards to its cloud
/// and/or IoT target. Other payloads pass through unprocessed.
class EdgeDevice : public Node {
 public:
  EdgeDevice(Simulation& sim, NodeCommon common, double mips, std::uint64_t storage_bytes,
             EdgeProcessing processing, EdgeTargets targets, double instructions_per_reading);

  double mips() const noexcept { return mips_; }
  const EdgeProcessing& processing() const noexcept { return processing_; }
  const EdgeTargets& targets() const noexcept { return targets_; }
  std::uint64_t rounds_seen() const noexcept { return rounds_seen_; }

  /// Applies the processing variant; counts the round for Downsample.
  std::optional<AggregatedRecord> process(const AggregatedRecord& record);

  /// ceil(readings * instructions_per_reading / (mips * 1e6)) seconds.
  std::uint64_t processing_delay(const AggregatedRecord& record) const;

 protected:
  void on_packet(DataPacket&& packet) override;
  void on_event(Event& event) override;

 private:
  void emit(PacketPayload payload, EntityId origin, SimTime created_at);

  double mips_;
  std::uint64_t storage_bytes_;
  EdgeProcessing processing_;
  EdgeTargets targets_;
  double instructions_per_reading_;
  std::uint64_t rounds_seen_ = 0;
  std::uint64_t next_job_ = 0;
  std::map<std::uint64_t, DataPacket> jobs_;  // processed output awaiting its completion event
};

/// Pure processing step, exposed for testing: `round_number` is the 1-based
/// count of records this device has seen including this one.
std::optional<AggregatedRecord> edge_process(const EdgeProcessing& processing,
                                             const AggregatedRecord& record,
                                             std::uint64_t round_number);

/// Fog node: forwards every packet to its next hop.
class FogNode : public Node {
 public:
  FogNode(Simulation& sim, NodeCommon common, double mips);

  double mips() const noexcept { return mips_; }

 protected:
  Energy receive_cost(const PacketArrival& arrival) const override;
  void on_packet(DataPacket&& packet) override;

 private:
  double mips_;
};

}  // namespace iotsim
