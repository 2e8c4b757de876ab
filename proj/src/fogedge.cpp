#include "iotsim/fogedge.hpp"

#include <cmath>

#include "iotsim/simulation.hpp"

namespace iotsim {

std::optional<AggregatedRecord> edge_process(const EdgeProcessing& processing,
                                             const AggregatedRecord& record,
                                             std::uint64_t round_number) {
  if (const auto* down = std::get_if<Downsample>(&processing)) {
    const std::uint64_t n = down->keep_one_in == 0 ? 1 : down->keep_one_in;
    if ((round_number - 1) % n != 0) return std::nullopt;
    return record;
  }
  if (const auto* filter = std::get_if<ThresholdFilter>(&processing)) {
    AggregatedRecord out = record;
    std::erase_if(out.readings, [&](const Reading& r) {
      return r.value < filter->min || r.value > filter->max;
    });
    if (out.readings.empty()) return std::nullopt;
    return out;
  }
  return record;
}

EdgeDevice::EdgeDevice(Simulation& sim, NodeCommon common, double mips,
                       std::uint64_t storage_bytes, EdgeProcessing processing,
                       EdgeTargets targets, double instructions_per_reading)
    : Node(sim, NodeKind::Edge, std::move(common)),
      mips_(mips),
      storage_bytes_(storage_bytes),
      processing_(std::move(processing)),
      targets_(targets),
      instructions_per_reading_(instructions_per_reading) {}

std::optional<AggregatedRecord> EdgeDevice::process(const AggregatedRecord& record) {
  ++rounds_seen_;
  return edge_process(processing_, record, rounds_seen_);
}

std::uint64_t EdgeDevice::processing_delay(const AggregatedRecord& record) const {
  if (mips_ <= 0.0) return 0;
  const double instructions = static_cast<double>(record.readings.size()) * instructions_per_reading_;
  return static_cast<std::uint64_t>(std::ceil(instructions / (mips_ * 1e6)));
}

void EdgeDevice::on_packet(DataPacket&& packet) {
  const auto* record = std::get_if<AggregatedRecord>(&packet.payload);
  if (!record) {
    emit(std::move(packet.payload), packet.origin, packet.created_at);
    return;
  }
  auto processed = process(*record);
  if (!processed) return;
  const std::uint64_t delay = processing_delay(*processed);
  if (delay == 0) {
    emit(std::move(*processed), packet.origin, packet.created_at);
    return;
  }
  const std::uint64_t job = next_job_++;
  packet.payload = std::move(*processed);
  jobs_.emplace(job, std::move(packet));
  sim_.kernel().schedule(sim_.now() + delay, id(), CloudletCompletion{job, 0});
}

void EdgeDevice::on_event(Event& event) {
  const auto* done = std::get_if<CloudletCompletion>(&event.payload);
  if (!done) return;
  auto it = jobs_.find(done->cloudlet);
  if (it == jobs_.end()) return;
  DataPacket packet = std::move(it->second);
  jobs_.erase(it);
  if (!active()) return;
  emit(std::move(packet.payload), packet.origin, packet.created_at);
}

void EdgeDevice::emit(PacketPayload payload, EntityId origin, SimTime created_at) {
  const std::optional<EntityId> cloud = targets_.cloud ? targets_.cloud : common_.forward_target;
  if (!cloud && !targets_.iot) {
    sim_.trace(TraceKind::Failure, name(), {{"error", "NoForwardTarget"}});
    return;
  }
  const double tx = common_.connection.type().tx_energy_J_per_byte;
  const std::uint64_t size = packet_size(payload);
  if (cloud) {
    if (!charge(transfer_energy(size, tx))) return;
    if (targets_.iot) {
      send(*cloud, payload, origin, created_at);
    } else {
      send(*cloud, std::move(payload), origin, created_at);
      return;
    }
  }
  if (targets_.iot) {
    if (!charge(transfer_energy(size, tx))) return;
    send(*targets_.iot, std::move(payload), origin, created_at);
  }
}

FogNode::FogNode(Simulation& sim, NodeCommon common, double mips)
    : Node(sim, NodeKind::Fog, std::move(common)), mips_(mips) {}

Energy FogNode::receive_cost(const PacketArrival& arrival) const {
  return arrival.rx_cost + transfer_energy(arrival.packet.size_bytes,
                                           common_.connection.type().tx_energy_J_per_byte);
}

void FogNode::on_packet(DataPacket&& packet) { forward(std::move(packet)); }

}  // namespace iotsim
