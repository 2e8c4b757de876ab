#include "iotsim/nodes.hpp"

#include <algorithm>
#include <cstdio>

#include "iotsim/error.hpp"
#include "iotsim/simulation.hpp"

namespace iotsim {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Node

Node::Node(Simulation& sim, NodeKind kind, NodeCommon common)
    : sim_(sim), kind_(kind), common_(std::move(common)) {}

void Node::handle(Event& event) {
  if (auto* arrival = std::get_if<PacketArrival>(&event.payload)) {
    DataPacket& packet = arrival->packet;
    if (!active() || !charge(receive_cost(*arrival))) {
      sim_.packet_lost(packet, LossReason::DeadNode, name());
      return;
    }
    sim_.packet_delivered(packet, name());
    on_packet(std::move(packet));
    return;
  }
  if (std::holds_alternative<NodeFailure>(event.payload)) {
    fail();
    return;
  }
  if (std::holds_alternative<BatteryDepleted>(event.payload)) {
    sim_.trace(TraceKind::Battery, name(), {{"state", "depleted"}, {"level_J", "0"}});
    return;
  }
  if (std::holds_alternative<OutageStart>(event.payload) ||
      std::holds_alternative<OutageEnd>(event.payload)) {
    const bool start = std::holds_alternative<OutageStart>(event.payload);
    sim_.trace(TraceKind::Failure, name(), {{"outage", start ? "start" : "end"}});
    return;
  }
  if (const auto* change = std::get_if<SignalChange>(&event.payload)) {
    set_signal(common_.connection, change->strength);
    sim_.trace(TraceKind::Failure, name(),
               {{"signal", fmt_double(change->strength)},
                {"loss_probability", fmt_double(common_.connection.loss_probability())}});
    if (change->strength == 0.0) sim_.on_signal_lost(*this);
    return;
  }
  on_event(event);
}

bool Node::charge(Energy cost) {
  if (cost.micro_joules == 0) return !silent_;
  if (std::holds_alternative<Remaining>(common_.power.drain(cost))) return true;
  if (!silent_) {
    silent_ = true;
    on_silenced();
    sim_.topology_changed();
    sim_.kernel().schedule(sim_.now(), id(), BatteryDepleted{});
  }
  return false;
}

void Node::fail() {
  if (!common_.alive) return;
  common_.alive = false;
  sim_.trace(TraceKind::Failure, name(), {{"node_failure", "1"}});
  on_silenced();
  sim_.topology_changed();
  sim_.on_node_failure(*this);
}

void Node::on_packet(DataPacket&&) {}

void Node::on_event(Event&) {}

void Node::send(EntityId to, PacketPayload payload, EntityId origin, SimTime created_at) {
  sim_.transmit_from(*this, to, std::move(payload), origin, created_at);
}

void Node::forward(DataPacket&& packet) {
  if (!common_.forward_target) {
    sim_.trace(TraceKind::Failure, name(),
               {{"error", "NoForwardTarget"}, {"packet", std::to_string(packet.id)}});
    return;
  }
  send(*common_.forward_target, std::move(packet.payload), packet.origin, packet.created_at);
}

// ---------------------------------------------------------------------------
// SensorNode

SensorNode::SensorNode(Simulation& sim, NodeCommon common, MetricId metric,
                       std::uint64_t interval_s, DatasetHandle dataset, SelectionMode selection,
                       NodeKind kind)
    : Node(sim, kind, std::move(common)),
      metric_(metric),
      interval_s_(interval_s),
      dataset_(std::move(dataset)),
      selection_(std::move(selection)) {}

void SensorNode::start() {
  if (interval_s_ > 0 && interval_s_ <= sim_.horizon().seconds) {
    next_tick_ = sim_.kernel().schedule(SimTime{interval_s_}, id(), SenseTick{});
  }
}

Energy SensorNode::cycle_cost() const {
  const std::uint64_t bytes = packet_size(PacketPayload{std::vector<Reading>(1)});
  return Energy::from_joules(sim_.defaults().sense_J) +
         transfer_energy(bytes, common_.connection.type().tx_energy_J_per_byte);
}

std::optional<Reading> SensorNode::sense(SimTime now, RandomStream& rng, bool* wrapped) {
  if (!active() || !charge(cycle_cost())) return std::nullopt;
  const double value = next_value(dataset_, selection_, rng, wrapped);
  ++emitted_;
  return Reading{id(), metric_, value, now, common_.power.percent()};
}

void SensorNode::on_event(Event& event) {
  if (!std::holds_alternative<SenseTick>(event.payload)) return;
  next_tick_.reset();
  const SimTime now = sim_.now();
  bool wrapped = false;
  auto reading = sense(now, sim_.rng(id()), &wrapped);
  if (!reading) return;

  sim_.reading_emitted();
  if (sim_.tracing()) {
    TraceDetail detail{{"metric", sim_.metric_name(metric_)}, {"value", fmt_double(reading->value)}};
    if (reading->battery_pct) detail.emplace_back("battery_pct", fmt_double(*reading->battery_pct));
    if (wrapped) detail.emplace_back("wrapped", "1");
    sim_.trace(TraceKind::Sense, name(), std::move(detail));
  } else {
    sim_.trace(TraceKind::Sense, name());
  }
  if (common_.forward_target) {
    send(*common_.forward_target, std::vector<Reading>{*reading}, id(), now);
  } else {
    sim_.trace(TraceKind::Failure, name(), {{"error", "NoForwardTarget"}});
  }

  if (active() && now.seconds + interval_s_ <= sim_.horizon().seconds) {
    next_tick_ = sim_.kernel().schedule(now + interval_s_, id(), SenseTick{});
  }
}

void SensorNode::on_silenced() {
  if (next_tick_) {
    sim_.kernel().cancel(*next_tick_);
    next_tick_.reset();
  }
}

// ---------------------------------------------------------------------------
// MobileSensor

MobileSensor::MobileSensor(Simulation& sim, NodeCommon common, MetricId metric,
                           std::uint64_t interval_s, DatasetHandle dataset,
                           SelectionMode selection, std::vector<Waypoint> trajectory)
    : SensorNode(sim, std::move(common), metric, interval_s, std::move(dataset),
                 std::move(selection), NodeKind::MobileSensor),
      trajectory_(std::move(trajectory)) {}

void MobileSensor::start() {
  SensorNode::start();
  for (std::uint32_t i = 0; i < trajectory_.size(); ++i) {
    const auto t = trajectory_[i].t;
    if (t.seconds == 0) {
      common_.location = trajectory_[i].location;
    } else if (t <= sim_.horizon()) {
      sim_.kernel().schedule(t, id(), MoveWaypoint{i});
    }
  }
}

void MobileSensor::on_event(Event& event) {
  if (std::holds_alternative<MoveWaypoint>(event.payload)) {
    if (!active()) return;
    const Location loc = move_to(*this, sim_.now());
    sim_.trace(TraceKind::Move, name(),
               {{"x", fmt_double(loc.x)}, {"y", fmt_double(loc.y)}, {"z", fmt_double(loc.z)}});
    return;
  }
  SensorNode::on_event(event);
}

Location position_at(std::span<const Waypoint> trajectory, SimTime now, const Location& fallback) {
  auto it = std::upper_bound(trajectory.begin(), trajectory.end(), now,
                             [](SimTime t, const Waypoint& w) { return t < w.t; });
  if (it == trajectory.begin()) return fallback;
  return std::prev(it)->location;
}

Location move_to(MobileSensor& m, SimTime now) {
  const Location loc = position_at(m.trajectory(), now, m.common().location);
  m.common().location = loc;
  return loc;
}

// ---------------------------------------------------------------------------
// LinkNode

LinkNode::LinkNode(Simulation& sim, NodeCommon common)
    : Node(sim, NodeKind::Link, std::move(common)) {}

Energy LinkNode::receive_cost(const PacketArrival& arrival) const {
  if (!common_.forward_target) return arrival.rx_cost;
  return arrival.rx_cost + transfer_energy(arrival.packet.size_bytes,
                                           common_.connection.type().tx_energy_J_per_byte);
}

void LinkNode::on_packet(DataPacket&& packet) { forward(std::move(packet)); }

// ---------------------------------------------------------------------------
// GatewayNode

std::map<MetricId, std::vector<double>> GatewayBuffer::values_by_metric() const {
  std::map<MetricId, std::vector<double>> out;
  for (const auto& r : readings) out[r.metric].push_back(r.value);
  return out;
}

RoundPosition round_position(std::uint64_t round, std::uint64_t interval_s) {
  const SimTime t{round * interval_s};
  const std::uint32_t day = day_of(t);
  const std::uint64_t before = (static_cast<std::uint64_t>(day - 1) * kSecondsPerDay) / interval_s;
  return RoundPosition{round, day, static_cast<std::uint32_t>(round - before)};
}

GatewayNode::GatewayNode(Simulation& sim, NodeCommon common, std::uint64_t round_interval_s,
                         std::uint64_t round_timeout_s)
    : Node(sim, NodeKind::Gateway, std::move(common)),
      round_interval_s_(round_interval_s),
      round_timeout_s_(round_timeout_s) {}

std::uint64_t GatewayNode::round_of(SimTime sensed_at) const {
  return (sensed_at.seconds + round_interval_s_ - 1) / round_interval_s_;
}

void GatewayNode::collect(const std::vector<Reading>& readings, SimTime now) {
  std::vector<std::uint64_t> touched;
  for (const auto& r : readings) {
    const std::uint64_t k = round_of(r.sensed_at);
    if (std::binary_search(flushed_.begin(), flushed_.end(), k)) {
      sim_.trace(TraceKind::Failure, name(),
                 {{"error", "LateReading"}, {"round", std::to_string(k)},
                  {"source", sim_.name_of(r.source)}});
      continue;
    }
    auto [it, inserted] = open_.try_emplace(k);
    GatewayBuffer& buffer = it->second;
    if (inserted) {
      const SimTime round_time{k * round_interval_s_};
      buffer.expected = sim_.expected_readings(*this, round_time);
      const SimTime deadline = std::max(now, round_time + round_timeout_s_);
      buffer.timeout = sim_.kernel().schedule(deadline, id(), FlushAggregate{k});
    }
    buffer.readings.push_back(r);
    if (std::find(touched.begin(), touched.end(), k) == touched.end()) touched.push_back(k);
  }
  for (std::uint64_t k : touched) {
    auto it = open_.find(k);
    if (it != open_.end() && it->second.expected > 0 &&
        it->second.readings.size() >= it->second.expected) {
      flush(k, now);
    }
  }
}

std::optional<AggregatedRecord> GatewayNode::flush(std::uint64_t round, SimTime now) {
  auto it = open_.find(round);
  if (it == open_.end()) return std::nullopt;
  GatewayBuffer buffer = std::move(it->second);
  open_.erase(it);
  if (buffer.timeout) sim_.kernel().cancel(*buffer.timeout);
  flushed_.insert(std::upper_bound(flushed_.begin(), flushed_.end(), round), round);
  if (buffer.readings.empty()) return std::nullopt;

  const RoundPosition pos = round_position(round, round_interval_s_);
  AggregatedRecord record{id(),
                          round,
                          pos.day,
                          pos.round_in_day,
                          SimTime{round * round_interval_s_},
                          std::move(buffer.readings),
                          common_.power.percent()};
  ++records_emitted_;

  if (sim_.tracing()) {
    TraceDetail detail{{"round", std::to_string(round)},
                       {"day", std::to_string(pos.day)},
                       {"reading", std::to_string(pos.round_in_day)},
                       {"count", std::to_string(record.readings.size())}};
    for (const auto& [metric, values] : record.values_by_metric()) {
      detail.emplace_back(sim_.metric_name(metric), round_mean(values).reported.str());
    }
    sim_.trace(TraceKind::Aggregate, name(), std::move(detail));
  } else {
    sim_.trace(TraceKind::Aggregate, name());
  }

  const Energy cost = transfer_energy(packet_size(PacketPayload{record}),
                                      common_.connection.type().tx_energy_J_per_byte);
  if (!charge(cost)) return record;
  if (common_.forward_target) {
    send(*common_.forward_target, record, id(), now);
  } else {
    sim_.trace(TraceKind::Failure, name(), {{"error", "NoForwardTarget"}});
  }
  return record;
}

void GatewayNode::on_packet(DataPacket&& packet) {
  if (auto* readings = std::get_if<std::vector<Reading>>(&packet.payload)) {
    collect(*readings, sim_.now());
    return;
  }
  forward(std::move(packet));
}

void GatewayNode::on_event(Event& event) {
  if (const auto* f = std::get_if<FlushAggregate>(&event.payload)) {
    if (!active()) return;
    auto it = open_.find(f->round);
    if (it != open_.end()) it->second.timeout.reset();
    flush(f->round, sim_.now());
  }
}

void GatewayNode::on_silenced() {
  for (auto& [round, buffer] : open_) {
    if (buffer.timeout) sim_.kernel().cancel(*buffer.timeout);
  }
  open_.clear();
}

}  // namespace iotsim
