#include "iotsim/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "iotsim/error.hpp"
#include "iotsim/memory.hpp"

namespace iotsim {

namespace {

NetworkConnection make_connection(const ConnectionSpec& spec, const ConnectionTable& table) {
  return NetworkConnection(table.get(spec.type), spec.strength, spec.base_loss);
}

PowerSource make_power(const PowerSpec& spec) {
  switch (spec.kind) {
    case PowerKind::Battery: return PowerSource::battery(Energy::from_joules(spec.capacity_J));
    case PowerKind::UsbCharging: return PowerSource::usb_charging();
    case PowerKind::ContinuousSupply: return PowerSource::continuous();
  }
  return PowerSource::continuous();
}

std::vector<PhysicalHost> expand_hosts(const DatacenterSpec& dc) {
  std::vector<PhysicalHost> out;
  for (const auto& h : dc.hosts) {
    for (std::uint32_t i = 0; i < h.count; ++i) {
      PhysicalHost host;
      host.id = h.count > 1 ? h.id + "#" + std::to_string(i) : h.id;
      host.pes = h.pes;
      host.mips_per_pe = h.mips_per_pe;
      host.ram_bytes = h.ram_bytes;
      host.storage_bytes = h.storage_bytes;
      host.idle_W = h.idle_W;
      host.full_W = h.full_W;
      host.max_vms = h.max_vms;
      out.push_back(std::move(host));
    }
  }
  return out;
}

// Shortest sensor interval per gateway, over sensors whose forward chain
// reaches the gateway through relays only.
std::map<std::string, std::uint64_t, std::less<>> shortest_upstream_intervals(const ScenarioSpec& spec) {
  std::map<std::string_view, const NodeSpec*, std::less<>> by_id;
  for (const auto& n : spec.nodes) by_id.emplace(n.id, &n);
  std::map<std::string, std::uint64_t, std::less<>> best;
  for (const auto& n : spec.nodes) {
    const SensorSpec* s = n.sensor();
    if (!s || s->interval_s == 0) continue;
    std::optional<std::string> hop = n.forward;
    for (std::size_t guard = 0; hop && guard <= spec.nodes.size(); ++guard) {
      auto it = by_id.find(*hop);
      if (it == by_id.end()) break;
      const NodeSpec* next = it->second;
      if (next->kind() == NodeKind::Gateway) {
        auto [slot, inserted] = best.try_emplace(next->id, s->interval_s);
        if (!inserted) slot->second = std::min(slot->second, s->interval_s);
        break;
      }
      if (next->kind() != NodeKind::Link) break;
      hop = next->forward;
    }
  }
  return best;
}

}  // namespace

Simulation::Simulation(const ScenarioSpec& spec, TraceSink* sink) : spec_(spec), sink_(sink) {
  const auto diagnostics = validate(spec_);
  std::string errors;
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) errors += "\n  " + d.str();
  }
  if (!errors.empty()) throw Error(Errc::InvalidScenario, "invalid scenario:" + errors);
  build();
}

Simulation::~Simulation() = default;

EntityId Simulation::register_name(const std::string& name, Entity& entity) {
  const EntityId id = kernel_.add_entity(entity);
  by_id_.push_back(&entity);
  node_index_.push_back(nullptr);
  names_.push_back(name);
  ids_.emplace(name, id);
  rngs_.emplace_back(spec_.seed, id);
  return id;
}

void Simulation::build() {
  // Datasets are shared by every sensor that reads them.
  std::map<std::string, std::shared_ptr<const Dataset>, std::less<>> datasets;
  for (const auto& d : spec_.datasets) {
    auto data = std::make_shared<Dataset>();
    data->name = d.name;
    data->values = d.values;
    if (data->values.empty() && d.path) data->values = load_dataset(*d.path).values;
    datasets.emplace(d.name, std::move(data));
  }

  auto dataset_of = [&](const std::string& name) {
    auto it = datasets.find(name);
    return DatasetHandle(it != datasets.end() ? it->second : std::make_shared<const Dataset>());
  };

  const EntityId first_node = static_cast<EntityId>(kernel_.entity_count());
  const EntityId first_dc = first_node + static_cast<EntityId>(spec_.nodes.size());
  const EntityId broker_id = first_dc + static_cast<EntityId>(spec_.datacenters.size());
  std::map<std::string, EntityId, std::less<>> planned;
  for (std::size_t i = 0; i < spec_.nodes.size(); ++i) {
    planned.emplace(spec_.nodes[i].id, first_node + static_cast<EntityId>(i));
  }
  for (std::size_t i = 0; i < spec_.datacenters.size(); ++i) {
    planned.emplace(spec_.datacenters[i].id, first_dc + static_cast<EntityId>(i));
  }
  auto resolve = [&](const std::optional<std::string>& name) -> std::optional<EntityId> {
    if (!name) return std::nullopt;
    auto it = planned.find(*name);
    if (it == planned.end()) throw Error(Errc::UnknownEntity, "unknown node '" + *name + "'");
    return it->second;
  };

  const auto upstream_intervals = shortest_upstream_intervals(spec_);
  nodes_.reserve(spec_.nodes.size());
  for (std::size_t i = 0; i < spec_.nodes.size(); ++i) {
    const NodeSpec& n = spec_.nodes[i];
    NodeCommon common;
    common.id = first_node + static_cast<EntityId>(i);
    common.name = n.id;
    common.location = n.location;
    common.coverage_m = n.coverage_m;
    common.power = make_power(n.power);
    common.connection = make_connection(n.connection, spec_.defaults.connections);
    common.forward_target = resolve(n.forward);

    std::unique_ptr<Node> node;
    if (const auto* s = std::get_if<SensorSpec>(&n.role)) {
      node = std::make_unique<SensorNode>(*this, std::move(common), metric_id(s->metric), s->interval_s,
                                          dataset_of(s->dataset), s->selection);
    } else if (const auto* m = std::get_if<MobileSensorSpec>(&n.role)) {
      auto trajectory = m->trajectory;
      if (trajectory.empty() && m->trajectory_path) trajectory = load_trajectory(*m->trajectory_path);
      node = std::make_unique<MobileSensor>(*this, std::move(common), metric_id(m->sensor.metric),
                                            m->sensor.interval_s,
                                            dataset_of(m->sensor.dataset),
                                            m->sensor.selection, std::move(trajectory));
    } else if (std::holds_alternative<LinkSpec>(n.role)) {
      node = std::make_unique<LinkNode>(*this, std::move(common));
    } else if (const auto* g = std::get_if<GatewaySpec>(&n.role)) {
      auto found = upstream_intervals.find(n.id);
      const std::uint64_t interval = g->round_interval_s.value_or(
          found != upstream_intervals.end() ? found->second : kSecondsPerHour);
      node = std::make_unique<GatewayNode>(*this, std::move(common), interval,
                                           g->round_timeout_s.value_or(interval));
    } else if (const auto* e = std::get_if<EdgeSpec>(&n.role)) {
      node = std::make_unique<EdgeDevice>(*this, std::move(common), e->mips, e->storage_bytes,
                                          e->processing, EdgeTargets{resolve(e->cloud), resolve(e->iot)},
                                          spec_.defaults.edge_instructions_per_reading);
    } else if (const auto* f = std::get_if<FogSpec>(&n.role)) {
      node = std::make_unique<FogNode>(*this, std::move(common), f->mips);
    }
    const EntityId id = register_name(n.id, *node);
    node_index_[id] = node.get();
    nodes_.push_back(std::move(node));
  }

  datacenters_.reserve(spec_.datacenters.size());
  for (const auto& d : spec_.datacenters) {
    auto dc = std::make_unique<IoTDatacenter>(*this, d.id, expand_hosts(d), d.analysis_service);
    dc->set_id(register_name(d.id, *dc));
    datacenters_.push_back(std::move(dc));
  }

  broker_ = std::make_unique<Broker>(*this);
  broker_->set_id(register_name("broker", *broker_));
  if (broker_->id() != broker_id) throw Error(Errc::UnknownEntity, "entity numbering mismatch");
  for (auto& dc : datacenters_) broker_->add_datacenter(*dc);
  for (const auto& t : spec_.service_types) broker_->register_service(t);

  for (const auto& policy : spec_.alerts) metric_id(policy.metric);

  for (const auto& v : spec_.vms) {
    std::optional<std::size_t> dc;
    if (v.datacenter) {
      for (std::size_t i = 0; i < spec_.datacenters.size(); ++i) {
        if (spec_.datacenters[i].id == *v.datacenter) dc = i;
      }
    }
    const VmShape shape{v.pes, v.mips_per_pe, v.ram_bytes};
    for (std::uint32_t i = 0; i < v.count; ++i) {
      broker_->provision(v.count > 1 ? v.id + "#" + std::to_string(i) : v.id, shape, v.services, dc);
    }
  }

  for (const auto& w : spec_.workloads) generate_workload(w, *broker_);

  for (const auto& f : spec_.failures) {
    if (const auto* nf = std::get_if<NodeFailureSpec>(&f)) {
      kernel_.schedule(SimTime{nf->at_s}, id_of(nf->node), NodeFailure{});
    } else if (const auto* o = std::get_if<OutageSpec>(&f)) {
      Node* target = node(o->node);
      target->common().connection.add_outage(OutageWindow{SimTime{o->from_s}, SimTime{o->to_s}});
      kernel_.schedule(SimTime{o->from_s}, target->id(), OutageStart{});
      kernel_.schedule(SimTime{o->to_s}, target->id(), OutageEnd{});
    } else if (const auto* s = std::get_if<SignalSpec>(&f)) {
      kernel_.schedule(SimTime{s->at_s}, id_of(s->node), SignalChange{s->strength});
    }
  }

  // Partial rounds flush on their timeout, so the run must outlast the longest one.
  std::uint64_t longest_timeout = 0;
  for (const auto& n : nodes_) {
    if (const auto* g = dynamic_cast<const GatewayNode*>(n.get())) {
      longest_timeout = std::max(longest_timeout, g->round_timeout_s());
    }
  }
  end_s_ = spec_.horizon_s + longest_timeout + spec_.defaults.timing.drain_s;

  const std::uint64_t days = (spec_.horizon_s + kSecondsPerDay - 1) / kSecondsPerDay;
  const std::uint64_t end = end_s_;
  for (std::uint64_t d = 1; d <= days; ++d) {
    const SimTime at{d * kSecondsPerDay + spec_.defaults.timing.day_close_s};
    if (at.seconds > end) break;
    for (auto& dc : datacenters_) kernel_.schedule(at, dc->id(), DayBoundary{static_cast<std::uint32_t>(d)});
  }

  for (auto& n : nodes_) n->start();
}

RunStats Simulation::run() {
  const bool reset = reset_peak_memory();
  const auto start = std::chrono::steady_clock::now();
  run_until(end_time());
  const auto stop = std::chrono::steady_clock::now();
  if (auto* writer = dynamic_cast<CsvTraceWriter*>(sink_)) writer->flush();

  RunStats s = stats();
  s.wall_clock_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  const PeakMemory peak = peak_memory();
  if (peak.bytes > 0) {
    s.peak_memory_bytes = peak.bytes;
    s.peak_memory_source = reset ? peak.source : peak.source + "_process";
  } else {
    s.peak_memory_bytes = estimated_memory_bytes();
    s.peak_memory_source = "estimate";
  }
  return s;
}

RunStats Simulation::run_until(SimTime until) {
  kernel_.run(until);
  return stats();
}

RunStats Simulation::stats() const {
  RunStats s;
  s.events_processed = kernel_.events_processed();
  s.final_time = kernel_.now();
  s.trace_hash = kernel_.trace_hash();
  s.packets_sent = packets_sent_;
  s.packets_delivered = packets_delivered_;
  s.packets_lost = packets_lost_;
  s.packets_in_flight = packets_sent_ - packets_delivered_ - packets_lost_;
  s.readings_emitted = readings_;
  return s;
}

std::optional<EntityId> Simulation::find(std::string_view name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

EntityId Simulation::id_of(std::string_view name) const {
  auto id = find(name);
  if (!id) throw Error(Errc::UnknownEntity, "unknown entity '" + std::string(name) + "'");
  return *id;
}

const std::string& Simulation::name_of(EntityId id) const {
  if (id >= names_.size()) throw Error(Errc::UnknownEntity, "unknown entity " + std::to_string(id));
  return names_[id];
}

Node* Simulation::node(EntityId id) { return id < node_index_.size() ? node_index_[id] : nullptr; }

Node* Simulation::node(std::string_view name) {
  auto id = find(name);
  return id ? node(*id) : nullptr;
}

IoTDatacenter* Simulation::datacenter(EntityId id) {
  for (auto& dc : datacenters_) {
    if (dc->id() == id) return dc.get();
  }
  return nullptr;
}

IoTDatacenter* Simulation::datacenter(std::string_view name) {
  auto id = find(name);
  return id ? datacenter(*id) : nullptr;
}

std::size_t Simulation::nodes_built() const {
  std::size_t n = nodes_.size();
  for (const auto& dc : datacenters_) n += dc->hosts().size();
  return n;
}

std::size_t Simulation::sensor_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) {
    return n->kind() == NodeKind::Sensor || n->kind() == NodeKind::MobileSensor;
  }));
}

MetricId Simulation::metric_id(std::string_view name) {
  auto it = metric_ids_.find(name);
  if (it != metric_ids_.end()) return it->second;
  const auto id = static_cast<MetricId>(metrics_.size());
  metrics_.emplace_back(name);
  metric_ids_.emplace(std::string(name), id);
  return id;
}

const std::string& Simulation::metric_name(MetricId id) const { return metrics_.at(id); }

std::optional<MetricId> Simulation::find_metric(std::string_view name) const {
  auto it = metric_ids_.find(name);
  if (it == metric_ids_.end()) return std::nullopt;
  return it->second;
}

RandomStream& Simulation::rng(EntityId id) { return rngs_.at(id); }

void Simulation::transmit_from(Node& from, EntityId to, PacketPayload payload, EntityId origin,
                               SimTime created_at) {
  const SimTime now = kernel_.now();
  DataPacket packet;
  packet.id = next_packet_id_++;
  packet.origin = origin;
  packet.source = from.id();
  packet.destination = to;
  packet.created_at = created_at;
  packet.size_bytes = packet_size(payload);
  packet.payload = std::move(payload);
  if (from.common().transform) from.common().transform(packet);
  ++packets_sent_;

  if (sink_) {
    trace(TraceKind::PacketSent, from.name(),
          {{"packet", std::to_string(packet.id)},
           {"to", name_of(to)},
           {"payload", std::string(iotsim::payload_name(packet.payload))},
           {"bytes", std::to_string(packet.size_bytes)}});
  } else {
    trace(TraceKind::PacketSent, from.name());
  }

  Node* target = node(to);
  NetworkConnection& conn = from.common().connection;
  if (target && !in_range(from.common().location, target->common().location, conn.type())) {
    ++conn.transmits;
    ++conn.lost;
    packet_lost(packet, LossReason::OutOfRange, from.name());
    return;
  }
  const TransmitOutcome outcome = transmit(conn, packet, now, rng(from.id()));
  if (const auto* lost = std::get_if<Lost>(&outcome)) {
    packet_lost(packet, lost->reason, from.name());
    return;
  }
  const SimTime at = std::get<DeliveredAt>(outcome).time;
  Energy rx{0};
  if (target) rx = transfer_energy(packet.size_bytes, target->common().connection.type().rx_energy_J_per_byte);
  kernel_.schedule(at, to, PacketArrival{std::move(packet), rx});
}

void Simulation::packet_delivered(const DataPacket& packet, std::string_view at) {
  ++packets_delivered_;
  if (sink_) {
    trace(TraceKind::PacketDelivered, at,
          {{"packet", std::to_string(packet.id)},
           {"from", name_of(packet.source)},
           {"latency_s", std::to_string(kernel_.now().seconds - packet.created_at.seconds)}});
  } else {
    trace(TraceKind::PacketDelivered, at);
  }
}

void Simulation::packet_lost(const DataPacket& packet, LossReason reason, std::string_view at) {
  ++packets_lost_;
  if (sink_) {
    trace(TraceKind::PacketLost, at,
          {{"packet", std::to_string(packet.id)},
           {"from", name_of(packet.source)},
           {"to", name_of(packet.destination)},
           {"reason", std::string(to_string(reason))}});
  } else {
    trace(TraceKind::PacketLost, at);
  }
}

void Simulation::trace(TraceKind kind, std::string_view subject, TraceDetail detail) {
  ++kind_counts_[static_cast<std::size_t>(kind)];
  if (sink_) sink_->record(TraceRecord{kernel_.now(), kind, std::string(subject), std::move(detail)});
}

const std::vector<const SensorNode*>& Simulation::upstream_sensors(const GatewayNode& gateway) {
  UpstreamCache& cache = upstream_[gateway.id()];
  if (cache.version == topology_version_) return cache.sensors;

  // Rebuild every gateway's list in one pass over the sensors.
  for (auto& [id, c] : upstream_) {
    c.sensors.clear();
    c.version = topology_version_;
  }
  for (const auto& n : nodes_) {
    const auto* sensor = dynamic_cast<const SensorNode*>(n.get());
    if (!sensor || !sensor->active()) continue;
    std::optional<EntityId> hop = sensor->common().forward_target;
    for (std::size_t guard = 0; hop && guard <= nodes_.size(); ++guard) {
      Node* next = node(*hop);
      if (!next) break;
      if (next->kind() == NodeKind::Gateway) {
        auto it = upstream_.find(next->id());
        if (it != upstream_.end()) it->second.sensors.push_back(sensor);
        break;
      }
      if (next->kind() != NodeKind::Link) break;
      hop = next->common().forward_target;
    }
  }
  return cache.sensors;
}

std::size_t Simulation::expected_readings(const GatewayNode& gateway, SimTime round_time) {
  const std::uint64_t interval = gateway.round_interval_s();
  const std::uint64_t hi = std::min(round_time.seconds, spec_.horizon_s);
  const std::uint64_t lo = round_time.seconds >= interval ? round_time.seconds - interval : 0;
  if (hi <= lo) return 0;
  std::size_t expected = 0;
  for (const SensorNode* s : upstream_sensors(gateway)) {
    if (!s->active() || s->interval_s() == 0) continue;
    expected += hi / s->interval_s() - lo / s->interval_s();
  }
  return expected;
}

void Simulation::act(EntityId actor, ActuatorTrigger trigger, EntityId watched, EntityId new_target) {
  if (new_target >= by_id_.size()) {
    throw Error(Errc::DeadTarget, "rewire target " + std::to_string(new_target) + " does not exist");
  }
  if (Node* target = node(new_target); target && !target->active()) {
    throw Error(Errc::DeadTarget, "rewire target '" + name_of(new_target) + "' is not active");
  }
  std::size_t rewired = 0;
  for (auto& n : nodes_) {
    if (n->common().forward_target == watched && n->id() != new_target) {
      n->common().forward_target = new_target;
      ++rewired;
    }
  }
  topology_changed();
  trace(TraceKind::Actuate, name_of(actor),
        {{"on", trigger == ActuatorTrigger::NodeFailure ? "node_failure" : "signal_lost"},
         {"watch", name_of(watched)},
         {"rewire_to", name_of(new_target)},
         {"rewired", std::to_string(rewired)}});
}

void Simulation::fire_actuators(ActuatorTrigger trigger, Node& watched) {
  for (const auto& a : spec_.actuators) {
    if (a.on != trigger || a.watch != watched.name()) continue;
    Node* actor = node(a.node);
    if (!actor || !actor->active()) continue;
    try {
      act(actor->id(), trigger, watched.id(), id_of(a.rewire_to));
    } catch (const Error& e) {
      if (e.code() != Errc::DeadTarget) throw;
      trace(TraceKind::Failure, a.node, {{"error", "DeadTarget"}, {"target", a.rewire_to}});
    }
  }
}

void Simulation::on_node_failure(Node& n) { fire_actuators(ActuatorTrigger::NodeFailure, n); }

void Simulation::on_signal_lost(Node& n) { fire_actuators(ActuatorTrigger::SignalLost, n); }

std::uint64_t Simulation::estimated_memory_bytes() const {
  std::uint64_t bytes = sizeof(*this);
  bytes += nodes_.size() * (sizeof(GatewayNode) + 64);
  bytes += kernel_.peak_pending() * (sizeof(Event) + 64);
  bytes += kernel_.events_processed();  // status vector
  for (const auto& dc : datacenters_) {
    bytes += dc->hosts().size() * sizeof(PhysicalHost);
    for (const auto& r : dc->store()) bytes += sizeof(StoredRecord) + r.record.readings.size() * sizeof(Reading);
  }
  bytes += broker_->vms().size() * sizeof(VirtualMachine);
  bytes += broker_->completed().size() * sizeof(IoTCloudlet);
  return bytes;
}

}  // namespace iotsim
