#include "iotsim/cloud.hpp"

#include <algorithm>
#include <cmath>

#include "iotsim/error.hpp"
#include "iotsim/simulation.hpp"

namespace iotsim {

double PhysicalHost::energy_joules(std::uint64_t total_s) const {
  const double busy = pes == 0 ? 0.0 : static_cast<double>(busy_pe_seconds) / pes;
  return idle_W * static_cast<double>(total_s) + (full_W - idle_W) * busy;
}

bool fits(const PhysicalHost& host, const VmShape& shape) {
  if (shape.mips_per_pe > host.mips_per_pe) return false;
  if (host.used_pes + shape.pes > host.pes) return false;
  if (host.ram_bytes > 0 && host.used_ram + shape.ram_bytes > host.ram_bytes) return false;
  if (host.max_vms > 0 && host.vm_count >= host.max_vms) return false;
  return true;
}

std::optional<std::size_t> first_fit(std::span<const PhysicalHost> hosts, const VmShape& shape) {
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    if (fits(hosts[i], shape)) return i;
  }
  return std::nullopt;
}

std::uint64_t cloudlet_duration(double length_mi, std::uint32_t pes, double mips_per_pe) {
  if (length_mi <= 0.0) return 0;
  const double rate = static_cast<double>(pes) * mips_per_pe;
  if (rate <= 0.0) throw Error(Errc::OutOfRange, "VM has no processing capacity");
  return static_cast<std::uint64_t>(std::ceil(length_mi / rate));
}

bool VirtualMachine::serves(const std::string& service_type) const {
  return services.empty() ||
         std::find(services.begin(), services.end(), service_type) != services.end();
}

// ---------------------------------------------------------------------------
// IoTDatacenter

IoTDatacenter::IoTDatacenter(Simulation& sim, std::string name, std::vector<PhysicalHost> hosts,
                             std::optional<std::string> analysis_service)
    : sim_(sim),
      name_(std::move(name)),
      hosts_(std::move(hosts)),
      analysis_service_(std::move(analysis_service)) {}

const MonitorState* IoTDatacenter::monitor(EntityId gateway, MetricId metric) const {
  auto it = monitors_.find({gateway, metric});
  return it == monitors_.end() ? nullptr : &it->second;
}

const StoredRecord& IoTDatacenter::store_record(const AggregatedRecord& record, SimTime now) {
  const auto key = std::make_tuple(record.gateway, record.day, record.round_in_day);
  if (index_.contains(key)) {
    throw Error(Errc::DuplicateRound, "gateway " + sim_.name_of(record.gateway) + " day " +
                                          std::to_string(record.day) + " reading " +
                                          std::to_string(record.round_in_day) + " already stored");
  }
  StoredRecord stored{record, {}, now};
  for (const auto& [metric, values] : record.values_by_metric()) {
    stored.means.emplace(metric, round_mean(values).exact);
  }
  index_.emplace(key, store_.size());
  by_day_[{record.gateway, record.day}].push_back(store_.size());
  store_.push_back(std::move(stored));
  const StoredRecord& ref = store_.back();

  liveness_[record.gateway] = LivenessEntry{now, record.gateway_battery_pct};
  for (const auto& r : record.readings) liveness_[r.source] = LivenessEntry{now, r.battery_pct};

  for (const auto& policy : sim_.spec().alerts) {
    const auto metric = sim_.find_metric(policy.metric);
    if (!metric) continue;
    auto mean = ref.means.find(*metric);
    if (mean == ref.means.end()) continue;
    MonitorState& state = monitors_[{record.gateway, *metric}];
    const AlertLevel before = state.level;
    auto [next, level] = evaluate_alert(state, policy, to_double(mean->second));
    state = next;
    if (level != before) {
      sim_.trace(TraceKind::Alert, sim_.name_of(record.gateway),
                 {{"metric", policy.metric},
                  {"from", std::string(to_string(before))},
                  {"to", std::string(to_string(level))},
                  {"day", std::to_string(record.day)},
                  {"reading", std::to_string(record.round_in_day)}});
    }
  }

  if (analysis_service_) {
    sim_.broker().submit_request(ServiceRequest{*analysis_service_, record.gateway}, now);
  }
  return ref;
}

std::vector<DailyAverage> IoTDatacenter::close_day(std::uint32_t day, SimTime) {
  std::vector<DailyAverage> out;
  for (const auto& [key, indices] : by_day_) {
    if (key.second != day || indices.empty()) continue;
    std::map<MetricId, std::vector<Exact>> means;
    for (std::size_t i : indices) {
      for (const auto& [metric, mean] : store_[i].means) means[metric].push_back(mean);
    }
    DailyAverage avg{key.first, day, {}, indices.size()};
    for (const auto& [metric, values] : means) avg.by_metric.emplace(metric, daily_average(values));

    if (sim_.tracing()) {
      TraceDetail detail{{"day", std::to_string(day)}, {"rounds", std::to_string(avg.rounds)}};
      for (const auto& [metric, result] : avg.by_metric) {
        detail.emplace_back(sim_.metric_name(metric), result.reported.str());
      }
      sim_.trace(TraceKind::DailyAvg, sim_.name_of(key.first), std::move(detail));
    } else {
      sim_.trace(TraceKind::DailyAvg, sim_.name_of(key.first));
    }
    daily_.push_back(avg);
    out.push_back(std::move(avg));
  }
  return out;
}

void IoTDatacenter::receive(DataPacket&& packet, SimTime now) {
  if (const auto* record = std::get_if<AggregatedRecord>(&packet.payload)) {
    try {
      store_record(*record, now);
    } catch (const Error& e) {
      if (e.code() != Errc::DuplicateRound) throw;
      sim_.trace(TraceKind::Failure, name_, {{"error", "DuplicateRound"}, {"detail", e.what()}});
    }
    return;
  }
  if (const auto* request = std::get_if<ServiceRequest>(&packet.payload)) {
    sim_.broker().submit_request(*request, now);
    return;
  }
  if (const auto* readings = std::get_if<std::vector<Reading>>(&packet.payload)) {
    for (const auto& r : *readings) liveness_[r.source] = LivenessEntry{now, r.battery_pct};
  }
}

void IoTDatacenter::handle(Event& event) {
  if (auto* arrival = std::get_if<PacketArrival>(&event.payload)) {
    sim_.packet_delivered(arrival->packet, name_);
    receive(std::move(arrival->packet), event.fire_at);
    return;
  }
  if (const auto* boundary = std::get_if<DayBoundary>(&event.payload)) {
    close_day(boundary->day, event.fire_at);
  }
}

// ---------------------------------------------------------------------------
// Broker

Broker::Broker(Simulation& sim) : sim_(sim) {}

void Broker::add_datacenter(IoTDatacenter& dc) { datacenters_.push_back(&dc); }

void Broker::register_service(IoTServiceType type) {
  auto id = type.id;
  services_.insert_or_assign(std::move(id), std::move(type));
}

const IoTServiceType* Broker::service(const std::string& id) const {
  auto it = services_.find(id);
  return it == services_.end() ? nullptr : &it->second;
}

ProvisionOutcome Broker::provision(const std::string& vm_id, const VmShape& shape,
                                   std::vector<std::string> services,
                                   std::optional<std::size_t> datacenter) {
  for (std::size_t d = 0; d < datacenters_.size(); ++d) {
    if (datacenter && *datacenter != d) continue;
    auto& hosts = datacenters_[d]->hosts();
    const auto h = first_fit(hosts, shape);
    if (!h) continue;
    PhysicalHost& host = hosts[*h];
    host.used_pes += shape.pes;
    host.used_mips += shape.pes * shape.mips_per_pe;
    host.used_ram += shape.ram_bytes;
    ++host.vm_count;
    VirtualMachine vm;
    vm.id = vm_id;
    vm.pes = shape.pes;
    vm.mips_per_pe = shape.mips_per_pe;
    vm.ram_bytes = shape.ram_bytes;
    vm.datacenter = d;
    vm.host = *h;
    vm.services = std::move(services);
    vms_.push_back(std::move(vm));
    ++provisioned_;
    if (sim_.tracing()) {
      sim_.trace(TraceKind::Provision, vm_id,
                 {{"status", "placed"}, {"datacenter", datacenters_[d]->name()}, {"host", host.id}});
    } else {
      sim_.trace(TraceKind::Provision, vm_id);
    }
    return Placed{d, *h};
  }
  ++rejected_;
  sim_.trace(TraceKind::Provision, vm_id, {{"status", "rejected"}});
  return Rejected{};
}

void Broker::submit_request(const ServiceRequest& request, SimTime now) {
  const IoTServiceType* type = service(request.service_type);
  if (!type) {
    throw Error(Errc::UnknownServiceType, "unknown service type '" + request.service_type + "'");
  }
  ++submitted_;
  std::optional<std::uint32_t> best;
  for (std::uint32_t i = 0; i < vms_.size(); ++i) {
    if (!vms_[i].serves(request.service_type)) continue;
    if (!best || vms_[i].load() < vms_[*best].load()) best = i;
  }
  if (!best) {
    ++unserved_;
    sim_.trace(TraceKind::Failure, "broker",
               {{"error", "NoVm"}, {"service", request.service_type}});
    return;
  }
  IoTCloudlet cl;
  cl.id = next_cloudlet_++;
  cl.length_mi = type->demand_mi;
  cl.service_type = request.service_type;
  cl.requester = request.requester;
  cl.vm = *best;
  cl.submitted_at = now;
  VirtualMachine& vm = vms_[*best];
  if (vm.running) {
    vm.queue.push_back(std::move(cl));
  } else {
    execute(*best, std::move(cl), now);
  }
}

SimTime Broker::execute(std::uint32_t vm_index, IoTCloudlet cl, SimTime now) {
  VirtualMachine& vm = vms_.at(vm_index);
  const std::uint64_t duration = cloudlet_duration(cl.length_mi, vm.pes, vm.mips_per_pe);
  cl.vm = vm_index;
  cl.started_at = now;
  cl.completed_at = now + duration;
  datacenters_[vm.datacenter]->hosts()[vm.host].busy_pe_seconds += duration * vm.pes;
  const std::uint64_t id = cl.id;
  const SimTime done = cl.completed_at;
  vm.running = std::move(cl);
  sim_.kernel().schedule(done, id_, CloudletCompletion{id, vm_index});
  return done;
}

void Broker::add_workload(const RuntimeWorkload& workload) {
  const auto index = static_cast<std::uint32_t>(workloads_.size());
  workloads_.push_back(workload);
  for (std::uint32_t i = 0; i < workload.intervals; ++i) {
    const SimTime at = workload.start + i * workload.interval_length_s;
    if (at > sim_.horizon()) break;
    sim_.kernel().schedule(at, id_, WorkloadTick{index, i});
  }
}

void Broker::handle(Event& event) {
  if (const auto* done = std::get_if<CloudletCompletion>(&event.payload)) {
    VirtualMachine& vm = vms_.at(done->vm);
    if (!vm.running || vm.running->id != done->cloudlet) return;
    IoTCloudlet finished = std::move(*vm.running);
    vm.running.reset();
    if (sim_.tracing()) {
      sim_.trace(TraceKind::CloudletDone, vm.id,
                 {{"cloudlet", std::to_string(finished.id)},
                  {"service", finished.service_type},
                  {"wait_s", std::to_string(finished.started_at.seconds - finished.submitted_at.seconds)},
                  {"run_s", std::to_string(finished.completed_at.seconds - finished.started_at.seconds)}});
    } else {
      sim_.trace(TraceKind::CloudletDone, vm.id);
    }
    completed_.push_back(std::move(finished));
    if (!vm.queue.empty()) {
      IoTCloudlet next = std::move(vm.queue.front());
      vm.queue.pop_front();
      execute(done->vm, std::move(next), event.fire_at);
    }
    return;
  }
  if (const auto* tick = std::get_if<WorkloadTick>(&event.payload)) {
    const RuntimeWorkload& w = workloads_.at(tick->workload);
    for (const auto& [type, count] : w.requests) {
      for (std::uint64_t i = 0; i < count; ++i) submit_request(ServiceRequest{type, id_}, event.fire_at);
    }
  }
}

void generate_workload(const RuntimeWorkload& workload, Broker& broker) {
  for (const auto& [type, count] : workload.requests) {
    if (!broker.service(type)) {
      throw Error(Errc::UnknownServiceType, "workload requests unknown service type '" + type + "'");
    }
  }
  broker.add_workload(workload);
}

}  // namespace iotsim
