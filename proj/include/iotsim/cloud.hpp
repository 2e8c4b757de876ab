#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "iotsim/kernel.hpp"
#include "iotsim/packet.hpp"
#include "iotsim/scenario.hpp"
#include "iotsim/services.hpp"

namespace iotsim {

class Simulation;

struct PhysicalHost {
  std::string id;
  std::uint32_t pes = 1;
  double mips_per_pe = 1000.0;
  std::uint64_t ram_bytes = 0;
  std::uint64_t storage_bytes = 0;
  double idle_W = 0.0;
  double full_W = 0.0;
  std::uint32_t max_vms = 0;  // 0 = no slot limit

  std::uint32_t used_pes = 0;
  double used_mips = 0.0;
  std::uint64_t used_ram = 0;
  std::uint32_t vm_count = 0;
  std::uint64_t busy_pe_seconds = 0;  // sum over cloudlets of duration * VM PEs

  double total_mips() const { return pes * mips_per_pe; }

  /// idle_W * total_s + (full_W - idle_W) * busy_pe_seconds / pes.
  double energy_joules(std::uint64_t total_s) const;
};

struct VmShape {
  std::uint32_t pes = 1;
  double mips_per_pe = 1000.0;
  std::uint64_t ram_bytes = 0;
};

bool fits(const PhysicalHost& host, const VmShape& shape);

/// First host in declaration order that fits, or empty.
std::optional<std::size_t> first_fit(std::span<const PhysicalHost> hosts, const VmShape& shape);

struct IoTCloudlet {
  std::uint64_t id = 0;
  double length_mi = 0.0;
  std::string service_type;
  EntityId requester = 0;
  std::uint32_t vm = 0;
  SimTime submitted_at;
  SimTime started_at;
  SimTime completed_at;
};

/// ceil(length_mi / (pes * mips_per_pe)) seconds; zero work takes zero seconds.
std::uint64_t cloudlet_duration(double length_mi, std::uint32_t pes, double mips_per_pe);

struct VirtualMachine {
  std::string id;
  std::uint32_t pes = 1;
  double mips_per_pe = 1000.0;
  std::uint64_t ram_bytes = 0;
  std::size_t datacenter = 0;
  std::size_t host = 0;
  std::vector<std::string> services;

  std::deque<IoTCloudlet> queue;
  std::optional<IoTCloudlet> running;

  bool serves(const std::string& service_type) const;
  std::size_t load() const { return queue.size() + (running ? 1 : 0); }
};

struct StoredRecord {
  AggregatedRecord record;
  std::map<MetricId, Exact> means;
  SimTime stored_at;
};

struct LivenessEntry {
  SimTime last_heard;
  std::optional<double> battery_pct;
};

struct DailyAverage {
  EntityId gateway = 0;
  std::uint32_t day = 0;
  std::map<MetricId, MeanResult> by_metric;
  std::size_t rounds = 0;
};

/// Cloud-side store with liveness ledger, daily analytics and per-round alerting.
class IoTDatacenter : public Entity {
 public:
  IoTDatacenter(Simulation& sim, std::string name, std::vector<PhysicalHost> hosts,
                std::optional<std::string> analysis_service);

  EntityId id() const noexcept { return id_; }
  void set_id(EntityId id) { id_ = id; }
  const std::string& name() const noexcept { return name_; }
  std::vector<PhysicalHost>& hosts() noexcept { return hosts_; }
  const std::vector<PhysicalHost>& hosts() const noexcept { return hosts_; }

  /// Appends a record keyed by (gateway, day, round of day); throws
  /// Error(DuplicateRound) if the key exists. Refreshes the liveness ledger,
  /// evaluates alert policies and submits the analysis request, if configured.
  const StoredRecord& store_record(const AggregatedRecord& record, SimTime now);

  /// Daily averages for every gateway that stored records on `day`.
  std::vector<DailyAverage> close_day(std::uint32_t day, SimTime now);

  const std::vector<StoredRecord>& store() const noexcept { return store_; }
  const std::map<EntityId, LivenessEntry>& liveness() const noexcept { return liveness_; }
  const std::vector<DailyAverage>& daily_averages() const noexcept { return daily_; }
  const MonitorState* monitor(EntityId gateway, MetricId metric) const;

  void handle(Event& event) override;

 private:
  void receive(DataPacket&& packet, SimTime now);

  Simulation& sim_;
  EntityId id_ = 0;
  std::string name_;
  std::vector<PhysicalHost> hosts_;
  std::optional<std::string> analysis_service_;
  std::vector<StoredRecord> store_;
  std::map<std::tuple<EntityId, std::uint32_t, std::uint32_t>, std::size_t> index_;
  std::map<std::pair<EntityId, std::uint32_t>, std::vector<std::size_t>> by_day_;
  std::map<EntityId, LivenessEntry> liveness_;
  std::map<std::pair<EntityId, MetricId>, MonitorState> monitors_;
  std::vector<DailyAverage> daily_;
};

struct Placed {
  std::size_t datacenter = 0;
  std::size_t host = 0;
};
struct Rejected {};
using ProvisionOutcome = std::variant<Placed, Rejected>;

/// Queues service requests and places them on VMs (space-shared, FIFO per VM,
/// least-loaded VM serving the type; ties go to the earliest VM).
class Broker : public Entity {
 public:
  explicit Broker(Simulation& sim);

  EntityId id() const noexcept { return id_; }
  void set_id(EntityId id) { id_ = id; }

  void add_datacenter(IoTDatacenter& dc);
  void register_service(IoTServiceType type);
  const IoTServiceType* service(const std::string& id) const;

  /// First fit over hosts in declaration order (restricted to `datacenter` if given).
  ProvisionOutcome provision(const std::string& vm_id, const VmShape& shape,
                             std::vector<std::string> services,
                             std::optional<std::size_t> datacenter = std::nullopt);

  /// Throws Error(UnknownServiceType) for unregistered types.
  void submit_request(const ServiceRequest& request, SimTime now);

  /// Starts `cl` on the VM now and schedules its completion.
  SimTime execute(std::uint32_t vm, IoTCloudlet cl, SimTime now);

  /// Registers the workload and schedules one tick per interval up to the horizon.
  void add_workload(const RuntimeWorkload& workload);

  const std::vector<VirtualMachine>& vms() const noexcept { return vms_; }
  const std::vector<IoTCloudlet>& completed() const noexcept { return completed_; }
  std::uint64_t requests_submitted() const noexcept { return submitted_; }
  std::uint64_t provisioned() const noexcept { return provisioned_; }
  std::uint64_t rejected() const noexcept { return rejected_; }
  std::uint64_t unserved() const noexcept { return unserved_; }
  std::size_t datacenter_count() const noexcept { return datacenters_.size(); }
  IoTDatacenter& datacenter(std::size_t i) { return *datacenters_[i]; }

  void handle(Event& event) override;

 private:
  Simulation& sim_;
  EntityId id_ = 0;
  std::vector<IoTDatacenter*> datacenters_;
  std::map<std::string, IoTServiceType> services_;
  std::vector<VirtualMachine> vms_;
  std::vector<RuntimeWorkload> workloads_;
  std::vector<IoTCloudlet> completed_;
  std::uint64_t next_cloudlet_ = 1;
  std::uint64_t submitted_ = 0;
  std::uint64_t provisioned_ = 0;
  std::uint64_t rejected_ = 0;
  std::uint64_t unserved_ = 0;
};

/// Validates the workload's service types against the broker (throws
/// Error(UnknownServiceType)) and schedules its ticks.
void generate_workload(const RuntimeWorkload& workload, Broker& broker);

}  // namespace iotsim
