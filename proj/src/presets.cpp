#include "iotsim/presets.hpp"

#include <fmt/format.h>

#include <cmath>

#include "iotsim/error.hpp"

namespace iotsim {

const ValidationFixture& validation_fixture() {
  static const ValidationFixture fixture{{{
      {-0.34, -0.19, 0.47, 0.4, 0.28, 0.33, -0.09, 0.68, 1.36, 1.59, 1.11, 1.84},
      {-0.12, 0.11, -0.87, -2.06, 0.51, 0.51, -0.04, -0.93, 1.71, 1.73, 1.2, 0.01},
      {-0.08, 0.47, -0.69, -0.54, 0.49, 0.74, 0.27, 0.09, 1.79, 1.85, 1.5, 1.36},
      {0, 0.1, 0.15, 0, 0, 0.1, 0.15, 0, 0, 0, 0, 0},
      {0.01, 0.04, 0.2, 0.16, 0.01, 0.04, 0.2, 0.17, 0, 0, 0, 0},
      {0.07, 0.02, 0.02, 0.14, 0.07, 0.02, 0.02, 0.14, 0, 0, 0, 0},
  }}};
  return fixture;
}

namespace {

NodeSpec make_node(std::string id, Location loc, ConnectionKind conn, PowerSpec power,
                   std::optional<std::string> forward, NodeRole role) {
  NodeSpec n;
  n.id = std::move(id);
  n.location = loc;
  n.connection.type = conn;
  n.power = power;
  n.forward = std::move(forward);
  n.role = std::move(role);
  return n;
}

constexpr double kSensorBattery_J = 18000.0;

}  // namespace

ScenarioSpec env_iot_preset(const EnvIotOptions& options) {
  ScenarioSpec spec;
  spec.name = "env-iot";
  spec.seed = options.seed;
  spec.horizon_s = options.days * kSecondsPerDay;

  const auto& fixture = validation_fixture();
  for (int i = 0; i < 6; ++i) {
    spec.datasets.push_back(DatasetSpec{fmt::format("S{}", i + 1), std::nullopt, fixture.sensors[i]});
  }

  const PowerSpec battery{PowerKind::Battery, kSensorBattery_J};
  for (int i = 0; i < 6; ++i) {
    const std::string metric = i < 3 ? "air_temperature" : "precipitation";
    const std::string id = fmt::format("S{}", i + 1);
    const Location loc{20.0 * (i + 1), i < 3 ? 15.0 : -15.0, 0.0};
    spec.nodes.push_back(make_node(id, loc, ConnectionKind::ShortRangeRadio, battery, "relay",
                                   SensorSpec{metric, options.interval_s, id, Sequential{}}));
  }
  spec.nodes.push_back(make_node("relay", {0, 0, 0}, ConnectionKind::LongRangeRadio, battery,
                                 "gateway", LinkSpec{}));
  spec.nodes.push_back(make_node("gateway", {500, 0, 0}, ConnectionKind::Cellular3G,
                                 PowerSpec{PowerKind::ContinuousSupply, 0.0}, "cloud", GatewaySpec{}));

  DatacenterSpec dc;
  dc.id = "cloud";
  HostSpec host;
  host.id = "host";
  host.pes = 4;
  host.mips_per_pe = 3000.0;
  host.ram_bytes = 16ULL << 30;
  host.storage_bytes = 1ULL << 40;
  host.idle_W = 90.0;
  host.full_W = 200.0;
  dc.hosts.push_back(host);
  spec.datacenters.push_back(std::move(dc));

  return replicate(spec, options.locations);
}

ScenarioSpec jose_preset(const JoseOptions& options) {
  ScenarioSpec spec;
  spec.name = "jose";
  spec.seed = options.seed;
  spec.horizon_s = options.days * kSecondsPerDay;

  static constexpr std::array<std::string_view, 5> kMetrics = {
      "air_temperature", "air_humidity", "air_pressure", "wind_speed", "precipitation"};
  static constexpr std::array<std::string_view, kJoseCities> kCities = {
      "amman", "irbid", "zarqa", "aqaba", "mafraq"};

  // Synthetic daily-cycle series, one per metric; 48 rows each.
  const std::array<std::pair<double, double>, 5> shape = {
      {{18.0, 8.0}, {55.0, 20.0}, {1010.0, 6.0}, {4.0, 3.0}, {2.0, 2.0}}};
  for (std::size_t m = 0; m < kMetrics.size(); ++m) {
    DatasetSpec d{std::string(kMetrics[m]), std::nullopt, {}};
    for (int row = 0; row < 48; ++row) {
      const double phase = 2.0 * M_PI * row / 24.0;
      double v = shape[m].first + shape[m].second * std::sin(phase + 0.3 * m);
      if (kMetrics[m] == "precipitation") v = std::max(0.0, v);
      d.values.push_back(std::round(v * 100.0) / 100.0);
    }
    spec.datasets.push_back(std::move(d));
  }

  spec.service_types = {{"storage", 2000.0}, {"monitoring", 24000.0}, {"alerting", 4800.0}};
  spec.alerts.push_back(AlertPolicy{"precipitation", 3.5, 0.0});

  const PowerSpec battery{PowerKind::Battery, kSensorBattery_J};
  const PowerSpec mains{PowerKind::ContinuousSupply, 0.0};
  const auto side = static_cast<std::uint32_t>(std::ceil(std::sqrt(double(options.sensors_per_type))));

  for (std::uint32_t c = 0; c < kJoseCities; ++c) {
    const std::string city(kCities[c]);
    const double cx = 100000.0 * c;
    const std::string storage = city + ".storage";

    for (std::size_t m = 0; m < kMetrics.size(); ++m) {
      const std::string metric(kMetrics[m]);
      const std::string gateway = fmt::format("{}.gw.{}", city, metric);
      const Location gw_loc{cx, 1000.0 * static_cast<double>(m), 0.0};
      spec.nodes.push_back(make_node(gateway, gw_loc, ConnectionKind::Cellular3G, mains, storage, GatewaySpec{}));
      for (std::uint32_t s = 0; s < options.sensors_per_type; ++s) {
        // Grid around the gateway, 50 m pitch, well inside LoRa range.
        const double dx = 50.0 * (static_cast<double>(s % side) - side / 2.0);
        const double dy = 50.0 * (static_cast<double>(s / side) - side / 2.0);
        spec.nodes.push_back(make_node(fmt::format("{}.{}.{}", city, metric, s),
                                       {gw_loc.x + dx, gw_loc.y + dy, 0.0}, ConnectionKind::LoRa, battery,
                                       gateway,
                                       SensorSpec{metric, options.interval_s, metric, RandomRow{}}));
      }
    }

    DatacenterSpec dc;
    dc.id = storage;
    dc.analysis_service = "storage";
    HostSpec host;
    host.id = storage + ".pm";
    host.count = kJoseStorageHostsPerCity;
    host.pes = 24;
    host.mips_per_pe = 3000.0;
    host.ram_bytes = 256ULL << 30;
    host.storage_bytes = 4ULL << 40;
    host.idle_W = 93.7;
    host.full_W = 247.0;
    host.max_vms = kJoseVmsPerHost;
    dc.hosts.push_back(host);
    spec.datacenters.push_back(dc);

    VmSpec vm;
    vm.id = storage + ".vm";
    vm.count = kJoseStorageHostsPerCity * kJoseVmsPerHost;
    vm.datacenter = storage;
    vm.pes = 2;
    vm.mips_per_pe = 2400.0;
    vm.ram_bytes = 8ULL << 30;
    vm.services = {"storage"};
    spec.vms.push_back(vm);

    if (c < kJoseComputeCities) {
      DatacenterSpec compute;
      compute.id = city + ".compute";
      host.id = compute.id + ".pm";
      host.count = kJoseComputeHostsPerCity;
      compute.hosts.push_back(host);
      spec.datacenters.push_back(compute);

      vm.id = compute.id + ".vm";
      vm.count = kJoseComputeHostsPerCity * kJoseVmsPerHost;
      vm.datacenter = compute.id;
      vm.services = {"monitoring", "alerting"};
      spec.vms.push_back(vm);
    }
  }

  RuntimeWorkload daily;
  daily.start = SimTime{kSecondsPerHour};
  daily.intervals = static_cast<std::uint32_t>(options.days);
  daily.interval_length_s = kSecondsPerDay;
  daily.requests = {{"monitoring", 200}, {"alerting", 50}};
  spec.workloads.push_back(daily);
  return spec;
}

bool is_preset(std::string_view name) { return name == "env-iot" || name == "jose"; }

ScenarioSpec make_preset(std::string_view name, const PresetOptions& options) {
  ScenarioSpec spec;
  if (name == "env-iot") {
    EnvIotOptions o;
    if (options.locations) o.locations = *options.locations;
    if (options.interval_s) o.interval_s = *options.interval_s;
    if (options.seed) o.seed = *options.seed;
    spec = env_iot_preset(o);
  } else if (name == "jose") {
    JoseOptions o;
    if (options.sensors_per_type) o.sensors_per_type = *options.sensors_per_type;
    if (options.interval_s) o.interval_s = *options.interval_s;
    if (options.seed) o.seed = *options.seed;
    if (options.horizon_s) o.days = (*options.horizon_s + kSecondsPerDay - 1) / kSecondsPerDay;
    spec = jose_preset(o);
  } else {
    throw Error(Errc::UnknownPreset, "unknown preset '" + std::string(name) + "' (known: env-iot, jose)");
  }
  if (options.horizon_s) spec.horizon_s = *options.horizon_s;
  return spec;
}

}  // namespace iotsim
