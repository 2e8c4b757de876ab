#pragma once

#include <string>
#include <vector>

#include "iotsim/scenario.hpp"

namespace iotsim::testing {

inline NodeSpec node(std::string id, NodeRole role, std::optional<std::string> forward,
                     Location loc = {}, ConnectionKind conn = ConnectionKind::WiFi) {
  NodeSpec n;
  n.id = std::move(id);
  n.role = std::move(role);
  n.forward = std::move(forward);
  n.location = loc;
  n.connection.type = conn;
  return n;
}

inline NodeSpec sensor(std::string id, std::string metric, std::uint64_t interval_s, std::string dataset,
                       std::optional<std::string> forward, Location loc = {},
                       ConnectionKind conn = ConnectionKind::WiFi) {
  return node(std::move(id), SensorSpec{std::move(metric), interval_s, std::move(dataset), Sequential{}},
              std::move(forward), loc, conn);
}

inline NodeSpec battery(NodeSpec n, double capacity_J) {
  n.power = PowerSpec{PowerKind::Battery, capacity_J};
  return n;
}

inline DatacenterSpec datacenter(std::string id, std::uint32_t pes = 4, double mips = 1000.0) {
  DatacenterSpec dc;
  dc.id = std::move(id);
  HostSpec h;
  h.id = dc.id + ".host";
  h.pes = pes;
  h.mips_per_pe = mips;
  dc.hosts.push_back(h);
  return dc;
}

/// One gateway fed by `sensors` sensors with inline datasets, sending to "cloud".
inline ScenarioSpec star(std::size_t sensors, std::uint64_t interval_s, std::uint64_t horizon_s,
                         const std::vector<double>& values = {1.0, 2.0, 3.0}) {
  ScenarioSpec s;
  s.name = "star";
  s.seed = 1;
  s.horizon_s = horizon_s;
  s.datasets.push_back(DatasetSpec{"d", std::nullopt, values});
  for (std::size_t i = 0; i < sensors; ++i) {
    s.nodes.push_back(sensor("s" + std::to_string(i), "m", interval_s, "d", "gw", {double(i), 1, 0}));
  }
  s.nodes.push_back(node("gw", GatewaySpec{}, "cloud", {0, 0, 0}, ConnectionKind::Cellular3G));
  s.datacenters.push_back(datacenter("cloud"));
  return s;
}

}  // namespace iotsim::testing
