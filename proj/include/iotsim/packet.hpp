#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iotsim/time.hpp"

namespace iotsim {

/// Dense index of a simulated entity (node, datacenter or broker).
using EntityId = std::uint32_t;

/// Interned metric label ("air_temperature", "precipitation", ...).
using MetricId = std::uint32_t;

struct Location {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;  // altitude; negative below sea level

  bool operator==(const Location&) const = default;
};

double distance(const Location& a, const Location& b);

struct Reading {
  EntityId source = 0;
  MetricId metric = 0;
  double value = 0.0;
  SimTime sensed_at;
  std::optional<double> battery_pct;  // empty for mains-powered sensors

  bool operator==(const Reading&) const = default;
};

/// One gateway round: every reading that arrived for it, grouped by metric on demand.
struct AggregatedRecord {
  EntityId gateway = 0;
  std::uint64_t round = 0;         // global round index, 1-based
  std::uint32_t day = 0;           // 1-based
  std::uint32_t round_in_day = 0;  // 1-based
  SimTime round_time;
  std::vector<Reading> readings;
  std::optional<double> gateway_battery_pct;

  std::map<MetricId, std::vector<double>> values_by_metric() const;

  bool operator==(const AggregatedRecord&) const = default;
};

struct ServiceRequest {
  std::string service_type;
  EntityId requester = 0;

  bool operator==(const ServiceRequest&) const = default;
};

struct ControlMessage {
  std::string command;

  bool operator==(const ControlMessage&) const = default;
};

using PacketPayload =
    std::variant<std::vector<Reading>, AggregatedRecord, ServiceRequest, ControlMessage>;

/// Fixed per-packet header, bytes.
inline constexpr std::uint64_t kPacketHeaderBytes = 64;
inline constexpr std::uint64_t kBytesPerReading = 16;
inline constexpr std::uint64_t kRecordMetadataBytes = 32;
inline constexpr std::uint64_t kServiceRequestBytes = 48;
inline constexpr std::uint64_t kControlMessageBytes = 16;

/// header + 16 B per reading; aggregated records add 32 B of round metadata,
/// service requests 48 B, control messages 16 B.
std::uint64_t packet_size(const PacketPayload& payload);

/// One hop of a transmission. Every hop gets a fresh id; `origin` and
/// `created_at` survive forwarding.
struct DataPacket {
  std::uint64_t id = 0;
  EntityId origin = 0;
  EntityId source = 0;
  EntityId destination = 0;
  SimTime created_at;
  std::uint64_t size_bytes = 0;
  PacketPayload payload;
};

std::string_view payload_name(const PacketPayload& payload);

}  // namespace iotsim
