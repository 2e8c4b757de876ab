#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "iotsim/packet.hpp"
#include "iotsim/random.hpp"
#include "iotsim/time.hpp"

namespace iotsim {

enum class ConnectionKind {
  WiFi,
  Cellular3G,
  Bluetooth,
  LoRa,
  Zigbee,
  ShortRangeRadio,
  LongRangeRadio,
};

inline constexpr std::size_t kConnectionKindCount = 7;

std::string_view to_string(ConnectionKind kind);
std::optional<ConnectionKind> connection_kind_from_string(std::string_view text);

struct ConnectionType {
  ConnectionKind kind = ConnectionKind::WiFi;
  std::string signal_kind;
  double range_m = 1.0;
  double bandwidth_Bps = 1.0;
  std::uint64_t propagation_s = 1;
  double tx_energy_J_per_byte = 0.0;
  double rx_energy_J_per_byte = 0.0;

  bool operator==(const ConnectionType&) const = default;
};

/// Parameters per connection kind. The built-in defaults are order-of-magnitude
/// figures for each radio class; scenarios override any field.
class ConnectionTable {
 public:
  static ConnectionTable defaults();

  const ConnectionType& get(ConnectionKind kind) const {
    return types_[static_cast<std::size_t>(kind)];
  }
  ConnectionType& get(ConnectionKind kind) { return types_[static_cast<std::size_t>(kind)]; }

  bool operator==(const ConnectionTable&) const = default;

 private:
  std::array<ConnectionType, kConnectionKindCount> types_{};
};

/// Half-open [start, end) interval during which a connection delivers nothing.
struct OutageWindow {
  SimTime start;
  SimTime end;

  bool contains(SimTime t) const { return start <= t && t < end; }
  bool operator==(const OutageWindow&) const = default;
};

class NetworkConnection {
 public:
  explicit NetworkConnection(ConnectionType type, double strength = 1.0, double base_loss = 0.0);

  const ConnectionType& type() const noexcept { return type_; }
  double strength() const noexcept { return strength_; }
  double base_loss() const noexcept { return base_loss_; }
  double loss_probability() const noexcept { return loss_probability_; }
  const std::vector<OutageWindow>& outages() const noexcept { return outages_; }

  /// Inserts a window keeping the list sorted; throws Error(OutOfRange) if it
  /// is empty or overlaps an existing window.
  void add_outage(OutageWindow window);
  bool in_outage(SimTime t) const;

  // Per-connection transmit counters.
  std::uint64_t transmits = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;

 private:
  friend void set_signal(NetworkConnection& conn, double strength);

  ConnectionType type_;
  double strength_;
  double base_loss_;
  double loss_probability_;
  std::vector<OutageWindow> outages_;
};

/// Strength to loss probability: max(base_loss, 1 - strength).
/// Throws Error(OutOfRange) unless strength is within [0, 1].
void set_signal(NetworkConnection& conn, double strength);

/// True iff the 3-D Euclidean distance is within the connection's range.
bool in_range(const Location& src, const Location& dst, const ConnectionType& type);

/// propagation_s + ceil(size / bandwidth), whole seconds.
std::uint64_t latency(const ConnectionType& type, std::uint64_t size_bytes);

enum class LossReason { Outage, Drop, DeadNode, OutOfRange };

std::string_view to_string(LossReason reason);

struct DeliveredAt {
  SimTime time;
};
struct Lost {
  LossReason reason;
};
using TransmitOutcome = std::variant<DeliveredAt, Lost>;

/// Decides the fate of one hop: Lost(Outage) inside an outage window, else
/// Lost(Drop) with the connection's loss probability, else DeliveredAt(now + latency).
/// Updates the connection's counters.
TransmitOutcome transmit(NetworkConnection& conn, const DataPacket& packet, SimTime now,
                         RandomStream& rng);

}  // namespace iotsim
