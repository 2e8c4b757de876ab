#include "iotsim/net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iotsim/error.hpp"

namespace iotsim {

std::string_view to_string(ConnectionKind kind) {
  switch (kind) {
    case ConnectionKind::WiFi: return "WiFi";
    case ConnectionKind::Cellular3G: return "Cellular3G";
    case ConnectionKind::Bluetooth: return "Bluetooth";
    case ConnectionKind::LoRa: return "LoRa";
    case ConnectionKind::Zigbee: return "Zigbee";
    case ConnectionKind::ShortRangeRadio: return "ShortRangeRadio";
    case ConnectionKind::LongRangeRadio: return "LongRangeRadio";
  }
  return "WiFi";
}

std::optional<ConnectionKind> connection_kind_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kConnectionKindCount; ++i) {
    const auto kind = static_cast<ConnectionKind>(i);
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

ConnectionTable ConnectionTable::defaults() {
  // kind, signal, range m, bandwidth B/s, propagation s, tx J/B, rx J/B
  ConnectionTable t;
  t.get(ConnectionKind::WiFi) =
      {ConnectionKind::WiFi, "2.4GHz OFDM", 100.0, 1'250'000.0, 1, 2.0e-6, 1.0e-6};
  t.get(ConnectionKind::Cellular3G) =
      {ConnectionKind::Cellular3G, "UMTS", 10'000.0, 250'000.0, 1, 1.0e-5, 5.0e-6};
  t.get(ConnectionKind::Bluetooth) =
      {ConnectionKind::Bluetooth, "2.4GHz FHSS", 30.0, 125'000.0, 1, 1.0e-6, 1.0e-6};
  t.get(ConnectionKind::LoRa) =
      {ConnectionKind::LoRa, "868MHz CSS", 5'000.0, 684.0, 1, 1.0e-4, 5.0e-5};
  t.get(ConnectionKind::Zigbee) =
      {ConnectionKind::Zigbee, "2.4GHz O-QPSK", 100.0, 31'250.0, 1, 3.0e-6, 3.0e-6};
  t.get(ConnectionKind::ShortRangeRadio) =
      {ConnectionKind::ShortRangeRadio, "868MHz FSK", 500.0, 1'200.0, 1, 2.0e-5, 1.0e-5};
  t.get(ConnectionKind::LongRangeRadio) =
      {ConnectionKind::LongRangeRadio, "433MHz FSK", 2'000.0, 600.0, 1, 6.0e-5, 2.0e-5};
  return t;
}

NetworkConnection::NetworkConnection(ConnectionType type, double strength, double base_loss)
    : type_(std::move(type)), strength_(1.0), base_loss_(base_loss), loss_probability_(base_loss) {
  if (base_loss < 0.0 || base_loss > 1.0) {
    throw Error(Errc::OutOfRange, "base loss " + std::to_string(base_loss) + " outside [0,1]");
  }
  set_signal(*this, strength);
}

void NetworkConnection::add_outage(OutageWindow window) {
  if (!(window.start < window.end)) {
    throw Error(Errc::OutOfRange, "empty outage window");
  }
  auto pos = std::lower_bound(outages_.begin(), outages_.end(), window,
                              [](const OutageWindow& a, const OutageWindow& b) {
                                return a.start < b.start;
                              });
  if (pos != outages_.end() && pos->start < window.end) {
    throw Error(Errc::OutOfRange, "outage windows overlap");
  }
  if (pos != outages_.begin() && window.start < std::prev(pos)->end) {
    throw Error(Errc::OutOfRange, "outage windows overlap");
  }
  outages_.insert(pos, window);
}

bool NetworkConnection::in_outage(SimTime t) const {
  auto it = std::upper_bound(outages_.begin(), outages_.end(), t,
                             [](SimTime value, const OutageWindow& w) { return value < w.start; });
  if (it == outages_.begin()) return false;
  return std::prev(it)->contains(t);
}

void set_signal(NetworkConnection& conn, double strength) {
  if (!(strength >= 0.0 && strength <= 1.0)) {
    throw Error(Errc::OutOfRange, "signal strength " + std::to_string(strength) + " outside [0,1]");
  }
  conn.strength_ = strength;
  conn.loss_probability_ = std::max(conn.base_loss_, 1.0 - strength);
}

bool in_range(const Location& src, const Location& dst, const ConnectionType& type) {
  return distance(src, dst) <= type.range_m;
}

std::uint64_t latency(const ConnectionType& type, std::uint64_t size_bytes) {
  const auto transfer = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(size_bytes) / type.bandwidth_Bps));
  return type.propagation_s + transfer;
}

std::string_view to_string(LossReason reason) {
  switch (reason) {
    case LossReason::Outage: return "Outage";
    case LossReason::Drop: return "Drop";
    case LossReason::DeadNode: return "DeadNode";
    case LossReason::OutOfRange: return "OutOfRange";
  }
  return "Drop";
}

TransmitOutcome transmit(NetworkConnection& conn, const DataPacket& packet, SimTime now,
                         RandomStream& rng) {
  ++conn.transmits;
  if (conn.in_outage(now)) {
    ++conn.lost;
    return Lost{LossReason::Outage};
  }
  if (rng.bernoulli(conn.loss_probability())) {
    ++conn.lost;
    return Lost{LossReason::Drop};
  }
  ++conn.delivered;
  return DeliveredAt{now + latency(conn.type(), packet.size_bytes)};
}

}  // namespace iotsim
