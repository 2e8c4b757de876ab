#include "iotsim/packet.hpp"

#include <cmath>

namespace iotsim {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

double distance(const Location& a, const Location& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::map<MetricId, std::vector<double>> AggregatedRecord::values_by_metric() const {
  std::map<MetricId, std::vector<double>> out;
  for (const auto& r : readings) out[r.metric].push_back(r.value);
  return out;
}

std::uint64_t packet_size(const PacketPayload& payload) {
  return kPacketHeaderBytes +
         std::visit(overloaded{
                        [](const std::vector<Reading>& rs) { return kBytesPerReading * rs.size(); },
                        [](const AggregatedRecord& rec) {
                          return kRecordMetadataBytes + kBytesPerReading * rec.readings.size();
                        },
                        [](const ServiceRequest&) { return kServiceRequestBytes; },
                        [](const ControlMessage&) { return kControlMessageBytes; },
                    },
                    payload);
}

std::string_view payload_name(const PacketPayload& payload) {
  static constexpr std::string_view names[] = {"readings", "aggregate", "service_request",
                                               "control"};
  return names[payload.index()];
}

}  // namespace iotsim
