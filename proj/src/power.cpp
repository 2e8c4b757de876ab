#include "iotsim/power.hpp"

#include <algorithm>

namespace iotsim {

Energy transfer_energy(std::uint64_t bytes, double joules_per_byte) {
  return Energy::from_joules(static_cast<double>(bytes) * joules_per_byte);
}

std::string_view to_string(PowerKind kind) {
  switch (kind) {
    case PowerKind::Battery: return "battery";
    case PowerKind::UsbCharging: return "usb";
    case PowerKind::ContinuousSupply: return "continuous";
  }
  return "continuous";
}

std::optional<PowerKind> power_kind_from_string(std::string_view text) {
  if (text == "battery") return PowerKind::Battery;
  if (text == "usb") return PowerKind::UsbCharging;
  if (text == "continuous") return PowerKind::ContinuousSupply;
  return std::nullopt;
}

std::optional<double> PowerSource::percent() const {
  if (kind_ != PowerKind::Battery || capacity_.micro_joules <= 0) return std::nullopt;
  return 100.0 * static_cast<double>(level_.micro_joules) /
         static_cast<double>(capacity_.micro_joules);
}

DrainOutcome PowerSource::drain(Energy cost) {
  if (kind_ != PowerKind::Battery) return Remaining{Energy::infinite()};
  if (cost > level_) {
    level_ = Energy{0};
    depleted_ = true;
    return Depleted{};
  }
  level_ = level_ - cost;
  return Remaining{level_};
}

}  // namespace iotsim
