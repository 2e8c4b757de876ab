#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <variant>

namespace iotsim {

/// Energy in integer microjoules so battery ledgers subtract exactly.
struct Energy {
  std::int64_t micro_joules = 0;

  static constexpr Energy from_joules(double joules) {
    return Energy{static_cast<std::int64_t>(joules * 1e6 + (joules >= 0 ? 0.5 : -0.5))};
  }
  static constexpr Energy infinite() {
    return Energy{std::numeric_limits<std::int64_t>::max()};
  }
  constexpr double joules() const { return static_cast<double>(micro_joules) / 1e6; }
  constexpr bool is_infinite() const { return *this == infinite(); }

  constexpr auto operator<=>(const Energy&) const = default;
  constexpr Energy operator+(Energy o) const { return Energy{micro_joules + o.micro_joules}; }
  constexpr Energy operator-(Energy o) const { return Energy{micro_joules - o.micro_joules}; }
};

/// Cost of moving `bytes` at `joules_per_byte`, rounded to the nearest microjoule.
Energy transfer_energy(std::uint64_t bytes, double joules_per_byte);

enum class PowerKind { Battery, UsbCharging, ContinuousSupply };

std::string_view to_string(PowerKind kind);
std::optional<PowerKind> power_kind_from_string(std::string_view text);

struct Remaining {
  Energy level;
};
struct Depleted {};
using DrainOutcome = std::variant<Remaining, Depleted>;

class PowerSource {
 public:
  static PowerSource battery(Energy capacity) { return PowerSource(PowerKind::Battery, capacity); }
  static PowerSource usb_charging() { return PowerSource(PowerKind::UsbCharging, Energy::infinite()); }
  static PowerSource continuous() {
    return PowerSource(PowerKind::ContinuousSupply, Energy::infinite());
  }

  PowerKind kind() const noexcept { return kind_; }
  Energy capacity() const noexcept { return capacity_; }
  Energy level() const noexcept { return level_; }
  bool depleted() const noexcept { return depleted_; }

  /// Battery charge as a percentage of capacity; empty for mains/USB supplies.
  std::optional<double> percent() const;

  /// Charges `cost`. A battery that cannot cover the cost is floored at zero
  /// and reports Depleted; mains and USB supplies always report Remaining(infinite).
  DrainOutcome drain(Energy cost);

 private:
  PowerSource(PowerKind kind, Energy capacity)
      : kind_(kind), capacity_(capacity), level_(capacity) {}

  PowerKind kind_;
  Energy capacity_;
  Energy level_;
  bool depleted_ = false;
};

}  // namespace iotsim
