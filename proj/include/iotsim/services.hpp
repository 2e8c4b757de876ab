#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "iotsim/time.hpp"

namespace iotsim {

/// Exact rational used for round and daily means.
using Exact = boost::multiprecision::cpp_rational;

/// Reading values are carried as doubles; aggregation treats them as exact
/// decimals quantised to 1e-6, which is lossless for any dataset written with
/// six or fewer decimals.
Exact exact_from_double(double value);
double to_double(const Exact& value);

/// A value rounded to two decimals, kept as an integer count of hundredths.
struct Rounded {
  std::int64_t hundredths = 0;

  double value() const { return static_cast<double>(hundredths) / 100.0; }
  std::string str() const;  // "-0.05", "0.00", "1.42"

  bool operator==(const Rounded&) const = default;
};

/// Half-up (ties away from zero) to two decimals.
Rounded round_half_up_2dp(const Exact& value);

struct MeanResult {
  Exact exact;
  Rounded reported;
};

/// Mean of one round's readings. Throws Error(EmptyInput) for an empty list.
MeanResult round_mean(std::span<const double> values);

/// Mean of the exact round means of one day; rounding happens only here.
/// Throws Error(EmptyInput) for an empty list.
MeanResult daily_average(std::span<const Exact> round_means);

struct IoTServiceType {
  std::string id;
  double demand_mi = 0.0;

  bool operator==(const IoTServiceType&) const = default;
};

enum class AlertLevel { Normal, Green, Yellow, Red };

std::string_view to_string(AlertLevel level);

struct AlertPolicy {
  std::string metric;
  double red_threshold = 0.0;
  double rise_epsilon = 0.0;

  bool operator==(const AlertPolicy&) const = default;
};

struct MonitorState {
  std::optional<double> last_value;
  std::uint32_t consecutive_rises = 0;
  AlertLevel level = AlertLevel::Normal;

  bool operator==(const MonitorState&) const = default;
};

/// Flood-style alerting. At or above the red threshold the level is Red
/// whatever the trend. Below it, a reading higher than the previous one by more
/// than rise_epsilon extends the run of rises: one rise is Green, two or more
/// Yellow. Anything else resets the run to Normal.
std::pair<MonitorState, AlertLevel> evaluate_alert(const MonitorState& state,
                                                   const AlertPolicy& policy, double reading);

/// Requests submitted at the start of each of `intervals` consecutive intervals.
struct RuntimeWorkload {
  SimTime start;
  std::uint32_t intervals = 0;
  std::uint64_t interval_length_s = 0;
  std::vector<std::pair<std::string, std::uint64_t>> requests;  // per interval, by service type

  bool operator==(const RuntimeWorkload&) const = default;
};

}  // namespace iotsim
