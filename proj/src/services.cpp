#include "iotsim/services.hpp"

#include <cmath>
#include <cstdlib>

#include "iotsim/error.hpp"

namespace iotsim {

using boost::multiprecision::cpp_int;

Exact exact_from_double(double value) {
  const auto micros = std::llround(value * 1e6);
  return Exact(cpp_int(micros), cpp_int(1'000'000));
}

double to_double(const Exact& value) { return value.convert_to<double>(); }

std::string Rounded::str() const {
  const std::int64_t a = hundredths < 0 ? -hundredths : hundredths;
  std::string frac = std::to_string(a % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return (hundredths < 0 ? "-" : "") + std::to_string(a / 100) + "." + frac;
}

Rounded round_half_up_2dp(const Exact& value) {
  const Exact scaled = value * 100;
  const cpp_int num = boost::multiprecision::numerator(scaled);
  const cpp_int den = boost::multiprecision::denominator(scaled);  // always positive
  const cpp_int magnitude = (2 * abs(num) + den) / (2 * den);
  const auto q = magnitude.convert_to<std::int64_t>();
  return Rounded{num < 0 ? -q : q};
}

MeanResult round_mean(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyInput, "round mean of no readings");
  cpp_int micros = 0;
  for (double v : values) micros += std::llround(v * 1e6);
  Exact exact(micros, cpp_int(1'000'000) * static_cast<long long>(values.size()));
  return MeanResult{exact, round_half_up_2dp(exact)};
}

MeanResult daily_average(std::span<const Exact> round_means) {
  if (round_means.empty()) throw Error(Errc::EmptyInput, "daily average of no rounds");
  Exact sum = 0;
  for (const auto& m : round_means) sum += m;
  Exact exact = sum / static_cast<long long>(round_means.size());
  return MeanResult{exact, round_half_up_2dp(exact)};
}

std::string_view to_string(AlertLevel level) {
  switch (level) {
    case AlertLevel::Normal: return "normal";
    case AlertLevel::Green: return "green";
    case AlertLevel::Yellow: return "yellow";
    case AlertLevel::Red: return "red";
  }
  return "normal";
}

std::pair<MonitorState, AlertLevel> evaluate_alert(const MonitorState& state,
                                                   const AlertPolicy& policy, double reading) {
  MonitorState next = state;
  const bool rising = state.last_value && reading > *state.last_value + policy.rise_epsilon;
  next.consecutive_rises = rising ? state.consecutive_rises + 1 : 0;
  next.last_value = reading;

  if (reading >= policy.red_threshold) {
    next.level = AlertLevel::Red;
  } else if (next.consecutive_rises >= 2) {
    next.level = AlertLevel::Yellow;
  } else if (next.consecutive_rises == 1) {
    next.level = AlertLevel::Green;
  } else {
    next.level = AlertLevel::Normal;
  }
  return {next, next.level};
}

}  // namespace iotsim
