#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "iotsim/error.hpp"
#include "iotsim/presets.hpp"
#include "iotsim/services.hpp"

using namespace iotsim;

namespace {

// Independent oracle: values with at most two decimals summed as integer
// hundredths; the mean is rounded half away from zero with integer division.
std::int64_t oracle_mean_hundredths(const std::vector<double>& values) {
  std::int64_t sum = 0;
  for (double v : values) sum += std::llround(v * 100.0);
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  const std::int64_t mag = (2 * std::llabs(sum) + n) / (2 * n);
  return sum < 0 ? -mag : mag;
}

std::vector<double> column(std::size_t first, std::size_t last, std::size_t reading) {
  const auto& f = validation_fixture();
  std::vector<double> out;
  for (std::size_t s = first; s <= last; ++s) out.push_back(f.sensors[s][reading]);
  return out;
}

}  // namespace

TEST(RoundMean, MatchesOracleOnFixtureRounds) {
  for (std::size_t reading = 0; reading < 12; ++reading) {
    for (auto [first, last] : {std::pair<std::size_t, std::size_t>{0, 2}, {3, 5}}) {
      const auto values = column(first, last, reading);
      EXPECT_EQ(round_mean(values).reported.hundredths, oracle_mean_hundredths(values))
          << "reading " << reading << " sensors " << first;
    }
  }
}

TEST(RoundMean, FrozenFixtureValues) {
  // Day 1..3 air temperature rounds, and day 1 precipitation rounds.
  const std::vector<std::string> temps{"-0.18", "0.13", "-0.36", "-0.73", "0.43", "0.53",
                                       "0.05",  "-0.05", "1.62", "1.72",  "1.27", "1.07"};
  const std::vector<std::string> precip{"0.03", "0.05", "0.12", "0.10"};
  for (std::size_t r = 0; r < 12; ++r) EXPECT_EQ(round_mean(column(0, 2, r)).reported.str(), temps[r]);
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(round_mean(column(3, 5, r)).reported.str(), precip[r]);
}

TEST(RoundMean, DailyAverageRoundsOnlyOnce) {
  auto daily = [](std::size_t first, std::size_t last, std::size_t day) {
    std::vector<Exact> means;
    for (std::size_t r = 0; r < 4; ++r) means.push_back(round_mean(column(first, last, day * 4 + r)).exact);
    return daily_average(means).reported.str();
  };
  EXPECT_EQ(daily(3, 5, 0), "0.08");
  EXPECT_EQ(daily(0, 2, 1), "0.24");
  EXPECT_EQ(daily(0, 2, 2), "1.42");
}

TEST(RoundMean, HalfUpAwayFromZero) {
  EXPECT_EQ(round_mean(std::vector<double>{0.005}).reported.str(), "0.01");
  EXPECT_EQ(round_mean(std::vector<double>{-0.005}).reported.str(), "-0.01");
  EXPECT_EQ(round_mean(std::vector<double>{0.004999}).reported.str(), "0.00");
  EXPECT_EQ(round_mean(std::vector<double>{0.28, 0.51, 0.49}).reported.str(), "0.43");
  EXPECT_EQ(round_mean(std::vector<double>{0.0, 0.01, 0.07}).reported.str(), "0.03");
  // 0.125 is not representable exactly as a double but aggregates exactly.
  EXPECT_EQ(round_mean(std::vector<double>{0.1, 0.15}).reported.str(), "0.13");
}

TEST(RoundMean, EmptyInputThrows) {
  try {
    round_mean(std::vector<double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyInput);
  }
  EXPECT_THROW(daily_average(std::vector<Exact>{}), Error);
}

TEST(RoundMean, OracleAgreesOnRandomLists) {
  std::srand(17);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> values(1 + std::rand() % 9);
    for (auto& v : values) v = (std::rand() % 20001 - 10000) / 100.0;
    ASSERT_EQ(round_mean(values).reported.hundredths, oracle_mean_hundredths(values));
  }
}

TEST(Rounded, Strings) {
  EXPECT_EQ(Rounded{0}.str(), "0.00");
  EXPECT_EQ(Rounded{-5}.str(), "-0.05");
  EXPECT_EQ(Rounded{142}.str(), "1.42");
  EXPECT_EQ(Rounded{-1200}.str(), "-12.00");
}

TEST(Alert, RiseRunThenRed) {
  const AlertPolicy p{"precipitation", 3.0, 0.0};
  MonitorState s;
  std::vector<AlertLevel> seen;
  for (double v : {0.5, 1.0, 1.5, 2.0, 3.0, 3.5}) {
    auto [next, level] = evaluate_alert(s, p, v);
    s = next;
    seen.push_back(level);
  }
  const std::vector<AlertLevel> want{AlertLevel::Normal, AlertLevel::Green, AlertLevel::Yellow,
                                     AlertLevel::Yellow, AlertLevel::Red,   AlertLevel::Red};
  EXPECT_EQ(seen, want);
}

TEST(Alert, FallResetsAndRedIgnoresTrend) {
  const AlertPolicy p{"precipitation", 3.0, 0.0};
  MonitorState s;
  s = evaluate_alert(s, p, 1.0).first;
  s = evaluate_alert(s, p, 2.0).first;
  EXPECT_EQ(s.level, AlertLevel::Green);
  s = evaluate_alert(s, p, 1.5).first;
  EXPECT_EQ(s.level, AlertLevel::Normal);
  EXPECT_EQ(s.consecutive_rises, 0u);
  s = evaluate_alert(s, p, 5.0).first;
  EXPECT_EQ(s.level, AlertLevel::Red);
  s = evaluate_alert(s, p, 4.0).first;
  EXPECT_EQ(s.level, AlertLevel::Red);
}

TEST(Alert, EpsilonSuppressesSmallRises) {
  const AlertPolicy p{"precipitation", 10.0, 0.5};
  MonitorState s;
  s = evaluate_alert(s, p, 1.0).first;
  s = evaluate_alert(s, p, 1.4).first;
  EXPECT_EQ(s.level, AlertLevel::Normal);
  s = evaluate_alert(s, p, 2.0).first;
  EXPECT_EQ(s.level, AlertLevel::Green);
}

// Property: over random series Yellow is only ever entered from Green or Yellow.
TEST(Alert, YellowNeverFollowsNormalDirectly) {
  std::srand(5);
  const AlertPolicy p{"x", 8.0, 0.1};
  for (int trial = 0; trial < 200; ++trial) {
    MonitorState s;
    AlertLevel prev = AlertLevel::Normal;
    for (int i = 0; i < 50; ++i) {
      const double v = (std::rand() % 1000) / 100.0;
      auto [next, level] = evaluate_alert(s, p, v);
      if (level == AlertLevel::Yellow) {
        ASSERT_TRUE(prev == AlertLevel::Green || prev == AlertLevel::Yellow);
      }
      s = next;
      prev = level;
    }
  }
}
