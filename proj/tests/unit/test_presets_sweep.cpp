#include <gtest/gtest.h>

#include "iotsim/error.hpp"
#include "iotsim/presets.hpp"
#include "iotsim/simulation.hpp"
#include "iotsim/sweep.hpp"

using namespace iotsim;

TEST(Presets, EnvIotShape) {
  const auto spec = env_iot_preset();
  EXPECT_EQ(spec.nodes.size(), 8u);
  EXPECT_EQ(spec.datacenters.size(), 1u);
  EXPECT_EQ(spec.horizon_s, 30 * kSecondsPerDay);
  EXPECT_TRUE(validate(spec).empty());
  Simulation sim(spec);
  EXPECT_EQ(sim.nodes_built(), 9u);
  EXPECT_EQ(sim.sensor_count(), 6u);
}

TEST(Presets, EnvIotScalesByLocation) {
  EnvIotOptions o;
  o.locations = 100;
  const auto spec = env_iot_preset(o);
  EXPECT_EQ(spec.nodes.size(), 800u);
  Simulation sim(spec);
  EXPECT_EQ(sim.nodes_built(), 900u);
}

TEST(Presets, JoseSmallScaleCounts) {
  JoseOptions o;
  o.sensors_per_type = 4;
  o.days = 2;
  Simulation sim(jose_preset(o));
  EXPECT_EQ(sim.sensor_count(), 5u * 5u * 4u);
  // 5 x 10 storage hosts + 3 x 400 compute hosts; every host holds exactly ten VMs.
  EXPECT_EQ(sim.broker().provisioned(), (5u * 10u + 3u * 400u) * 10u);
  EXPECT_EQ(sim.broker().rejected(), 0u);
  sim.run();
  std::size_t stored = 0;
  for (const auto& dc : sim.datacenters()) stored += dc->store().size();
  EXPECT_EQ(stored, 5u * 5u * 2u);
  // Two daily workload ticks of 250 requests plus one storage request per record.
  EXPECT_EQ(sim.broker().completed().size(), 2u * 250u + stored);
}

TEST(Presets, UnknownPreset) {
  EXPECT_TRUE(is_preset("jose"));
  EXPECT_FALSE(is_preset("mars"));
  try {
    make_preset("mars");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownPreset);
  }
}

TEST(Presets, OverridesApply) {
  PresetOptions o;
  o.interval_s = 3 * kSecondsPerHour;
  o.horizon_s = 2 * kSecondsPerDay;
  o.seed = 9;
  const auto spec = make_preset("env-iot", o);
  EXPECT_EQ(spec.seed, 9u);
  EXPECT_EQ(spec.horizon_s, 2 * kSecondsPerDay);
  EXPECT_EQ(spec.nodes[0].sensor()->interval_s, 3 * kSecondsPerHour);
}

TEST(Sweep, CrossProductRowsInOrder) {
  EnvIotOptions o;
  o.days = 2;
  const auto base = env_iot_preset(o);
  SweepOptions opts;
  opts.locations = {1, 3};
  opts.intervals_s = {6 * kSecondsPerHour, 12 * kSecondsPerHour};
  opts.repeats = 2;
  opts.jobs = 3;
  const auto rows = run_sweep(base, opts);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].index, i);
    EXPECT_EQ(rows[i].seed, base.seed + i);
    EXPECT_TRUE(rows[i].ok) << rows[i].error;
    EXPECT_GT(rows[i].events, 0u);
  }
  EXPECT_EQ(rows[0].locations, 1u);
  EXPECT_EQ(rows[4].locations, 3u);
  EXPECT_EQ(rows[2].interval_s, 12 * kSecondsPerHour);
  EXPECT_EQ(rows[1].repeat, 1u);
  // Three locations do three times the work.
  EXPECT_GT(rows[4].events, 2 * rows[0].events);

  const auto csv = sweep_csv(rows);
  EXPECT_EQ(csv.substr(0, kSweepCsvHeader.size()), kSweepCsvHeader);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
}

TEST(Sweep, SerialAndParallelAgree) {
  EnvIotOptions o;
  o.days = 2;
  const auto base = env_iot_preset(o);
  SweepOptions opts;
  opts.locations = {1, 2};
  opts.repeats = 2;
  auto serial = run_sweep(base, opts);
  opts.jobs = 4;
  auto parallel = run_sweep(base, opts);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].trace_hash, parallel[i].trace_hash);
    EXPECT_EQ(serial[i].events, parallel[i].events);
  }
}

TEST(Sweep, FailingCellIsRecorded) {
  EnvIotOptions o;
  o.days = 1;
  auto base = env_iot_preset(o);
  base.nodes[0].forward = "nowhere";
  SweepOptions opts;
  opts.locations = {1};
  const auto rows = run_sweep(base, opts);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].ok);
  EXPECT_NE(rows[0].error.find("nowhere"), std::string::npos);
  EXPECT_NE(sweep_csv(rows).find("failed"), std::string::npos);
}

TEST(LinearFit, ExactLineAndNoise) {
  const std::vector<double> xs{1, 2, 3, 4};
  const std::vector<double> ys{3, 5, 7, 9};
  const auto f = linear_fit(xs, ys);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  const std::vector<double> flat{5, 1, 5, 1};
  EXPECT_LT(linear_fit(xs, flat).r2, 0.5);
}
