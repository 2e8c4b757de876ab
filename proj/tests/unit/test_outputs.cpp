#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "builders.hpp"
#include "iotsim/error.hpp"
#include "iotsim/memory.hpp"
#include "iotsim/outputs.hpp"
#include "iotsim/presets.hpp"
#include "iotsim/simulation.hpp"

using namespace iotsim;
using namespace iotsim::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunStats strip_timing(RunStats s) {
  s.wall_clock_ms = 0;
  s.peak_memory_bytes = 0;
  s.peak_memory_source.clear();
  return s;
}

}  // namespace

TEST(Metrics, JsonRoundTrip) {
  RunStats s;
  s.events_processed = 12;
  s.final_time = SimTime{99};
  s.packets_sent = 5;
  s.packets_delivered = 3;
  s.packets_lost = 1;
  s.packets_in_flight = 1;
  s.readings_emitted = 4;
  s.wall_clock_ms = 1.5;
  s.peak_memory_bytes = 1 << 20;
  s.peak_memory_source = "proc_vmhwm";
  s.trace_hash = 0x00ab00cd00ef0012ULL;
  RunInfo info{"demo", 42, 3600, {{"sensors", 6}, {"trace_sense", 720}}};
  const auto path = fs::temp_directory_path() / "iotsim_test_metrics.json";
  write_metrics(s, info, path);
  const auto doc = read_metrics(path);
  EXPECT_EQ(doc.stats, s);
  EXPECT_EQ(doc.info, info);
  EXPECT_NE(slurp(path).find("\"trace_hash\": \"00ab00cd00ef0012\""), std::string::npos);
}

TEST(Metrics, ErrorsAreIoFailures) {
  EXPECT_THROW(read_metrics("/nonexistent/m.json"), Error);
  const auto bad = fs::temp_directory_path() / "iotsim_test_bad.json";
  std::ofstream(bad) << "{\"scenario\": 1}";
  try {
    read_metrics(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IoFailure);
  }
  EXPECT_THROW(write_metrics(RunStats{}, RunInfo{}, "/nonexistent/dir/m.json"), Error);
}

TEST(Outputs, WriteOutputsBothFiles) {
  const auto dir = fs::temp_directory_path();
  std::vector<TraceRecord> trace{{SimTime{1}, TraceKind::Sense, "a", {{"value", "1"}}}};
  write_outputs(RunStats{}, RunInfo{"x", 1, 2, {}}, trace,
                OutputPaths{dir / "iotsim_test_out.csv", dir / "iotsim_test_out.json"});
  EXPECT_EQ(read_trace_csv(dir / "iotsim_test_out.csv"), trace);
  EXPECT_EQ(read_metrics(dir / "iotsim_test_out.json").info.scenario, "x");
}

TEST(Determinism, SameSeedSameBytes) {
  const auto dir = fs::temp_directory_path();
  auto spec = star(6, kSecondsPerHour, 3 * kSecondsPerDay);
  for (auto& n : spec.nodes) n.connection.base_loss = 0.2;
  std::vector<RunStats> stats;
  for (int i = 0; i < 2; ++i) {
    CsvTraceWriter w(dir / ("iotsim_test_det" + std::to_string(i) + ".csv"));
    Simulation sim(spec, &w);
    stats.push_back(strip_timing(sim.run()));
  }
  EXPECT_EQ(stats[0], stats[1]);
  EXPECT_EQ(slurp(dir / "iotsim_test_det0.csv"), slurp(dir / "iotsim_test_det1.csv"));

  spec.seed = 2;
  Simulation other(spec);
  EXPECT_NE(other.run().trace_hash, stats[0].trace_hash);
}

TEST(Determinism, TracingDoesNotChangeTheRun) {
  const auto spec = env_iot_preset();
  MemoryTrace trace;
  Simulation traced(spec, &trace);
  Simulation quiet(spec);
  const auto a = strip_timing(traced.run());
  const auto b = strip_timing(quiet.run());
  EXPECT_EQ(a, b);
  for (std::size_t k = 0; k < kTraceKindCount; ++k) {
    EXPECT_EQ(traced.trace_count(static_cast<TraceKind>(k)), quiet.trace_count(static_cast<TraceKind>(k)));
    EXPECT_EQ(trace.count(static_cast<TraceKind>(k)), quiet.trace_count(static_cast<TraceKind>(k)));
  }
}

TEST(Memory, PeakIsReported) {
  reset_peak_memory();
  const auto m = peak_memory();
  EXPECT_GT(m.bytes, 0u);
  EXPECT_FALSE(m.source.empty());
  Simulation sim(env_iot_preset());
  const auto s = sim.run();
  EXPECT_GT(s.peak_memory_bytes, 0u);
  EXPECT_GT(s.wall_clock_ms, 0.0);
  EXPECT_GT(sim.estimated_memory_bytes(), 0u);
}
