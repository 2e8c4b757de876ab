#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <memory>

#include "iotsim/error.hpp"
#include "iotsim/outputs.hpp"
#include "iotsim/presets.hpp"
#include "iotsim/simulation.hpp"
#include "iotsim/sweep.hpp"

using namespace iotsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t duration_arg(const std::string& text, const char* flag) {
  auto d = parse_duration(text);
  if (!d || *d == 0) throw UsageError(fmt::format("{}: '{}' is not a positive duration", flag, text));
  return *d;
}

template <typename T>
std::vector<T> csv_list(const std::string& text, const char* flag, bool durations) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (durations) {
      out.push_back(static_cast<T>(duration_arg(item, flag)));
    } else {
      try {
        std::size_t used = 0;
        const auto v = std::stoull(item, &used);
        if (used != item.size() || v == 0) throw std::invalid_argument(item);
        out.push_back(static_cast<T>(v));
      } catch (const std::exception&) {
        throw UsageError(fmt::format("{}: '{}' is not a positive integer", flag, item));
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string horizon;
  std::optional<std::uint32_t> locations;
  std::string interval;
  std::optional<std::uint32_t> sensors_per_type;
};

void print_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << d.str() << '\n';
}

// Builds the spec from a preset name or a scenario file; overrides applied last.
ScenarioSpec load(const Common& c) {
  PresetOptions preset;
  preset.locations = c.locations;
  preset.sensors_per_type = c.sensors_per_type;
  preset.seed = c.seed;
  if (!c.interval.empty()) preset.interval_s = duration_arg(c.interval, "--interval");
  if (!c.horizon.empty()) preset.horizon_s = duration_arg(c.horizon, "--horizon");

  ScenarioSpec spec;
  if (is_preset(c.scenario)) {
    spec = make_preset(c.scenario, preset);
  } else {
    auto parsed = parse_scenario_file(c.scenario);
    print_diagnostics(parsed.diagnostics);
    if (!parsed.ok()) throw Error(Errc::InvalidScenario, "scenario '" + c.scenario + "' is invalid");
    spec = std::move(*parsed.spec);
    if (c.locations) spec = replicate(spec, *c.locations);
    if (preset.interval_s) set_reading_interval(spec, *preset.interval_s);
    if (preset.horizon_s) spec.horizon_s = *preset.horizon_s;
    if (c.seed) spec.seed = *c.seed;
  }
  return spec;
}

RunInfo run_info(const Simulation& sim_const, Simulation& sim) {
  RunInfo info;
  info.scenario = sim_const.spec().name;
  info.seed = sim_const.spec().seed;
  info.horizon_s = sim_const.spec().horizon_s;
  info.counters["nodes_built"] = sim.nodes_built();
  info.counters["sensors"] = sim.sensor_count();
  std::uint64_t stored = 0;
  std::uint64_t daily = 0;
  for (const auto& dc : sim.datacenters()) {
    stored += dc->store().size();
    daily += dc->daily_averages().size();
  }
  info.counters["records_stored"] = stored;
  info.counters["daily_averages"] = daily;
  info.counters["vms_provisioned"] = sim.broker().provisioned();
  info.counters["vms_rejected"] = sim.broker().rejected();
  info.counters["cloudlets_completed"] = sim.broker().completed().size();
  info.counters["requests_unserved"] = sim.broker().unserved();
  for (std::size_t k = 0; k < kTraceKindCount; ++k) {
    const auto kind = static_cast<TraceKind>(k);
    info.counters["trace_" + std::string(to_string(kind))] = sim.trace_count(kind);
  }
  return info;
}

int execute(const ScenarioSpec& spec, const std::string& trace_path, const std::string& metrics_path) {
  std::unique_ptr<CsvTraceWriter> writer;
  if (!trace_path.empty()) writer = std::make_unique<CsvTraceWriter>(trace_path);
  Simulation sim(spec, writer.get());
  const RunStats stats = sim.run();
  if (!metrics_path.empty()) write_metrics(stats, run_info(sim, sim), metrics_path);
  std::cout << fmt::format(
      "{}: events={} sensors={} nodes={} packets sent={} delivered={} lost={} in_flight={} "
      "wall_ms={:.1f} peak_mem={} ({}) trace_hash={:016x}\n",
      spec.name, stats.events_processed, sim.sensor_count(), sim.nodes_built(), stats.packets_sent,
      stats.packets_delivered, stats.packets_lost, stats.packets_in_flight, stats.wall_clock_ms,
      stats.peak_memory_bytes, stats.peak_memory_source, stats.trace_hash);
  return kExitOk;
}

void add_common(CLI::App* cmd, Common& c, bool scenario_required) {
  auto* opt = cmd->add_option("--scenario", c.scenario, "Scenario file or preset name (env-iot, jose)");
  if (scenario_required) opt->required();
  cmd->add_option("--seed", c.seed, "Override the scenario seed");
  cmd->add_option("--horizon", c.horizon, "Override the horizon (e.g. 30d)");
  cmd->add_option("--locations", c.locations, "Replicate the topology this many times");
  cmd->add_option("--interval", c.interval, "Override every sensor reading interval (e.g. 6h)");
  cmd->add_option("--sensors-per-type", c.sensors_per_type, "jose preset: sensors per metric type per city");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event IoT simulator"};
  app.require_subcommand(1);

  Common common;
  std::string trace_path = "trace.csv";
  std::string metrics_path = "metrics.json";

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and print diagnostics");
  add_common(validate_cmd, common, true);

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write trace and metrics");
  add_common(run_cmd, common, true);
  run_cmd->add_option("--trace", trace_path, "Trace CSV path ('' to skip)")->capture_default_str();
  run_cmd->add_option("--metrics", metrics_path, "Metrics JSON path ('' to skip)")->capture_default_str();

  std::string locations_csv = "1";
  std::string intervals_csv;
  std::uint32_t repeats = 1;
  unsigned jobs = 1;
  std::string sweep_out = "sweep.csv";
  auto* sweep_cmd = app.add_subcommand("sweep", "Run locations x intervals x repeats and write a CSV");
  sweep_cmd->add_option("--scenario", common.scenario, "Base scenario file or preset name")->required();
  sweep_cmd->add_option("--seed", common.seed, "Base seed; cell i uses seed + i");
  sweep_cmd->add_option("--horizon", common.horizon, "Override the horizon");
  sweep_cmd->add_option("--sensors-per-type", common.sensors_per_type, "jose preset scale");
  sweep_cmd->add_option("--locations", locations_csv, "Comma-separated location counts")->capture_default_str();
  sweep_cmd->add_option("--intervals", intervals_csv, "Comma-separated reading intervals (e.g. 24h,6h)");
  sweep_cmd->add_option("--repeats", repeats, "Repeats per cell")->capture_default_str()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--jobs", jobs, "Parallel workers")->capture_default_str()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep_out, "Sweep CSV path ('-' for stdout)")->capture_default_str();

  std::string preset_name;
  std::string preset_trace;
  std::string preset_metrics = "metrics.json";
  std::string dump_path;
  auto* preset_cmd = app.add_subcommand("preset", "Build and run a case-study preset");
  preset_cmd->add_option("name", preset_name, "env-iot or jose")->required();
  add_common(preset_cmd, common, false);
  preset_cmd->add_option("--trace", preset_trace, "Trace CSV path (off by default)");
  preset_cmd->add_option("--metrics", preset_metrics, "Metrics JSON path ('' to skip)")->capture_default_str();
  preset_cmd->add_option("--dump", dump_path, "Write the preset as a scenario document and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate_cmd) {
      if (is_preset(common.scenario)) {
        const auto diagnostics = validate(load(common));
        print_diagnostics(diagnostics);
        std::cout << "ok\n";
        return kExitOk;
      }
      auto parsed = parse_scenario_file(common.scenario);
      print_diagnostics(parsed.diagnostics);
      if (!parsed.ok()) return kExitUsage;
      std::cout << fmt::format("ok: {} nodes, {} datacenters\n", parsed.spec->nodes.size(),
                               parsed.spec->datacenters.size());
      return kExitOk;
    }
    if (*run_cmd) return execute(load(common), trace_path, metrics_path);
    if (*preset_cmd) {
      common.scenario = preset_name;
      if (!is_preset(preset_name)) throw Error(Errc::UnknownPreset, "unknown preset '" + preset_name + "'");
      const ScenarioSpec spec = load(common);
      if (!dump_path.empty()) {
        std::ofstream out(dump_path);
        out << serialize_scenario(spec);
        if (!out) throw Error(Errc::IoFailure, "cannot write " + dump_path);
        return kExitOk;
      }
      return execute(spec, preset_trace, preset_metrics);
    }
    if (*sweep_cmd) {
      Common base = common;
      base.locations.reset();
      const ScenarioSpec spec = load(base);
      SweepOptions options;
      options.locations = csv_list<std::uint32_t>(locations_csv, "--locations", false);
      if (!intervals_csv.empty()) options.intervals_s = csv_list<std::uint64_t>(intervals_csv, "--intervals", true);
      options.repeats = repeats;
      options.jobs = jobs;
      const auto rows = run_sweep(spec, options);
      const std::string csv = sweep_csv(rows);
      if (sweep_out == "-") {
        std::cout << csv;
      } else {
        std::ofstream out(sweep_out);
        out << csv;
        if (!out) throw Error(Errc::IoFailure, "cannot write " + sweep_out);
      }
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.ok ? 0 : 1;
      std::cerr << fmt::format("sweep: {} cells, {} failed\n", rows.size(), failed);
      return failed == 0 ? kExitOk : kExitRuntime;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::InvalidScenario:
      case Errc::UnknownPreset:
      case Errc::MissingFile:
        return kExitUsage;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
