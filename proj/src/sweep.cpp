#include "iotsim/sweep.hpp"

#include <fmt/format.h>

#include <atomic>
#include <mutex>
#include <thread>

#include "iotsim/simulation.hpp"

namespace iotsim {

namespace {

struct Cell {
  std::uint32_t locations;
  std::uint64_t interval_s;
  std::uint32_t repeat;
};

void run_cell(const ScenarioSpec& base, const Cell& cell, SweepRow& row) {
  try {
    ScenarioSpec spec = replicate(base, cell.locations);
    if (cell.interval_s > 0) set_reading_interval(spec, cell.interval_s);
    spec.seed = row.seed;
    Simulation sim(spec);
    const RunStats stats = sim.run();
    row.wall_ms = stats.wall_clock_ms;
    row.peak_mem = stats.peak_memory_bytes;
    row.peak_mem_source = stats.peak_memory_source;
    row.events = stats.events_processed;
    row.trace_hash = stats.trace_hash;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioSpec& base, const SweepOptions& options) {
  std::vector<Cell> cells;
  const std::vector<std::uint64_t> intervals =
      options.intervals_s.empty() ? std::vector<std::uint64_t>{0} : options.intervals_s;
  for (std::uint32_t loc : options.locations) {
    for (std::uint64_t interval : intervals) {
      for (std::uint32_t r = 0; r < options.repeats; ++r) cells.push_back(Cell{loc, interval, r});
    }
  }

  std::vector<SweepRow> rows(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    rows[i].index = i;
    rows[i].locations = cells[i].locations;
    rows[i].interval_s = cells[i].interval_s;
    rows[i].repeat = cells[i].repeat;
    rows[i].seed = base.seed + i;
  }

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(cells.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(base, cells[i], rows[i]);
    return rows;
  }

  // Each worker writes only its own rows, so rows stay in cross-product order.
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(base, cells[i], rows[i]);
    });
  }
  for (auto& t : workers) t.join();
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    std::string error = r.error;
    for (char& c : error) {
      if (c == ',' || c == '\n' || c == '\r') c = ' ';
    }
    out += fmt::format("{},{},{},{},{:.3f},{},{},{},{},{}\n", r.locations, r.interval_s, r.repeat, r.seed,
                       r.wall_ms, r.peak_mem, r.peak_mem_source, r.events, r.ok ? "ok" : "failed", error);
  }
  return out;
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  LinearFit fit;
  if (n == 0) return fit;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += e * e;
  }
  fit.r2 = syy > 0 ? 1.0 - ss_res / syy : (ss_res == 0 ? 1.0 : 0.0);
  return fit;
}

}  // namespace iotsim
