#pragma once

#include <cstdint>
#include <string>

namespace iotsim {

struct PeakMemory {
  std::uint64_t bytes = 0;
  std::string source;  // "proc_vmhwm", "rusage_maxrss" or "unavailable"
};

/// Resets the process high-water mark where the platform allows it.
/// Returns true when the next reading reflects only what happens after the reset.
bool reset_peak_memory();

PeakMemory peak_memory();

}  // namespace iotsim
