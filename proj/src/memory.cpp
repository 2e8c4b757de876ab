#include "iotsim/memory.hpp"

#include <fstream>
#include <string>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/resource.h>
#endif

namespace iotsim {

bool reset_peak_memory() {
#if defined(__linux__)
  std::ofstream out("/proc/self/clear_refs");
  if (!out) return false;
  out << "5";
  out.flush();
  return static_cast<bool>(out);
#else
  return false;
#endif
}

PeakMemory peak_memory() {
#if defined(__linux__)
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      const auto kb = std::stoull(line.substr(6));
      return PeakMemory{kb * 1024, "proc_vmhwm"};
    }
  }
#endif
#if defined(__unix__) || defined(__APPLE__)
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) == 0 && usage.ru_maxrss > 0) {
#if defined(__APPLE__)
    return PeakMemory{static_cast<std::uint64_t>(usage.ru_maxrss), "rusage_maxrss"};
#else
    return PeakMemory{static_cast<std::uint64_t>(usage.ru_maxrss) * 1024, "rusage_maxrss"};
#endif
  }
#endif
  return PeakMemory{0, "unavailable"};
}

}  // namespace iotsim
