#pragma once

#include <cstddef>

#include <sys/resource.h>

namespace uspt {

/// Process high-water resident set size in bytes, as reported by the OS.
inline std::size_t peak_rss_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::size_t>(usage.ru_maxrss) * 1024;  // Linux reports KiB
}

}  // namespace uspt
