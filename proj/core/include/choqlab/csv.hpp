#pragma once

#include <cstdio>
#include <string>

namespace choqlab {

// 17 significant digits: doubles round-trip and runs stay byte-identical.
inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// write-temp-then-rename; the destination never holds a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace choqlab
