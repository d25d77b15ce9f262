#pragma once

#include <cstdio>
#include <string>

namespace levnano::detail {

// Round-trippable decimal for CSV, metadata and manifests.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace levnano::detail
