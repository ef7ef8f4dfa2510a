#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "lqgap/errors.hpp"

namespace lqgap {

// 17 significant digits: enough to round-trip any IEEE-754 double, so emitted
// CSVs are exact and byte-stable. '.' decimal separator regardless of locale
// (snprintf with the C locale semantics of %g).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Write-to-temp + rename, so a failed run never leaves a partial output file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw ValidationError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ValidationError("cannot move " + tmp.string() + " to " + target.string() + ": " +
                          ec.message());
  }
}

}  // namespace lqgap
