#pragma once

// Output helpers: atomic file writes (temp + rename) and the fixed CSV
// trace schema.  Doubles are printed with shortest round-trip formatting so
// identical runs produce byte-identical files.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "proxlab/ppa.hpp"

namespace proxlab {

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw io_error("double formatting failed");
  return std::string(buf, res.ptr);
}

inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw io_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline const char* k_trace_csv_header = "n,gamma,step_dist,residual,dist_to_p,cum_sq";

inline std::string trace_to_csv(const iteration_trace& tr) {
  std::string csv = k_trace_csv_header;
  csv += "\n";
  for (const auto& r : tr.rows) {
    csv += std::to_string(r.n);
    csv += ",";
    csv += format_double(r.gamma);
    csv += ",";
    csv += format_double(r.step_dist);
    csv += ",";
    csv += format_double(r.residual);
    csv += ",";
    csv += format_double(r.dist_to_p);
    csv += ",";
    csv += format_double(r.cum_sq);
    csv += "\n";
  }
  return csv;
}

}  // namespace proxlab
