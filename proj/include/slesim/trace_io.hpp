#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "slesim/driving.hpp"
#include "slesim/loewner.hpp"

namespace sle {

// Shortest round-trip decimal formatting; read(write(x)) == x bit-exactly.
std::string fmt_double(double v);
double parse_double(std::string_view s);

struct TraceFileMeta {
  int version = 1;
  double kappa = 0;
  double a = 0;
  double dt = 0;
  double t_max = 0;
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
};

struct TraceFileData {
  TraceFileMeta meta;
  DrivingPath driving;
  Trace trace;
};

void write_trace(const std::filesystem::path& path, const DrivingPath& driving,
                 const Trace& trace, const TraceFileMeta& meta);

TraceFileData read_trace(const std::filesystem::path& path);

}  // namespace sle
