#include "slesim/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sle {

std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc{} && res.ptr == s.data() + s.size(), Errc::format,
          "bad number: '" + std::string(s) + "'");
  return v;
}

namespace {

constexpr const char* kMagic = "slesim-trace";

void put_kv(std::ostream& os, const char* key, const std::string& v) {
  os << key << ' ' << v << '\n';
}

}  // namespace

void write_trace(const std::filesystem::path& path, const DrivingPath& driving,
                 const Trace& trace, const TraceFileMeta& meta) {
  require(driving.times.size() == trace.points.size(), Errc::param,
          "driving and trace grids differ");
  std::ofstream os(path);
  require(bool(os), Errc::format, "cannot open " + path.string());
  os << kMagic << " v" << meta.version << '\n';
  put_kv(os, "kappa", fmt_double(meta.kappa));
  put_kv(os, "a", fmt_double(meta.a));
  put_kv(os, "dt", fmt_double(meta.dt));
  put_kv(os, "t_max", fmt_double(meta.t_max));
  put_kv(os, "seed", std::to_string(meta.seed));
  put_kv(os, "replica", std::to_string(meta.replica));
  put_kv(os, "points", std::to_string(trace.points.size()));
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    os << fmt_double(driving.times[i]) << '\t' << fmt_double(driving.values[i]) << '\t'
       << fmt_double(trace.points[i].real()) << '\t' << fmt_double(trace.points[i].imag())
       << '\n';
  }
  require(bool(os), Errc::format, "write failed for " + path.string());
}

TraceFileData read_trace(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(bool(is), Errc::format, "cannot open " + path.string());
  std::string line;
  require(bool(std::getline(is, line)), Errc::format, "missing header line");
  {
    std::istringstream hs(line);
    std::string magic, ver;
    hs >> magic >> ver;
    require(magic == kMagic, Errc::format, "not a trace file");
    require(ver == "v1", Errc::format, "unsupported trace version '" + ver + "'");
  }
  TraceFileData out;
  out.meta.version = 1;
  std::size_t n_points = 0;
  for (int i = 0; i < 6; ++i) {
    require(bool(std::getline(is, line)), Errc::format, "truncated header");
    std::istringstream hs(line);
    std::string key, value;
    hs >> key >> value;
    require(!value.empty(), Errc::format, "bad header line: '" + line + "'");
    if (key == "kappa") {
      out.meta.kappa = parse_double(value);
    } else if (key == "a") {
      out.meta.a = parse_double(value);
    } else if (key == "dt") {
      out.meta.dt = parse_double(value);
    } else if (key == "t_max") {
      out.meta.t_max = parse_double(value);
    } else if (key == "seed") {
      out.meta.seed = std::stoull(value);
    } else if (key == "replica") {
      out.meta.replica = std::uint32_t(std::stoul(value));
    } else if (key == "points") {
      n_points = std::stoull(value);
    } else {
      fail(Errc::format, "unknown header key '" + key + "'");
    }
  }
  require(n_points >= 1, Errc::format, "missing points header");
  require(std::abs(out.meta.kappa * out.meta.a - 2.0) <= 1e-12, Errc::format,
          "header violates kappa * a = 2");

  out.driving.kappa = out.meta.kappa;
  out.driving.a = out.meta.a;
  out.trace.kappa = out.meta.kappa;
  out.trace.a = out.meta.a;
  out.driving.times.reserve(n_points);
  out.driving.values.reserve(n_points);
  out.trace.points.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    if (!std::getline(is, line))
      fail(Errc::format, "truncated at row " + std::to_string(i) + " of " +
                             std::to_string(n_points));
    std::array<std::string_view, 4> cols;
    std::string_view sv = line;
    std::size_t col = 0;
    while (col < 4) {
      const std::size_t tab = sv.find('\t');
      cols[col++] = sv.substr(0, tab);
      if (tab == std::string_view::npos) break;
      sv.remove_prefix(tab + 1);
    }
    if (col != 4)
      fail(Errc::format, "malformed row " + std::to_string(i) + ": '" + line + "'");
    out.driving.times.push_back(parse_double(cols[0]));
    out.driving.values.push_back(parse_double(cols[1]));
    out.trace.points.emplace_back(parse_double(cols[2]), parse_double(cols[3]));
  }
  out.trace.times = out.driving.times;
  out.trace.degenerate.assign(n_points, 0);
  return out;
}

}  // namespace sle
