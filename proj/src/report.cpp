#include "slesim/report.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>

#include "slesim/error.hpp"
#include "slesim/trace_io.hpp"

namespace sle {

void write_csv(const std::filesystem::path& path, const CsvTable& table,
               const std::vector<std::string>& column_docs) {
  std::ofstream os(path);
  require(bool(os), Errc::format, "cannot open " + path.string());
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
  os << '\n';
  for (const auto& row : table.rows) {
    require(row.size() == table.columns.size(), Errc::param, "csv row width mismatch");
    for (std::size_t c = 0; c < row.size(); ++c)
      os << fmt_double(row[c]) << (c + 1 < row.size() ? "," : "");
    os << '\n';
  }

  std::filesystem::path schema = path;
  schema += ".schema.txt";
  std::ofstream ss(schema);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    ss << table.columns[c];
    if (c < column_docs.size() && !column_docs[c].empty()) ss << ": " << column_docs[c];
    ss << '\n';
  }
}

namespace {

struct Mapper {
  double x0, x1, y0, y1;  // data range (possibly log-transformed)
  static constexpr double W = 640, H = 440, L = 70, R = 20, T = 40, B = 50;

  double px(double x) const { return L + (x - x0) / (x1 - x0) * (W - L - R); }
  double py(double y) const { return H - B - (y - y0) / (y1 - y0) * (H - T - B); }
};

double tr(double v, bool log_scale) { return log_scale ? std::log10(v) : v; }

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const SvgPlot& plot) {
  std::ofstream os(path);
  require(bool(os), Errc::format, "cannot open " + path.string());

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double x = tr(s.x[i], plot.logx), y = tr(s.y[i], plot.logy);
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x0 > x1) {
    x0 = 0;
    x1 = 1;
  }
  if (y0 > y1) {
    y0 = 0;
    y1 = 1;
  }
  if (x1 - x0 < 1e-12) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double padx = 0.05 * (x1 - x0), pady = 0.08 * (y1 - y0);
  Mapper m{x0 - padx, x1 + padx, y0 - pady, y1 + pady};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Mapper::W << "\" height=\""
     << Mapper::H << "\" viewBox=\"0 0 " << Mapper::W << ' ' << Mapper::H << "\">\n";
  if (plot.timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    os << "<!-- generated " << buf << " -->\n";
  }
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << Mapper::W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << plot.title << "</text>\n";

  // axes with a few ticks
  os << "<line x1=\"" << Mapper::L << "\" y1=\"" << Mapper::H - Mapper::B << "\" x2=\""
     << Mapper::W - Mapper::R << "\" y2=\"" << Mapper::H - Mapper::B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << Mapper::L << "\" y1=\"" << Mapper::T << "\" x2=\"" << Mapper::L
     << "\" y2=\"" << Mapper::H - Mapper::B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = m.x0 + (m.x1 - m.x0) * i / 4.0;
    const double fy = m.y0 + (m.y1 - m.y0) * i / 4.0;
    const double vx = plot.logx ? std::pow(10.0, fx) : fx;
    const double vy = plot.logy ? std::pow(10.0, fy) : fy;
    char bx[32], by[32];
    std::snprintf(bx, sizeof(bx), "%.4g", vx);
    std::snprintf(by, sizeof(by), "%.4g", vy);
    os << "<text x=\"" << m.px(fx) << "\" y=\"" << Mapper::H - Mapper::B + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << bx << "</text>\n";
    os << "<text x=\"" << Mapper::L - 8 << "\" y=\"" << m.py(fy) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << by << "</text>\n";
  }
  os << "<text x=\"" << (Mapper::L + Mapper::W - Mapper::R) / 2 << "\" y=\"" << Mapper::H - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">" << plot.xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (Mapper::T + Mapper::H - Mapper::B) / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << (Mapper::T + Mapper::H - Mapper::B) / 2 << ")\">" << plot.ylabel << "</text>\n";

  for (const auto& s : plot.series) {
    if (s.x.empty()) continue;
    if (!s.points_only) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        os << m.px(tr(s.x[i], plot.logx)) << ',' << m.py(tr(s.y[i], plot.logy)) << ' ';
      os << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i)
      os << "<circle cx=\"" << m.px(tr(s.x[i], plot.logx)) << "\" cy=\""
         << m.py(tr(s.y[i], plot.logy)) << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
  }

  if (plot.fit_line) {
    const auto [slope, intercept] = *plot.fit_line;
    const double ya = slope * m.x0 + intercept, yb = slope * m.x1 + intercept;
    os << "<line x1=\"" << m.px(m.x0) << "\" y1=\"" << m.py(ya) << "\" x2=\"" << m.px(m.x1)
       << "\" y2=\"" << m.py(yb) << "\" stroke=\"#c23b22\" stroke-dasharray=\"5,4\"/>\n";
  }
  if (!plot.annotation.empty()) {
    os << "<text x=\"" << Mapper::W - Mapper::R - 6 << "\" y=\"" << Mapper::T + 14
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"#c23b22\">" << plot.annotation
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace sle
