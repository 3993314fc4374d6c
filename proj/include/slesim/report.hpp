#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sle {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Writes the table and a sidecar `<name>.schema.txt` documenting the columns.
void write_csv(const std::filesystem::path& path, const CsvTable& table,
               const std::vector<std::string>& column_docs = {});

struct SvgSeries {
  std::vector<double> x, y;
  std::string label;
  std::string color = "#1f6fb2";
  bool points_only = false;
};

struct SvgPlot {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  std::vector<SvgSeries> series;
  // slope/intercept in (possibly log-transformed) plot coordinates
  std::optional<std::pair<double, double>> fit_line;
  std::string annotation;
  bool timestamp = true;
};

void write_svg_plot(const std::filesystem::path& path, const SvgPlot& plot);

}  // namespace sle
