#pragma once

// Output helpers: CSV at full round-trip precision, JSON numbers with an
// "inf" sentinel, and line plots emitted directly as SVG paths.

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace cli {

using Json = nlohmann::ordered_json;

/// Finite values as numbers; infinities and NaN as "inf", "-inf", "nan".
Json number(double x);

/// %.17g, which round-trips every double.
std::string format_double(double x);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(const std::vector<double>& values);
  /// Text cells are written verbatim and must not contain commas.
  void row(const std::vector<std::string>& cells);
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::string body_;
};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool markers = false;
  bool line = true;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Writes a 640x420 SVG line plot; non-finite points (and nonpositive ones
/// on log axes) are skipped.
void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec, const std::vector<Series>& series);

void write_json(const std::filesystem::path& path, const Json& j);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cli
