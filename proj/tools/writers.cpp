#include "writers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 36.0;
constexpr double kBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double map(double v) const { return log ? std::log10(v) : v; }
  double fraction(double v) const { return (map(v) - lo) / (hi - lo); }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    lo = std::min(lo, a.map(v));
    hi = std::max(hi, a.map(v));
  }
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

}  // namespace

Json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  return x;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += format_double(values[i]);
  }
  body_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

void CsvWriter::save(const std::filesystem::path& path) const {
  std::string text;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) text += ',';
    text += header_[i];
  }
  text += '\n';
  text += body_;
  write_text(path, text);
}

void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec, const std::vector<Series>& series) {
  std::vector<double> xs, ys;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      if (usable(x, spec.log_x) && usable(y, spec.log_y)) {
        xs.push_back(x);
        ys.push_back(y);
      }
    }
  }
  const Axis ax = make_axis(xs, spec.log_x);
  const Axis ay = make_axis(ys, spec.log_y);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + pw * ax.fraction(x); };
  auto py = [&](double y) { return kTop + ph * (1.0 - ay.fraction(y)); };

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) + "\" height=\"" + fixed(kHeight) +
       "\" viewBox=\"0 0 " + fixed(kWidth) + " " + fixed(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + fixed(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(spec.title) +
       "</text>\n";
  o += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(pw) + "\" height=\"" + fixed(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double f = i / 4.0;
    const double xv = ax.lo + f * (ax.hi - ax.lo);
    const double yv = ay.lo + f * (ay.hi - ay.lo);
    const double gx = kLeft + f * pw;
    const double gy = kTop + (1.0 - f) * ph;
    const std::string xl = short_number(spec.log_x ? std::pow(10.0, xv) : xv);
    const std::string yl = short_number(spec.log_y ? std::pow(10.0, yv) : yv);
    o += "<line x1=\"" + fixed(gx) + "\" y1=\"" + fixed(kTop) + "\" x2=\"" + fixed(gx) + "\" y2=\"" + fixed(kTop + ph) +
         "\" stroke=\"#dddddd\"/>\n";
    o += "<line x1=\"" + fixed(kLeft) + "\" y1=\"" + fixed(gy) + "\" x2=\"" + fixed(kLeft + pw) + "\" y2=\"" + fixed(gy) +
         "\" stroke=\"#dddddd\"/>\n";
    o += "<text x=\"" + fixed(gx) + "\" y=\"" + fixed(kTop + ph + 16) + "\" text-anchor=\"middle\">" + xl + "</text>\n";
    o += "<text x=\"" + fixed(kLeft - 6) + "\" y=\"" + fixed(gy + 4) + "\" text-anchor=\"end\">" + yl + "</text>\n";
  }
  o += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"" + fixed(kHeight - 10) + "\" text-anchor=\"middle\">" +
       escape(spec.x_label) + "</text>\n";
  o += "<text x=\"16\" y=\"" + fixed(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       fixed(kTop + ph / 2) + ")\">" + escape(spec.y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
    std::string d;
    bool pen_down = false;
    for (const auto& [x, y] : s.points) {
      if (!usable(x, spec.log_x) || !usable(y, spec.log_y)) {
        pen_down = false;
        continue;
      }
      d += (pen_down ? " L" : (d.empty() ? "M" : " M")) + fixed(px(x)) + " " + fixed(py(y));
      pen_down = true;
      if (s.markers)
        o += "<circle cx=\"" + fixed(px(x)) + "\" cy=\"" + fixed(py(y)) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    if (s.line && !d.empty())
      o += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 16.0 + 16.0 * static_cast<double>(k);
    o += "<line x1=\"" + fixed(kLeft + pw - 150) + "\" y1=\"" + fixed(ly - 4) + "\" x2=\"" + fixed(kLeft + pw - 130) +
         "\" y2=\"" + fixed(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + fixed(kLeft + pw - 124) + "\" y=\"" + fixed(ly) + "\">" + escape(s.label) + "</text>\n";
  }
  o += "</svg>\n";
  write_text(path, o);
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace cli
