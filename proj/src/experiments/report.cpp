#include "alrl/experiments/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "alrl/core/errors.hpp"

namespace alrl {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw ArgumentError("CsvTable: empty header");
}

CsvTable& CsvTable::row(std::vector<std::string> fields) {
  if (fields.size() != header_.size()) {
    throw ArgumentError("CsvTable: row has " + std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(header_.size()));
  }
  rows_.push_back(std::move(fields));
  return *this;
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text_file(path, str()); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StateError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw StateError("write failed for " + path.string());
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
constexpr int kTicks = 5;
constexpr std::size_t kMarkerLimit = 40;

// Fixed palette, cycled.
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo < 1e-12) {
      lo -= 1.0;
      hi += 1.0;
    }
  }
};

}  // namespace

std::string render_svg_line_chart(std::span<const ChartSeries> series, const ChartOptions& options) {
  Range xr, yr;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      xr.include(x);
      yr.include(y);
    }
  }
  xr.finish();
  yr.finish();

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"22\" text-anchor=\"middle\" " +
           "font-size=\"15\">" + escape_xml(options.title) + "</text>\n";
  }

  // Grid, ticks, labels.
  for (int i = 0; i <= kTicks; ++i) {
    const double f = static_cast<double>(i) / kTicks;
    const double xv = xr.lo + f * (xr.hi - xr.lo);
    const double yv = yr.lo + f * (yr.hi - yr.lo);
    const double x = px(xv);
    const double y = py(yv);
    svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(x) + "\" y2=\"" +
           num(kTop + plot_h) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + plot_w) +
           "\" y2=\"" + num(y) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
           tick_label(yv) + "</text>\n";
  }
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!options.x_label.empty()) {
    svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 12) +
           "\" text-anchor=\"middle\">" + escape_xml(options.x_label) + "</text>\n";
  }
  if (!options.y_label.empty()) {
    svg += "<text x=\"16\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" " +
           "transform=\"rotate(-90 16 " + num(kTop + plot_h / 2) + ")\">" +
           escape_xml(options.y_label) + "</text>\n";
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const std::string color = kColors[k % std::size(kColors)];
    std::string pts;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!pts.empty()) pts += ' ';
      pts += num(px(x)) + "," + num(py(y));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    if (s.points.size() <= kMarkerLimit) {
      for (const auto& [x, y] : s.points) {
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        svg += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"3\" fill=\"" +
               color + "\"/>\n";
      }
    }
    const double ly = kTop + 10 + 20.0 * static_cast<double>(k);
    const double lx = kLeft + plot_w + 12;
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" +
           num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly + 4) + "\">" + escape_xml(s.name) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_svg_line_chart(std::span<const ChartSeries> series, const std::filesystem::path& path,
                         const ChartOptions& options) {
  write_text_file(path, render_svg_line_chart(series, options));
}

ArtifactSet::ArtifactSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

ArtifactSet::~ArtifactSet() {
  if (committed_) return;
  for (const auto& f : files_) {
    std::error_code ec;
    std::filesystem::remove(f, ec);
  }
}

std::filesystem::path ArtifactSet::add(const std::string& name) {
  files_.push_back(dir_ / name);
  return files_.back();
}

}  // namespace alrl
