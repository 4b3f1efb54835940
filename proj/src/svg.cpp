#include "eduspace/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "eduspace/error.hpp"

namespace eduspace {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string channel_hex(double v) {
  int byte = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  char buf[4];
  std::snprintf(buf, sizeof(buf), "%02x", byte);
  return buf;
}

}  // namespace

std::string svg_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill,
                     const std::string& stroke, double stroke_width) {
  body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
        << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"";
  if (!stroke.empty()) {
    body_ << " stroke=\"" << stroke << "\" stroke-width=\"" << num(stroke_width) << "\"";
  }
  body_ << "/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill, double opacity) {
  body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
        << "\" fill=\"" << fill << "\"";
  if (opacity < 1.0) body_ << " fill-opacity=\"" << num(opacity) << "\"";
  body_ << "/>\n";
}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width) {
  body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
        << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
        << num(width) << "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content, double size,
                     const std::string& anchor, const std::string& fill) {
  body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size)
        << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\" fill=\"" << fill
        << "\">" << svg_escape(content) << "</text>\n";
}

std::string SvgCanvas::str() const {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\""
      << num(height_) << "\" viewBox=\"0 0 " << num(width_) << " " << num(height_) << "\">\n"
      << body_.str() << "</svg>\n";
  return out.str();
}

void SvgCanvas::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << str();
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // piecewise ramp: near-black, blue, magenta, orange, light yellow
  constexpr std::array<std::array<double, 3>, 5> stops = {{
      {0.05, 0.03, 0.10},
      {0.23, 0.12, 0.55},
      {0.70, 0.21, 0.47},
      {0.97, 0.55, 0.19},
      {0.99, 0.95, 0.70},
  }};
  double scaled = t * (stops.size() - 1);
  size_t lo = std::min(stops.size() - 2, static_cast<size_t>(scaled));
  double frac = scaled - static_cast<double>(lo);
  std::string hex = "#";
  for (int c = 0; c < 3; ++c) {
    double v = stops[lo][static_cast<size_t>(c)] * (1 - frac) +
               stops[lo + 1][static_cast<size_t>(c)] * frac;
    hex += channel_hex(v);
  }
  return hex;
}

std::string cluster_color(int index) {
  static constexpr std::array<const char*, 10> palette = {
      "#4c78a8", "#f58518", "#e45756", "#72b7b2", "#54a24b",
      "#eeca3b", "#b279a2", "#ff9da6", "#9d755d", "#bab0ac",
  };
  if (index < 0) index = 0;
  return palette[static_cast<size_t>(index) % palette.size()];
}

}  // namespace eduspace
