#pragma once

#include <sstream>
#include <string>

namespace eduspace {

/// Minimal SVG document builder; every coordinate is printed with fixed
/// precision so output bytes are stable.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "", double stroke_width = 0);
  void circle(double cx, double cy, double r, const std::string& fill, double opacity = 1.0);
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0);
  // anchor: start | middle | end
  void text(double x, double y, const std::string& content, double size = 12,
            const std::string& anchor = "start", const std::string& fill = "#222222");

  std::string str() const;
  void save(const std::string& path) const;  // throws Error{IoError}

 private:
  double width_;
  double height_;
  std::ostringstream body_;
};

/// Perceptually ordered dark-to-bright map for density grids, t in [0,1].
std::string heat_color(double t);

/// Categorical palette keyed by cluster index.
std::string cluster_color(int index);

std::string svg_escape(const std::string& text);

}  // namespace eduspace
