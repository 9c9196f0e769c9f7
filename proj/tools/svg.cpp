#include "svg.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "torus/io.hpp"

namespace torus::cli {
namespace {

constexpr double kCanvas = 480.0;
constexpr double kMargin = 40.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const Configuration& config, const Configuration* reference, const std::string& title) {
  std::ostringstream s;
  const Cell& cell = config.cell();
  double width = kCanvas, height = kCanvas;
  double scale = 0.0;
  if (cell.dim() == 2) {
    scale = (kCanvas - 2 * kMargin) / std::max(cell.period(0), cell.period(1));
    width = 2 * kMargin + scale * cell.period(0);
    height = 2 * kMargin + scale * cell.period(1);
  }
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    s << "<text x=\"" << kMargin << "\" y=\"" << kMargin / 2 << "\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(title) << "</text>\n";
  }
  const double r = 4.0;
  if (cell.dim() == 2) {
    // y grows upwards.
    auto px = [&](double x) { return kMargin + scale * x; };
    auto py = [&](double y) { return height - kMargin - scale * y; };
    s << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << scale * cell.period(0)
      << "\" height=\"" << scale * cell.period(1) << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (reference) {
      for (std::size_t k = 0; k < reference->size(); ++k) {
        s << "<circle cx=\"" << format_double(px(reference->coord(k, 0))) << "\" cy=\""
          << format_double(py(reference->coord(k, 1))) << "\" r=\"" << r + 2
          << "\" fill=\"none\" stroke=\"#d62728\"/>\n";
      }
    }
    for (std::size_t k = 0; k < config.size(); ++k) {
      s << "<circle cx=\"" << format_double(px(config.coord(k, 0))) << "\" cy=\""
        << format_double(py(config.coord(k, 1))) << "\" r=\"" << r << "\" fill=\"#1f77b4\"/>\n";
    }
  } else {
    const double cx = width / 2, cy = height / 2, R = kCanvas / 2 - kMargin;
    s << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << R << "\" fill=\"none\" stroke=\"black\"/>\n";
    auto at = [&](double x, double radius, const char* attrs) {
      const double angle = 2 * std::numbers::pi * x / cell.period(0);
      s << "<circle cx=\"" << format_double(cx + R * std::cos(angle)) << "\" cy=\""
        << format_double(cy - R * std::sin(angle)) << "\" r=\"" << radius << "\" " << attrs << "/>\n";
    };
    if (reference) {
      for (std::size_t k = 0; k < reference->size(); ++k) {
        at(reference->coord(k, 0), r + 2, "fill=\"none\" stroke=\"#d62728\"");
      }
    }
    for (std::size_t k = 0; k < config.size(); ++k) at(config.coord(k, 0), r, "fill=\"#1f77b4\"");
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace torus::cli
