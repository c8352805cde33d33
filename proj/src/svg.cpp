#include "odefilter/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace odefilter {
namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string LogLogChart::render(int width, int height) const {
  const double left = 80.0;
  const double right = 200.0;
  const double top = 40.0;
  const double bottom = 60.0;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const ChartSeries& s : series) {
    for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
      if (s.x[k] > 0.0 && s.y[k] > 0.0 && std::isfinite(s.x[k]) && std::isfinite(s.y[k])) {
        xmin = std::min(xmin, std::log10(s.x[k]));
        xmax = std::max(xmax, std::log10(s.x[k]));
        ymin = std::min(ymin, std::log10(s.y[k]));
        ymax = std::max(ymax, std::log10(s.y[k]));
      }
    }
  }
  const bool empty = !std::isfinite(xmin);
  if (empty) {
    xmin = ymin = 0.0;
    xmax = ymax = 1.0;
  }
  xmin = std::floor(xmin);
  xmax = std::max(std::ceil(xmax), xmin + 1.0);
  ymin = std::floor(ymin);
  ymax = std::max(std::ceil(ymax), ymin + 1.0);

  auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double ly) { return top + (ymax - ly) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
  os << "<defs><clipPath id=\"plot\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw
     << "\" height=\"" << ph << "\"/></clipPath></defs>\n";

  for (double d = xmin; d <= xmax + 1e-9; d += 1.0) {
    os << "<line x1=\"" << num(px(d)) << "\" y1=\"" << top << "\" x2=\"" << num(px(d))
       << "\" y2=\"" << top + ph << "\" stroke=\"#eee\"/>\n";
    os << "<text x=\"" << num(px(d)) << "\" y=\"" << top + ph + 18
       << "\" text-anchor=\"middle\">1e" << static_cast<int>(d) << "</text>\n";
  }
  for (double d = ymin; d <= ymax + 1e-9; d += 1.0) {
    os << "<line x1=\"" << left << "\" y1=\"" << num(py(d)) << "\" x2=\"" << left + pw
       << "\" y2=\"" << num(py(d)) << "\" stroke=\"#eee\"/>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << num(py(d) + 4)
       << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
  }
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 15
     << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text transform=\"translate(20," << top + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";

  if (!empty && !series.empty() && !series.front().x.empty()) {
    const ChartSeries& first = series.front();
    std::size_t k = 0;
    while (k < first.x.size() && !(first.x[k] > 0.0 && first.y[k] > 0.0)) {
      ++k;
    }
    if (k < first.x.size()) {
      const double ax = std::log10(first.x[k]);
      const double ay = std::log10(first.y[k]);
      for (int order : guide_orders) {
        const double y1 = ay - order * (xmax - ax);
        os << "<line x1=\"" << num(px(ax)) << "\" y1=\"" << num(py(ay)) << "\" x2=\""
           << num(px(xmax)) << "\" y2=\"" << num(py(y1))
           << "\" stroke=\"gray\" stroke-dasharray=\"2,4\" clip-path=\"url(#plot)\"/>\n";
        os << "<text x=\"" << num(px(xmax) + 4) << "\" y=\""
           << num(std::clamp(py(y1), top, top + ph)) << "\" fill=\"gray\">h^" << order
           << "</text>\n";
      }
    }
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const ChartSeries& cs = series[s];
    const char* colour = kPalette[s % kPalette.size()];
    std::ostringstream pts;
    for (std::size_t k = 0; k < std::min(cs.x.size(), cs.y.size()); ++k) {
      if (cs.x[k] > 0.0 && cs.y[k] > 0.0 && std::isfinite(cs.x[k]) && std::isfinite(cs.y[k])) {
        pts << num(px(std::log10(cs.x[k]))) << ',' << num(py(std::log10(cs.y[k]))) << ' ';
      }
    }
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\""
       << (cs.dashed ? " stroke-dasharray=\"6,3\"" : "") << " points=\"" << pts.str()
       << "\" clip-path=\"url(#plot)\"/>\n";
    const double ly = top + 14.0 * static_cast<double>(s) + 8.0;
    os << "<line x1=\"" << left + pw + 30 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 50
       << "\" y2=\"" << ly << "\" stroke=\"" << colour << "\""
       << (cs.dashed ? " stroke-dasharray=\"6,3\"" : "") << "/>\n";
    os << "<text x=\"" << left + pw + 55 << "\" y=\"" << ly + 4 << "\" font-size=\"10\">"
       << escape(cs.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace odefilter
