#pragma once

#include <string>
#include <vector>

namespace odefilter {

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Minimal log-log line chart. Non-positive points are skipped.
struct LogLogChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
  /// Reference lines y ~ x^(-k), anchored at the first plotted point.
  std::vector<int> guide_orders;

  [[nodiscard]] std::string render(int width = 720, int height = 480) const;
};

}  // namespace odefilter
