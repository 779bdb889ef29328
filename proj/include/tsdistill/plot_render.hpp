#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tsdistill {

using Rgb = std::array<std::uint8_t, 3>;

struct PlotConfig {
  int width = 800;
  int height = 600;
  int line_width = 2;
  Rgb line_color{31, 119, 180};
  Rgb axis_color{0, 0, 0};
  Rgb background{255, 255, 255};
  /// Vertical padding as a fraction of the data range, per side.
  double y_padding = 0.05;
  /// Horizontal padding as a fraction of the index range, per side.
  double x_padding = 0.02;

  void validate() const;
};

struct AxisRange {
  double lo = 0.0;
  double hi = 1.0;
};

/// Pixel geometry and data ranges for one rendered series.
struct PlotLayout {
  AxisRange x;
  AxisRange y;
  int left = 0;    ///< pixel column of the y axis
  int top = 0;
  int right = 0;   ///< last pixel column of the plot area
  int bottom = 0;  ///< pixel row of the x axis
  std::vector<double> x_ticks;
  std::vector<double> y_ticks;

  int to_px(double x_value) const;
  int to_py(double y_value) const;
};

PlotLayout compute_layout(std::span<const double> series, const PlotConfig& cfg = {});

/// Renders a single-series line plot with numeric tick labels, no legend or
/// title, and returns the encoded PNG. Deterministic per input and config.
std::vector<std::uint8_t> render_plot_png(std::span<const double> series,
                                          const PlotConfig& cfg = {});

/// render_plot_png written to `path`. Throws FileError on I/O failure.
void render_plot(std::span<const double> series, const std::filesystem::path& path,
                 const PlotConfig& cfg = {});

}  // namespace tsdistill
