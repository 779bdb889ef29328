#include "tsdistill/plot_render.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "tsdistill/errors.hpp"

namespace tsdistill {
namespace {

// 5x7 glyphs, one byte per row, bit 4 = leftmost column.
struct Glyph {
  char ch;
  std::array<std::uint8_t, 7> rows;
};

constexpr std::array<Glyph, 14> kFont{{
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'e', {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
}};

constexpr int kGlyphScale = 2;
constexpr int kGlyphAdvance = 6 * kGlyphScale;
constexpr int kGlyphHeight = 7 * kGlyphScale;
constexpr int kTickLength = 6;

class Canvas {
 public:
  Canvas(int w, int h, Rgb bg) : w_(w), h_(h), pixels_(static_cast<std::size_t>(w) * h * 3) {
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
      pixels_[i] = bg[0];
      pixels_[i + 1] = bg[1];
      pixels_[i + 2] = bg[2];
    }
  }

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    const std::size_t i = (static_cast<std::size_t>(y) * w_ + x) * 3;
    pixels_[i] = c[0];
    pixels_[i + 1] = c[1];
    pixels_[i + 2] = c[2];
  }

  void fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) set(x, y, c);
  }

  // Bresenham with a square brush; brush pixels are clipped to `clip`.
  void line(int x0, int y0, int x1, int y1, int width, Rgb c, const PlotLayout& clip) {
    const int lo = -(width - 1) / 2;
    const int hi = width / 2;
    auto stamp = [&](int x, int y) {
      for (int dy = lo; dy <= hi; ++dy)
        for (int dx = lo; dx <= hi; ++dx) {
          const int px = x + dx;
          const int py = y + dy;
          if (px > clip.left && px <= clip.right && py >= clip.top && py < clip.bottom)
            set(px, py, c);
        }
    };
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      stamp(x0, y0);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void text(int x, int y, const std::string& s, Rgb c) {
    for (char ch : s) {
      const auto it = std::find_if(kFont.begin(), kFont.end(), [ch](const Glyph& g) { return g.ch == ch; });
      if (it != kFont.end()) {
        for (int row = 0; row < 7; ++row)
          for (int col = 0; col < 5; ++col)
            if (it->rows[row] & (0x10 >> col))
              fill_rect(x + col * kGlyphScale, y + row * kGlyphScale,
                        x + col * kGlyphScale + kGlyphScale - 1,
                        y + row * kGlyphScale + kGlyphScale - 1, c);
      }
      x += kGlyphAdvance;
    }
  }

  std::span<const std::uint8_t> row(int y) const {
    return {pixels_.data() + static_cast<std::size_t>(y) * w_ * 3, static_cast<std::size_t>(w_) * 3};
  }
  int width() const { return w_; }
  int height() const { return h_; }

 private:
  int w_;
  int h_;
  std::vector<std::uint8_t> pixels_;
};

int text_width(const std::string& s) { return static_cast<int>(s.size()) * kGlyphAdvance - kGlyphScale; }

std::string tick_label(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double nice_number(double x, bool round) {
  const double expv = std::floor(std::log10(x));
  const double f = x / std::pow(10.0, expv);
  double nf;
  if (round) {
    nf = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
  } else {
    nf = f <= 1.0 ? 1.0 : f <= 2.0 ? 2.0 : f <= 5.0 ? 5.0 : 10.0;
  }
  return nf * std::pow(10.0, expv);
}

// Ticks on "nice" values inside [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  const double span = nice_number(hi - lo, false);
  const double step = nice_number(span / (target - 1), true);
  std::vector<double> ticks;
  const double first = std::ceil(lo / step) * step;
  for (int k = 0;; ++k) {
    const double v = first + k * step;
    if (v > hi + step * 1e-9) break;
    // Snap values like 0.30000000000000004 before labelling.
    ticks.push_back(std::round(v / step) * step);
  }
  return ticks;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char (&type)[5], std::span<const std::uint8_t> data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> encode_png(const Canvas& canvas) {
  const int w = canvas.width();
  const int h = canvas.height();
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(h) * (w * 3 + 1));
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);  // filter: none
    const auto r = canvas.row(y);
    raw.insert(raw.end(), r.begin(), r.end());
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw DataError("render_plot: zlib compression failed");
  z.resize(zlen);

  std::vector<std::uint8_t> png{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(w));
  put_u32(ihdr, static_cast<std::uint32_t>(h));
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit RGB, deflate, adaptive, no interlace
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", z);
  put_chunk(png, "IEND", {});
  return png;
}

}  // namespace

void PlotConfig::validate() const {
  if (width < 200 || height < 150) throw ValidationError("plot: size must be at least 200x150");
  if (width > 8192 || height > 8192) throw ValidationError("plot: size must be at most 8192x8192");
  if (line_width < 1 || line_width > 16) throw ValidationError("plot: line_width must be in [1, 16]");
  if (!(y_padding >= 0.02) || !(x_padding >= 0.0))
    throw ValidationError("plot: y_padding must be >= 0.02 and x_padding >= 0");
}

int PlotLayout::to_px(double x_value) const {
  return left + static_cast<int>(std::lround((x_value - x.lo) / (x.hi - x.lo) * (right - left)));
}

int PlotLayout::to_py(double y_value) const {
  return top + static_cast<int>(std::lround((y.hi - y_value) / (y.hi - y.lo) * (bottom - top)));
}

PlotLayout compute_layout(std::span<const double> series, const PlotConfig& cfg) {
  cfg.validate();
  if (series.empty()) throw ValidationError("render_plot: empty series");
  for (double v : series)
    if (!std::isfinite(v)) throw DataError("render_plot: non-finite value in series");

  PlotLayout L;
  const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
  double ylo = *lo_it;
  double yhi = *hi_it;
  double yspan = yhi - ylo;
  if (yspan == 0.0) yspan = std::max(1.0, std::abs(ylo) * 0.1);
  L.y = {ylo - cfg.y_padding * yspan, yhi + cfg.y_padding * yspan};

  const double xmax = static_cast<double>(series.size() - 1);
  const double xspan = xmax > 0.0 ? xmax : 1.0;
  L.x = {-cfg.x_padding * xspan, xmax + cfg.x_padding * xspan};
  if (xmax == 0.0) L.x = {-1.0, 1.0};

  L.y_ticks = nice_ticks(L.y.lo, L.y.hi);
  L.x_ticks = nice_ticks(std::max(0.0, L.x.lo), L.x.hi);

  std::size_t widest = 0;
  for (double t : L.y_ticks) widest = std::max(widest, tick_label(t).size());
  L.left = std::max(cfg.width / 12, static_cast<int>(widest) * kGlyphAdvance + kTickLength + 12);
  L.right = cfg.width - 20;
  L.top = 20;
  L.bottom = cfg.height - (kGlyphHeight + kTickLength + 16);
  return L;
}

std::vector<std::uint8_t> render_plot_png(std::span<const double> series, const PlotConfig& cfg) {
  const PlotLayout L = compute_layout(series, cfg);
  Canvas canvas(cfg.width, cfg.height, cfg.background);

  // Axes.
  canvas.fill_rect(L.left, L.top, L.left, L.bottom, cfg.axis_color);
  canvas.fill_rect(L.left, L.bottom, L.right, L.bottom, cfg.axis_color);

  for (double t : L.y_ticks) {
    const int py = L.to_py(t);
    canvas.fill_rect(L.left - kTickLength, py, L.left - 1, py, cfg.axis_color);
    const std::string label = tick_label(t);
    canvas.text(L.left - kTickLength - 4 - text_width(label), py - kGlyphHeight / 2, label,
                cfg.axis_color);
  }
  for (double t : L.x_ticks) {
    const int px = L.to_px(t);
    canvas.fill_rect(px, L.bottom + 1, px, L.bottom + kTickLength, cfg.axis_color);
    const std::string label = tick_label(t);
    canvas.text(px - text_width(label) / 2, L.bottom + kTickLength + 6, label, cfg.axis_color);
  }

  int prev_x = L.to_px(0.0);
  int prev_y = L.to_py(series[0]);
  if (series.size() == 1) canvas.line(prev_x, prev_y, prev_x, prev_y, cfg.line_width, cfg.line_color, L);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const int x = L.to_px(static_cast<double>(i));
    const int y = L.to_py(series[i]);
    canvas.line(prev_x, prev_y, x, y, cfg.line_width, cfg.line_color, L);
    prev_x = x;
    prev_y = y;
  }
  return encode_png(canvas);
}

void render_plot(std::span<const double> series, const std::filesystem::path& path,
                 const PlotConfig& cfg) {
  const auto png = render_plot_png(series, cfg);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("render_plot: cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
  if (!out) throw FileError("render_plot: write failed for " + path.string());
}

}  // namespace tsdistill
