#include "radsr/render.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace radsr {

namespace {

using Glyph = std::array<std::uint8_t, 7>;  // rows top to bottom, bit 4 = leftmost column

struct GlyphEntry {
  char ch;
  Glyph rows;
};

constexpr GlyphEntry kFont[] = {
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}}, {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}}, {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}}, {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}}, {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}}, {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}}, {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}}, {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}}, {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}}, {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}}, {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}}, {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}}, {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}}, {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}}, {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}}, {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}}, {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}}, {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}}, {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}}, {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}}, {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'/', {0x00, 0x01, 0x02, 0x04, 0x08, 0x10, 0x00}}, {'[', {0x0E, 0x08, 0x08, 0x08, 0x08, 0x08, 0x0E}},
    {']', {0x0E, 0x02, 0x02, 0x02, 0x02, 0x02, 0x0E}}, {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}}, {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}}, {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}},
    {'?', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x00, 0x04}},
};

const Glyph& glyph(char c) {
  const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& g : kFont)
    if (g.ch == u) return g.rows;
  return kFont[std::size(kFont) - 1].rows;
}

constexpr std::size_t kGlyphW = 5, kGlyphH = 7, kAdvance = 6;
constexpr std::array<std::uint8_t, 3> kInk{0, 0, 0};

std::string tick_text(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void fill_rect(Rgb8& img, std::size_t x, std::size_t y, std::size_t w, std::size_t h, std::array<std::uint8_t, 3> c) {
  for (std::size_t yy = y; yy < std::min(y + h, img.height); ++yy)
    for (std::size_t xx = x; xx < std::min(x + w, img.width); ++xx) img.set(xx, yy, c[0], c[1], c[2]);
}

// Margins around the heatmap, in pixels.
constexpr std::size_t kLeft = 52, kRight = 20, kTop = 16, kBottom = 30, kTick = 3;

void blit(Rgb8& dst, const Rgb8& src, std::size_t x0) {
  for (std::size_t y = 0; y < src.height; ++y)
    std::copy_n(&src.pixels[y * src.width * 3], src.width * 3, &dst.pixels[(y * dst.width + x0) * 3]);
}

}  // namespace

std::array<std::uint8_t, 3> jet(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const auto ch = [t](double centre) {
    const double v = std::clamp(1.5 - std::abs(4.0 * t - centre), 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(255.0 * v));
  };
  return {ch(3.0), ch(2.0), ch(1.0)};
}

std::string axis_label(const Axis& a) {
  std::string s = to_string(a.kind);
  if (!a.unit.empty()) s += " [" + a.unit + "]";
  return s;
}

std::size_t text_width(const std::string& text, std::size_t scale) {
  return text.empty() ? 0 : (text.size() * kAdvance - 1) * scale;
}

void draw_text(Rgb8& img, std::size_t x, std::size_t y, const std::string& text, std::array<std::uint8_t, 3> color,
               std::size_t scale) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto& g = glyph(text[i]);
    const std::size_t gx = x + i * kAdvance * scale;
    for (std::size_t r = 0; r < kGlyphH; ++r)
      for (std::size_t c = 0; c < kGlyphW; ++c)
        if (g[r] & (0x10 >> c)) fill_rect(img, gx + c * scale, y + r * scale, scale, scale, color);
  }
}

Rendered render_spectrum(const Image16& img, const RenderOptions& opt) {
  if (img.rows == 0 || img.cols == 0 || img.pixels.size() != img.rows * img.cols)
    throw std::invalid_argument("cannot render an empty or inconsistent image " + shape_str(img.rows, img.cols));
  if (opt.cell == 0) throw std::invalid_argument("render cell size must be positive");
  Rendered out;
  out.x_label = axis_label(img.axis0);
  out.y_label = axis_label(img.axis1);
  out.plot_w = img.rows * opt.cell;
  out.plot_h = img.cols * opt.cell;
  out.plot_x = opt.axes ? kLeft : 0;
  out.plot_y = opt.axes ? kTop : 0;
  out.image = Rgb8(out.plot_w + (opt.axes ? kLeft + kRight : 0), out.plot_h + (opt.axes ? kTop + kBottom : 0));
  Rgb8& im = out.image;

  for (std::size_t r = 0; r < img.rows; ++r)
    for (std::size_t c = 0; c < img.cols; ++c) {
      const auto rgb = jet(img(r, c) / 65535.0);
      // axis1 increases upwards
      fill_rect(im, out.plot_x + r * opt.cell, out.plot_y + (img.cols - 1 - c) * opt.cell, opt.cell, opt.cell, rgb);
    }
  if (!opt.axes) return out;

  const std::size_t x0 = out.plot_x, y0 = out.plot_y, w = out.plot_w, h = out.plot_h;
  fill_rect(im, x0 - 1, y0 - 1, w + 2, 1, kInk);
  fill_rect(im, x0 - 1, y0 + h, w + 2, 1, kInk);
  fill_rect(im, x0 - 1, y0 - 1, 1, h + 2, kInk);
  fill_rect(im, x0 + w, y0 - 1, 1, h + 2, kInk);

  const std::size_t mid_r = img.rows / 2, mid_c = img.cols / 2;
  for (std::size_t r : {std::size_t{0}, mid_r, img.rows - 1}) {
    const std::size_t px = x0 + r * opt.cell + opt.cell / 2;
    fill_rect(im, px, y0 + h + 1, 1, kTick, kInk);
    const auto t = tick_text(img.axis0.at(r));
    const std::size_t tw = text_width(t);
    draw_text(im, px > tw / 2 ? px - tw / 2 : 0, y0 + h + kTick + 2, t);
  }
  for (std::size_t c : {std::size_t{0}, mid_c, img.cols - 1}) {
    const std::size_t py = y0 + (img.cols - 1 - c) * opt.cell + opt.cell / 2;
    fill_rect(im, x0 - 1 - kTick, py, kTick, 1, kInk);
    const auto t = tick_text(img.axis1.at(c));
    const std::size_t tw = text_width(t);
    draw_text(im, x0 > tw + kTick + 3 ? x0 - tw - kTick - 3 : 0, py > 3 ? py - 3 : 0, t);
  }
  const std::size_t xw = text_width(out.x_label);
  draw_text(im, x0 + (w > xw ? (w - xw) / 2 : 0), y0 + h + kTick + 12, out.x_label);
  // the vertical label goes in the top-left corner, above the tick values
  draw_text(im, 1, 2, out.y_label);
  if (!opt.title.empty()) {
    const std::size_t tw = text_width(opt.title);
    draw_text(im, std::max(x0 + (w > tw ? (w - tw) : 0), text_width(out.y_label) + 8), 4, opt.title);
  }
  return out;
}

Rgb8 render_triptych(const Image16& low, const Image16& output, const Image16& target, std::size_t cell,
                     const std::array<std::string, 3>& titles) {
  const Image16* panels[3] = {&low, &output, &target};
  std::array<Rgb8, 3> parts;
  // panels share a pixel footprint: smaller inputs get proportionally bigger cells
  std::size_t rows = 0, cols = 0;
  for (const auto* p : panels) {
    rows = std::max(rows, p->rows);
    cols = std::max(cols, p->cols);
  }
  for (int i = 0; i < 3; ++i) {
    const auto* p = panels[i];
    if (p->rows == 0 || p->cols == 0) throw std::invalid_argument("triptych panel " + titles[i] + " is empty");
    if ((rows * cell) % p->rows || (cols * cell) % p->cols || (rows * cell) / p->rows != (cols * cell) / p->cols)
      throw std::invalid_argument("triptych panel " + titles[i] + " " + shape_str(p->rows, p->cols) +
                                  " does not scale onto " + shape_str(rows, cols));
    parts[i] = render_spectrum(*p, {(rows * cell) / p->rows, true, titles[i]}).image;
  }
  const std::size_t gap = 8;
  Rgb8 out(parts[0].width * 3 + gap * 2, parts[0].height);
  for (int i = 0; i < 3; ++i) blit(out, parts[i], static_cast<std::size_t>(i) * (parts[0].width + gap));
  return out;
}

void render_file(const std::filesystem::path& in_png, const std::filesystem::path& out_png, const RenderOptions& opt) {
  write_png_rgb(out_png, render_spectrum(read_spectrum_image(in_png), opt).image);
}

}  // namespace radsr
