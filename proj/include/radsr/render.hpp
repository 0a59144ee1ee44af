#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "radsr/image_io.hpp"

namespace radsr {

/// Jet colormap: t in [0, 1] (clamped) -> RGB, with
/// r = clamp(1.5 - |4t - 3|), g = clamp(1.5 - |4t - 2|), b = clamp(1.5 - |4t - 1|)
/// each scaled to 0..255 and rounded. Dark blue at 0, dark red at 1.
std::array<std::uint8_t, 3> jet(double t);

/// "velocity [m/s]" style label from an axis' kind and unit.
std::string axis_label(const Axis& a);

/// Draws `text` with the built-in 5x7 font, top-left corner at (x, y); each
/// font pixel becomes a `scale` x `scale` block. Letters are drawn upper case;
/// unknown characters draw as '?'. Clipped at the raster edges.
void draw_text(Rgb8& img, std::size_t x, std::size_t y, const std::string& text,
               std::array<std::uint8_t, 3> color = {0, 0, 0}, std::size_t scale = 1);
std::size_t text_width(const std::string& text, std::size_t scale = 1);

struct RenderOptions {
  std::size_t cell = 4;  // pixels per spectrum cell
  bool axes = true;      // false: the bare heatmap only
  std::string title;
};

struct Rendered {
  Rgb8 image;
  std::string x_label;  // axis0, drawn horizontally
  std::string y_label;  // axis1, drawn vertically (increasing upwards)
  std::size_t plot_x = 0, plot_y = 0, plot_w = 0, plot_h = 0;  // heatmap rectangle
};

/// Heatmap of a spectrum image: u16 value 0 -> jet(0), 65535 -> jet(1), i.e.
/// colours span the image's [db_floor, db_ceil]. Axis ticks at both ends and
/// the middle, labelled with physical values.
Rendered render_spectrum(const Image16& img, const RenderOptions& opt = {});

/// Side-by-side low-res / output / target panels sharing one layout.
Rgb8 render_triptych(const Image16& low, const Image16& output, const Image16& target, std::size_t cell = 4,
                     const std::array<std::string, 3>& titles = {"low-res", "output", "target"});

/// Reads a spectrum file (PNG + sidecar) and writes its rendering.
void render_file(const std::filesystem::path& in_png, const std::filesystem::path& out_png,
                 const RenderOptions& opt = {});

}  // namespace radsr
