#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radsr/spectral.hpp"

namespace radsr {

/// 8-bit RGB raster used for rendered figures.
struct Rgb8 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 3 bytes per pixel

  Rgb8() = default;
  Rgb8(std::size_t w, std::size_t h, std::uint8_t fill = 255) : width(w), height(h), pixels(w * h * 3, fill) {}

  void set(std::size_t x, std::size_t y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    auto* p = &pixels[(y * width + x) * 3];
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }
};

void write_png16(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                 const std::vector<std::uint16_t>& pixels);
std::vector<std::uint16_t> read_png16(const std::filesystem::path& path, std::size_t& rows,
                                      std::size_t& cols);
void write_png_rgb(const std::filesystem::path& path, const Rgb8& image);
Rgb8 read_png_rgb(const std::filesystem::path& path);

nlohmann::json axis_to_json(const Axis& a);
Axis axis_from_json(const nlohmann::json& j);
nlohmann::json image_sidecar(const Image16& img);

/// Spectrum file = `<stem>.png` (16-bit gray) + `<stem>.json` sidecar
/// {axes, db_floor, db_ceil, provenance}. `png_path` must end in .png.
void write_spectrum_image(const Image16& img, const std::filesystem::path& png_path);
Image16 read_spectrum_image(const std::filesystem::path& png_path);
std::filesystem::path sidecar_path(const std::filesystem::path& png_path);

std::string sha256_file(const std::filesystem::path& path);

}  // namespace radsr
