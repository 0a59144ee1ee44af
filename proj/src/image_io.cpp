#include "radsr/image_io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>
#include <png.h>

namespace radsr {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return f;
}

[[noreturn]] void png_fail(const std::filesystem::path& path, const char* what) {
  throw std::runtime_error("PNG " + std::string(what) + ": " + path.string());
}

// libpng reports errors by longjmp back to the setjmp in the same frame.
void write_png(const std::filesystem::path& path, std::size_t width, std::size_t height, int bit_depth,
               int color_type, const std::vector<std::uint8_t>& rows_be) {
  auto f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) png_fail(path, "write init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    png_fail(path, "write init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    png_fail(path, "write failed");
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t stride = width * static_cast<std::size_t>(channels) * (bit_depth / 8);
  for (std::size_t y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(rows_be.data() + y * stride));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct PngData {
  std::size_t width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  std::vector<std::uint8_t> bytes;
};

PngData read_png(const std::filesystem::path& path) {
  auto f = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) png_fail(path, "bad signature");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) png_fail(path, "read init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    png_fail(path, "read init failed");
  }
  PngData d;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    png_fail(path, "read failed");
  }
  png_init_io(png, f.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  d.width = png_get_image_width(png, info);
  d.height = png_get_image_height(png, info);
  d.bit_depth = png_get_bit_depth(png, info);
  d.color_type = png_get_color_type(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  d.bytes.resize(stride * d.height);
  for (std::size_t y = 0; y < d.height; ++y) png_read_row(png, d.bytes.data() + y * stride, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return d;
}

}  // namespace

void write_png16(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                 const std::vector<std::uint16_t>& pixels) {
  if (pixels.size() != rows * cols) throw std::invalid_argument("pixel count does not match " + shape_str(rows, cols));
  std::vector<std::uint8_t> be(pixels.size() * 2);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    be[2 * i] = static_cast<std::uint8_t>(pixels[i] >> 8);
    be[2 * i + 1] = static_cast<std::uint8_t>(pixels[i] & 0xff);
  }
  write_png(path, cols, rows, 16, PNG_COLOR_TYPE_GRAY, be);
}

std::vector<std::uint16_t> read_png16(const std::filesystem::path& path, std::size_t& rows, std::size_t& cols) {
  const auto d = read_png(path);
  if (d.bit_depth != 16 || d.color_type != PNG_COLOR_TYPE_GRAY)
    throw std::runtime_error("expected a 16-bit grayscale PNG: " + path.string());
  rows = d.height;
  cols = d.width;
  std::vector<std::uint16_t> px(rows * cols);
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = static_cast<std::uint16_t>((d.bytes[2 * i] << 8) | d.bytes[2 * i + 1]);
  return px;
}

void write_png_rgb(const std::filesystem::path& path, const Rgb8& image) {
  if (image.pixels.size() != image.width * image.height * 3) throw std::invalid_argument("RGB buffer size mismatch");
  write_png(path, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, image.pixels);
}

Rgb8 read_png_rgb(const std::filesystem::path& path) {
  const auto d = read_png(path);
  if (d.bit_depth != 8 || d.color_type != PNG_COLOR_TYPE_RGB)
    throw std::runtime_error("expected an 8-bit RGB PNG: " + path.string());
  Rgb8 img;
  img.width = d.width;
  img.height = d.height;
  img.pixels = d.bytes;
  return img;
}

nlohmann::json axis_to_json(const Axis& a) {
  return {{"kind", to_string(a.kind)}, {"start", a.start}, {"step", a.step}, {"unit", a.unit}};
}

Axis axis_from_json(const nlohmann::json& j) {
  Axis a;
  a.kind = axis_kind_from_string(j.at("kind").get<std::string>());
  a.start = j.at("start").get<double>();
  a.step = j.at("step").get<double>();
  a.unit = j.at("unit").get<std::string>();
  return a;
}

nlohmann::json image_sidecar(const Image16& img) {
  return {{"axes", nlohmann::json::array({axis_to_json(img.axis0), axis_to_json(img.axis1)})},
          {"db_floor", img.db_floor},
          {"db_ceil", img.db_ceil},
          {"rows", img.rows},
          {"cols", img.cols},
          {"provenance", img.provenance}};
}

std::filesystem::path sidecar_path(const std::filesystem::path& png_path) {
  auto p = png_path;
  p.replace_extension(".json");
  return p;
}

void write_spectrum_image(const Image16& img, const std::filesystem::path& png_path) {
  write_png16(png_path, img.rows, img.cols, img.pixels);
  std::ofstream js(sidecar_path(png_path));
  if (!js) throw std::runtime_error("cannot write " + sidecar_path(png_path).string());
  js << image_sidecar(img).dump(2) << "\n";
}

Image16 read_spectrum_image(const std::filesystem::path& png_path) {
  Image16 img;
  img.pixels = read_png16(png_path, img.rows, img.cols);
  const auto sc = sidecar_path(png_path);
  std::ifstream js(sc);
  if (!js) throw std::runtime_error("missing sidecar " + sc.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(js);
    const auto& axes = j.at("axes");
    if (!axes.is_array() || axes.size() != 2) throw std::runtime_error("axes must hold two entries");
    img.axis0 = axis_from_json(axes[0]);
    img.axis1 = axis_from_json(axes[1]);
    img.db_floor = j.at("db_floor").get<double>();
    img.db_ceil = j.at("db_ceil").get<double>();
    img.provenance = j.value("provenance", "");
  } catch (const std::exception& e) {
    throw std::runtime_error("malformed sidecar " + sc.string() + ": " + e.what());
  }
  if (!(img.db_floor < img.db_ceil)) throw std::runtime_error("malformed sidecar " + sc.string() + ": floor >= ceil");
  return img;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

}  // namespace radsr
