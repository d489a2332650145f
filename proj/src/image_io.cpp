/*
 * Copyright 2026 The orbitpool Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "orbitpool/image.hpp"

namespace orbitpool {

namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

std::string read_bytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(ErrorCode::NotFound, "not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Netpbm header tokenizer that skips '#' comments.
class PnmReader {
 public:
  explicit PnmReader(const std::string& bytes) : bytes_(bytes) {}

  long next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
      throw Error(ErrorCode::UnsupportedFormat, "malformed netpbm header");
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1L << 28))
        throw Error(ErrorCode::UnsupportedFormat, "netpbm value too large");
    }
    return value;
  }
  // Exactly one whitespace byte separates the header from raster data.
  std::size_t raster_start() const { return pos_ + 1; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 2;
};

Image decode_pnm(const std::string& bytes) {
  const char kind = bytes[1];
  PnmReader r(bytes);
  const long w = r.next_int(), h = r.next_int(), maxval = r.next_int();
  if (w < 1 || h < 1)
    throw Error(ErrorCode::UnsupportedFormat, "netpbm image has zero size");
  if (maxval < 1 || maxval > 255)
    throw Error(ErrorCode::UnsupportedFormat, "only 8-bit netpbm is supported");
  const auto n = static_cast<std::size_t>(w) * h;
  std::vector<double> values(n);
  const double scale = 1.0 / static_cast<double>(maxval);

  if (kind == '2') {
    for (std::size_t i = 0; i < n; ++i) values[i] = std::min(r.next_int(), maxval) * scale;
  } else {
    const std::size_t channels = kind == '6' ? 3 : 1;
    const std::size_t start = r.raster_start();
    if (bytes.size() < start + n * channels)
      throw Error(ErrorCode::UnsupportedFormat, "truncated netpbm raster");
    const auto* px = reinterpret_cast<const unsigned char*>(bytes.data() + start);
    for (std::size_t i = 0; i < n; ++i) {
      if (channels == 1) {
        values[i] = std::min<long>(px[i], maxval) * scale;
      } else {
        const unsigned char* p = px + 3 * i;
        values[i] = (kLumaR * p[0] + kLumaG * p[1] + kLumaB * p[2]) * scale;
      }
    }
  }
  for (double& x : values) x = std::clamp(x, 0.0, 1.0);
  return Image(static_cast<int>(w), static_cast<int>(h), std::move(values));
}

Image decode_png(const std::string& bytes) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()))
    throw Error(ErrorCode::UnsupportedFormat,
                std::string("unreadable PNG: ") + png.message);
  if (png.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&png);
    throw Error(ErrorCode::UnsupportedFormat, "only 8-bit PNG is supported");
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<unsigned char> raster(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, raster.data(), 0, nullptr)) {
    png_image_free(&png);
    throw Error(ErrorCode::UnsupportedFormat,
                std::string("corrupt PNG: ") + png.message);
  }
  const int w = static_cast<int>(png.width), h = static_cast<int>(png.height);
  std::vector<double> values(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (color) {
      const unsigned char* p = raster.data() + 3 * i;
      values[i] = (kLumaR * p[0] + kLumaG * p[1] + kLumaB * p[2]) / 255.0;
    } else {
      values[i] = raster[i] / 255.0;
    }
    values[i] = std::clamp(values[i], 0.0, 1.0);
  }
  return Image(w, h, std::move(values));
}

void write_p5(const std::filesystem::path& path, int w, int h,
              const std::vector<unsigned char>& raster) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "P5\n" << w << ' ' << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  const std::string bytes = read_bytes(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '5' || bytes[1] == '2' || bytes[1] == '6'))
    return decode_pnm(bytes);
  if (bytes.size() >= 8 &&
      png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0)
    return decode_png(bytes);
  throw Error(ErrorCode::UnsupportedFormat,
              "unsupported image format: " + path.string());
}

void write_pgm(const Image& img, const std::filesystem::path& path) {
  std::vector<unsigned char> raster(img.size());
  const auto values = img.values();
  for (std::size_t i = 0; i < raster.size(); ++i)
    raster[i] = static_cast<unsigned char>(
        std::lround(std::clamp(values[i], 0.0, 1.0) * 255.0));
  write_p5(path, img.width(), img.height(), raster);
}

void write_pgm(const Mask& mask, const std::filesystem::path& path) {
  std::vector<unsigned char> raster(static_cast<std::size_t>(mask.width()) *
                                    mask.height());
  for (int v = 0; v < mask.height(); ++v)
    for (int u = 0; u < mask.width(); ++u)
      raster[static_cast<std::size_t>(v) * mask.width() + u] = mask(u, v) ? 255 : 0;
  write_p5(path, mask.width(), mask.height(), raster);
}

Mask load_mask(const std::filesystem::path& path) {
  const Image img = load_image(path);
  Mask m(img.width(), img.height(), false);
  for (int v = 0; v < img.height(); ++v)
    for (int u = 0; u < img.width(); ++u) m.set(u, v, img(u, v) >= 0.5);
  return m;
}

}  // namespace orbitpool
