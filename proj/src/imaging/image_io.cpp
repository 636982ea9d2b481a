/*
 * Copyright 2026 The cxrcl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cxrcl/imaging/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "cxrcl/error.hpp"

namespace cxrcl {
namespace {

bool is_png(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::equal(bytes.begin(), bytes.begin() + 8, kSignature);
}

std::uint8_t quantize(double p) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(p, 0.0, 1.0) * 255.0));
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
    fail(ErrorCode::kValidation, std::string("cannot decode PNG: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  image.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB)
                       : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);
  const std::size_t channels = PNG_IMAGE_PIXEL_CHANNELS(image.format);
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    std::string message = image.message;
    png_image_free(&image);
    fail(ErrorCode::kValidation, "cannot decode PNG: " + message);
  }
  const std::size_t w = image.width;
  const std::size_t h = image.height;
  const std::size_t color_channels = color ? 3 : 1;
  std::vector<double> pixels(w * h);
  for (std::size_t i = 0; i < w * h; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < color_channels; ++c) sum += buffer[i * channels + c];
    pixels[i] = sum / (255.0 * static_cast<double>(color_channels));
  }
  return Image(w, h, std::move(pixels));
}

// Minimal PGM reader: P2 (ASCII) and P5 (binary), maxval up to 65535.
class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  Image read() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || (bytes_[1] != '2' && bytes_[1] != '5')) {
      fail(ErrorCode::kValidation, "unsupported image format (expected PNG or PGM)");
    }
    const bool binary = bytes_[1] == '5';
    pos_ = 2;
    const std::size_t w = next_int();
    const std::size_t h = next_int();
    const std::size_t maxval = next_int();
    if (w == 0 || h == 0 || maxval == 0 || maxval > 65535) {
      fail(ErrorCode::kValidation, "malformed PGM header");
    }
    std::vector<double> pixels(w * h);
    if (binary) {
      ++pos_;  // single whitespace byte after maxval
      const std::size_t bpp = maxval < 256 ? 1 : 2;
      if (bytes_.size() < pos_ + w * h * bpp) fail(ErrorCode::kValidation, "truncated PGM");
      for (std::size_t i = 0; i < w * h; ++i) {
        std::size_t v = bytes_[pos_ + i * bpp];
        if (bpp == 2) v = (v << 8) | bytes_[pos_ + i * bpp + 1];
        pixels[i] = std::min(1.0, static_cast<double>(v) / static_cast<double>(maxval));
      }
    } else {
      for (std::size_t i = 0; i < w * h; ++i) {
        pixels[i] = std::min(1.0, static_cast<double>(next_int()) / static_cast<double>(maxval));
      }
    }
    return Image(w, h, std::move(pixels));
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      fail(ErrorCode::kValidation, "malformed PGM");
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 30)) fail(ErrorCode::kValidation, "malformed PGM");
      ++pos_;
    }
    return value;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kNotFound, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

Image decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  return PgmReader(bytes).read();
}

Image load_image(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  std::vector<std::uint8_t> gray(img.size());
  std::transform(img.pixels().begin(), img.pixels().end(), gray.begin(), quantize);

  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&image, nullptr, &size, 0, gray.data(), 0, nullptr) == 0) {
    fail(ErrorCode::kIo, std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (png_image_write_to_memory(&image, out.data(), &size, 0, gray.data(), 0, nullptr) == 0) {
    fail(ErrorCode::kIo, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> encode_pgm(const Image& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + img.size());
  for (double p : img.pixels()) out.push_back(quantize(p));
  return out;
}

void save_image(const Image& img, const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") {
    write_file_bytes(path, encode_png(img));
  } else if (ext == ".pgm") {
    write_file_bytes(path, encode_pgm(img));
  } else {
    fail(ErrorCode::kInvalidArgument, "unsupported image extension: " + ext);
  }
}

}  // namespace cxrcl
