// Copyright 2026 The wedgekit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wedgekit/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "wedgekit/errors.hpp"

namespace wedge {

namespace {

struct PngReadCtx {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void mem_read(png_structp png, png_bytep out, png_size_t len) {
  auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
  if (ctx->pos + len > ctx->size) {
    png_error(png, "read past end of buffer");
  }
  std::memcpy(out, ctx->data + ctx->pos, len);
  ctx->pos += len;
}

struct DecodedPng {
  int height = 0, width = 0, channels = 0;
  std::vector<std::uint8_t> pixels;  // row-major interleaved
};

DecodedPng decode(const std::uint8_t* bytes, std::size_t size,
                  bool want_gray) {
  if (size < 8 || png_sig_cmp(bytes, 0, 8) != 0) {
    throw IoError("png: not a PNG stream");
  }
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: failed to create read struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png: failed to create info struct");
  }
  DecodedPng out;
  std::vector<png_bytep> row_ptrs;
  PngReadCtx ctx{bytes, size, 0};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("png: decode failed");
  }
  png_set_read_fn(png, &ctx, mem_read);
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_packing(png);
  png_set_strip_alpha(png);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (want_gray) {
    if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(png, 1, -1, -1);
  } else {
    if (!(color & PNG_COLOR_MASK_COLOR)) png_set_gray_to_rgb(png);
  }
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = static_cast<int>(png_get_channels(png, info));
  out.pixels.resize(static_cast<std::size_t>(out.height) * out.width *
                    out.channels);
  row_ptrs.resize(out.height);
  const std::size_t stride =
      static_cast<std::size_t>(out.width) * out.channels;
  for (int r = 0; r < out.height; ++r) {
    row_ptrs[r] = out.pixels.data() + r * stride;
  }
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(
      std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!f) throw IoError("cannot open " + path);
  std::fseek(f.get(), 0, SEEK_END);
  const long len = std::ftell(f.get());
  std::fseek(f.get(), 0, SEEK_SET);
  std::vector<std::uint8_t> bytes(len > 0 ? static_cast<std::size_t>(len) : 0);
  if (!bytes.empty() &&
      std::fread(bytes.data(), 1, bytes.size(), f.get()) != bytes.size()) {
    throw IoError("short read on " + path);
  }
  return bytes;
}

void encode(const std::string& path, const std::uint8_t* pixels, int height,
            int width, int channels) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(
      std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!f) throw IoError("cannot open " + path + " for writing");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: failed to create write struct");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png: failed to create info struct");
  }
  std::vector<png_bytep> row_ptrs(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: encode failed for " + path);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, width, height, 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int r = 0; r < height; ++r) {
    row_ptrs[r] = const_cast<png_bytep>(pixels + r * stride);
  }
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

FeatureMap decode_image_png(const std::vector<std::uint8_t>& bytes) {
  DecodedPng d = decode(bytes.data(), bytes.size(), /*want_gray=*/false);
  std::vector<float> data(d.pixels.size());
  for (std::size_t i = 0; i < d.pixels.size(); ++i) {
    data[i] = static_cast<float>(d.pixels[i]) / 255.0f;
  }
  return FeatureMap(d.height, d.width, d.channels, std::move(data));
}

FeatureMap read_image_png(const std::string& path) {
  try {
    return decode_image_png(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_image_png(const std::string& path, const FeatureMap& image) {
  if (image.channels() != 3) {
    throw ShapeError("write_image_png: expected 3 channels");
  }
  std::vector<std::uint8_t> pixels(image.size());
  const auto& data = image.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const float v = std::clamp(data[i], 0.0f, 1.0f);
    pixels[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
  }
  encode(path, pixels.data(), image.height(), image.width(), 3);
}

LabelMap read_label_png(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  DecodedPng d = decode(bytes.data(), bytes.size(), /*want_gray=*/true);
  return LabelMap(d.height, d.width, std::move(d.pixels));
}

void write_label_png(const std::string& path, const LabelMap& labels) {
  encode(path, labels.entries().data(), labels.height(), labels.width(), 1);
}

}  // namespace wedge
