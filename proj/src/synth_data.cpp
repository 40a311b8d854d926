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

#include "wedgekit/synth_data.hpp"

#include <algorithm>
#include <cmath>

#include "wedgekit/errors.hpp"
#include "wedgekit/rng.hpp"

namespace wedge {

namespace {

struct Canvas {
  int height, width;
  std::vector<float> rgb;         // H*W*3
  std::vector<std::uint8_t> label;

  void paint(int row, int col, const std::array<float, 3>& color,
             std::uint8_t cls) {
    if (row < 0 || row >= height || col < 0 || col >= width) return;
    const std::size_t p = (static_cast<std::size_t>(row) * width + col);
    for (int c = 0; c < 3; ++c) rgb[p * 3 + c] = color[c];
    label[p] = cls;
  }
};

std::array<float, 3> jitter_color(const std::array<float, 3>& base,
                                  float amount, Rng& rng) {
  std::array<float, 3> out;
  for (int c = 0; c < 3; ++c) {
    out[c] = std::clamp(base[c] + amount * static_cast<float>(rng.normal()),
                        0.0f, 1.0f);
  }
  return out;
}

void draw_shape(Canvas& canvas, int kind, int cy, int cx, int size_a,
                int size_b, const std::array<float, 3>& color,
                std::uint8_t cls, bool stripes_vertical) {
  const int ha = size_a / 2, hb = size_b / 2;
  switch (kind) {
    case 0: {  // rectangle
      for (int dy = -ha; dy <= ha; ++dy)
        for (int dx = -hb; dx <= hb; ++dx)
          canvas.paint(cy + dy, cx + dx, color, cls);
      break;
    }
    case 1: {  // disc
      const int r = ha;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
          if (dy * dy + dx * dx <= r * r)
            canvas.paint(cy + dy, cx + dx, color, cls);
      break;
    }
    default: {  // stripe band: alternating 2px phases of the class color
      std::array<float, 3> dark = {color[0] * 0.45f, color[1] * 0.45f,
                                   color[2] * 0.45f};
      for (int dy = -ha; dy <= ha; ++dy) {
        for (int dx = -hb; dx <= hb; ++dx) {
          const int phase = stripes_vertical ? (cx + dx) : (cy + dy);
          const bool lit = ((phase / 2) % 2 + 2) % 2 == 0;
          canvas.paint(cy + dy, cx + dx, lit ? color : dark, cls);
        }
      }
      break;
    }
  }
}

}  // namespace

bool DomainShift::is_identity() const {
  return gain == std::array<float, 3>{1.0f, 1.0f, 1.0f} &&
         bias == std::array<float, 3>{0.0f, 0.0f, 0.0f} && contrast == 1.0f &&
         noise_sigma == 0.0f && palette_rotation % 3 == 0;
}

std::pair<FeatureMap, LabelMap> generate_scene(const SceneSpec& spec,
                                               std::uint64_t seed) {
  if (spec.num_classes < 2 || spec.num_classes > 254) {
    throw ConfigError("SceneSpec: num_classes must be in [2, 254]");
  }
  if (static_cast<int>(spec.class_colors.size()) < spec.num_classes - 1) {
    throw ConfigError("SceneSpec: need a base color per foreground class");
  }
  if (spec.height < 1 || spec.width < 1) {
    throw ConfigError("SceneSpec: canvas must be non-empty");
  }
  if (spec.min_shape_size < 1 || spec.max_shape_size < spec.min_shape_size) {
    throw ConfigError("SceneSpec: bad shape size range");
  }

  Rng rng(mix_seed(seed, 0x51c3ull));
  Canvas canvas{spec.height, spec.width,
                std::vector<float>(static_cast<std::size_t>(spec.height) *
                                   spec.width * 3),
                std::vector<std::uint8_t>(
                    static_cast<std::size_t>(spec.height) * spec.width, 0)};

  // Mottled background.
  for (std::size_t p = 0; p < canvas.label.size(); ++p) {
    for (int c = 0; c < 3; ++c) {
      canvas.rgb[p * 3 + c] = std::clamp(
          spec.background_color[c] +
              static_cast<float>(
                  rng.uniform(-spec.background_texture, spec.background_texture)),
          0.0f, 1.0f);
    }
  }

  const int foreground = spec.num_classes - 1;
  const int num_shapes = static_cast<int>(std::lround(spec.density));
  for (int i = 0; i < num_shapes; ++i) {
    const int cls = i < foreground ? 1 + i : 1 + rng.uniform_int(foreground);
    const int cy = rng.uniform_int(spec.height);
    const int cx = rng.uniform_int(spec.width);
    const int sa = spec.min_shape_size +
                   rng.uniform_int(spec.max_shape_size - spec.min_shape_size + 1);
    const int sb = spec.min_shape_size +
                   rng.uniform_int(spec.max_shape_size - spec.min_shape_size + 1);
    const bool vertical = rng.uniform_int(2) == 1;
    const auto color =
        jitter_color(spec.class_colors[cls - 1], spec.color_jitter, rng);
    draw_shape(canvas, (cls - 1) % 3, cy, cx, sa, sb, color,
               static_cast<std::uint8_t>(cls), vertical);
  }

  // Irrelevant content: random-colored shapes the labels ignore.
  const int distractors =
      spec.max_distractors > 0 ? rng.uniform_int(spec.max_distractors + 1) : 0;
  for (int i = 0; i < distractors; ++i) {
    std::array<float, 3> color = {static_cast<float>(rng.uniform(0.05, 0.95)),
                                  static_cast<float>(rng.uniform(0.05, 0.95)),
                                  static_cast<float>(rng.uniform(0.05, 0.95))};
    const int kind = rng.uniform_int(3);
    const int cy = rng.uniform_int(spec.height);
    const int cx = rng.uniform_int(spec.width);
    const int sa = spec.min_shape_size +
                   rng.uniform_int(spec.max_shape_size - spec.min_shape_size + 1);
    const int sb = spec.min_shape_size +
                   rng.uniform_int(spec.max_shape_size - spec.min_shape_size + 1);
    draw_shape(canvas, kind, cy, cx, sa, sb, color, kIgnoreLabel,
               rng.uniform_int(2) == 1);
  }

  return {FeatureMap(spec.height, spec.width, 3, std::move(canvas.rgb)),
          LabelMap(spec.height, spec.width, std::move(canvas.label))};
}

FeatureMap apply_shift(const FeatureMap& image, const DomainShift& shift,
                       std::uint64_t seed) {
  if (image.channels() != 3) {
    throw ShapeError("apply_shift: expected a 3-channel image");
  }
  for (float g : shift.gain) {
    if (!(g > 0.0f)) throw ConfigError("DomainShift: gains must be > 0");
  }
  if (shift.noise_sigma < 0.0f) {
    throw ConfigError("DomainShift: noise sigma must be >= 0");
  }
  if (shift.is_identity()) return image;

  const int rot = ((shift.palette_rotation % 3) + 3) % 3;
  Rng rng(mix_seed(seed, 0x5817ull));
  std::vector<float> out(image.size());
  const auto& in = image.data();
  for (std::size_t p = 0; p < in.size(); p += 3) {
    for (int c = 0; c < 3; ++c) {
      float v = in[p + (c + rot) % 3];
      if (shift.contrast != 1.0f) {
        v = std::pow(std::max(v, 0.0f), shift.contrast);
      }
      v = v * shift.gain[c] + shift.bias[c];
      if (shift.noise_sigma > 0.0f) {
        v += shift.noise_sigma * static_cast<float>(rng.normal());
      }
      out[p + c] = std::clamp(v, 0.0f, 1.0f);
    }
  }
  return FeatureMap(image.height(), image.width(), 3, std::move(out));
}

DomainShift sample_shift(const DomainShiftFamily& family, std::uint64_t seed) {
  if (family.rotations.empty()) {
    throw ConfigError("DomainShiftFamily: rotations must be non-empty");
  }
  Rng rng(mix_seed(seed, 0xfa41ull));
  DomainShift s;
  for (int c = 0; c < 3; ++c) {
    s.gain[c] = static_cast<float>(rng.uniform(family.gain_min, family.gain_max));
    s.bias[c] = static_cast<float>(rng.uniform(family.bias_min, family.bias_max));
  }
  s.contrast =
      static_cast<float>(rng.uniform(family.contrast_min, family.contrast_max));
  s.noise_sigma = static_cast<float>(rng.uniform(0.0, family.noise_max));
  s.palette_rotation =
      family.rotations[rng.uniform_int(static_cast<int>(family.rotations.size()))];
  return s;
}

bool outside_family(const DomainShift& shift, const DomainShiftFamily& family) {
  for (int c = 0; c < 3; ++c) {
    if (shift.gain[c] < family.gain_min || shift.gain[c] > family.gain_max)
      return true;
    if (shift.bias[c] < family.bias_min || shift.bias[c] > family.bias_max)
      return true;
  }
  if (shift.contrast < family.contrast_min ||
      shift.contrast > family.contrast_max)
    return true;
  if (shift.noise_sigma > family.noise_max) return true;
  const int rot = ((shift.palette_rotation % 3) + 3) % 3;
  return std::find(family.rotations.begin(), family.rotations.end(), rot) ==
         family.rotations.end();
}

}  // namespace wedge
