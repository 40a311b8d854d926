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

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "wedgekit/types.hpp"

namespace wedge {

/// Procedural scene recipe: class 0 is the background, classes 1..K-1 draw
/// shapes (kinds cycle rectangle / disc / stripe band) in their base color.
/// The palette keeps classes apart in luminance and saturation, not just in
/// hue, so appearance shifts leave some signal behind.
struct SceneSpec {
  int num_classes = 4;
  int height = 24;
  int width = 24;
  /// Expected shapes per scene. The first K-1 shapes cycle through every
  /// foreground class; density 0 renders background only.
  float density = 7.0f;
  float color_jitter = 0.04f;
  /// Background mottling amplitude (uniform per pixel per channel).
  float background_texture = 0.02f;
  int min_shape_size = 6;
  int max_shape_size = 12;
  /// Extra shapes with random colors labeled as ignore; models web images
  /// whose content is partly irrelevant. 0 for clean splits.
  int max_distractors = 0;
  std::array<float, 3> background_color = {0.45f, 0.45f, 0.48f};
  /// Base colors for classes 1..num_classes-1.
  std::vector<std::array<float, 3>> class_colors = {
      {0.62f, 0.15f, 0.15f},   // dark saturated box
      {0.25f, 0.85f, 0.30f},   // bright saturated disc
      {0.18f, 0.25f, 0.78f},   // striped band (paired with a darker phase)
  };
};

/// Appearance-only transform; the label map is untouched by construction.
/// Applied as: rotate channels, contrast exponent, per-channel affine,
/// additive Gaussian noise, clamp to [0, 1].
struct DomainShift {
  std::array<float, 3> gain = {1.0f, 1.0f, 1.0f};
  std::array<float, 3> bias = {0.0f, 0.0f, 0.0f};
  float contrast = 1.0f;
  float noise_sigma = 0.0f;
  /// Cyclic channel rotation in {0, 1, 2}.
  int palette_rotation = 0;

  bool is_identity() const;
};

std::pair<FeatureMap, LabelMap> generate_scene(const SceneSpec& spec,
                                               std::uint64_t seed);

FeatureMap apply_shift(const FeatureMap& image, const DomainShift& shift,
                       std::uint64_t seed);

/// Ranges the web split samples its per-image shift from.
struct DomainShiftFamily {
  float gain_min = 0.55f, gain_max = 1.45f;
  float bias_min = -0.12f, bias_max = 0.12f;
  float contrast_min = 0.70f, contrast_max = 1.40f;
  float noise_max = 0.04f;
  std::vector<int> rotations = {0, 1, 2};
};

DomainShift sample_shift(const DomainShiftFamily& family, std::uint64_t seed);

/// True when the shift could not have been produced by sample_shift, i.e.
/// at least one parameter lies outside the family's ranges.
bool outside_family(const DomainShift& shift, const DomainShiftFamily& family);

}  // namespace wedge
