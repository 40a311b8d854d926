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

#include "wedgekit/pseudo_label.hpp"

#include <cmath>
#include <string>

#include "wedgekit/errors.hpp"

namespace wedge {

double entropy(std::span<const float> p) {
  if (p.empty()) throw ValidationError("entropy: empty probability vector");
  double sum = 0.0;
  for (float v : p) {
    if (!(v >= 0.0f) || v > 1.0f + 1e-6f) {
      throw ValidationError("entropy: probability outside [0, 1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw ValidationError("entropy: probabilities sum to " +
                          std::to_string(sum) + ", not 1");
  }
  double h = 0.0;
  for (float v : p) {
    if (v > 0.0f) h -= static_cast<double>(v) * std::log(static_cast<double>(v));
  }
  return h;
}

std::pair<LabelMap, PseudoLabelStats> generate_pseudo_labels(
    const ProbabilityMap& probs, const PseudoLabelConfig& cfg) {
  if (!(cfg.tau > 0.0)) throw ConfigError("pseudo labels: tau must be > 0");
  if (probs.num_classes() > kIgnoreLabel) {
    throw ConfigError("pseudo labels: num_classes must stay below the ignore "
                      "sentinel (255)");
  }

  const int h = probs.height(), w = probs.width(), k = probs.num_classes();
  std::vector<std::uint8_t> entries(static_cast<std::size_t>(h) * w,
                                    kIgnoreLabel);
  PseudoLabelStats stats;
  stats.per_class_counts.assign(k, 0);

  std::size_t labeled = 0;
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      auto p = probs.pixel(row, col);
      if (entropy(p) >= cfg.tau) continue;  // unreliable, leave ignored
      int arg = 0;
      for (int c = 1; c < k; ++c) {
        if (p[c] > p[arg]) arg = c;
      }
      entries[static_cast<std::size_t>(row) * w + col] =
          static_cast<std::uint8_t>(arg);
      ++stats.per_class_counts[arg];
      ++labeled;
    }
  }
  stats.labeled_fraction =
      static_cast<double>(labeled) / (static_cast<double>(h) * w);
  return {LabelMap(h, w, std::move(entries)), stats};
}

}  // namespace wedge
