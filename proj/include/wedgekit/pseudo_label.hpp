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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wedgekit/types.hpp"

namespace wedge {

struct PseudoLabelConfig {
  /// Entropy threshold in nats; pixels with h < tau receive their argmax
  /// class, the rest are ignored.
  double tau = 5e-2;
};

struct PseudoLabelStats {
  double labeled_fraction = 0.0;
  std::vector<std::int64_t> per_class_counts;
};

/// Shannon entropy in nats, -sum p ln p with 0 ln 0 = 0. Throws
/// ValidationError unless p lies on the probability simplex.
double entropy(std::span<const float> p);

/// Thresholded argmax labeling per pixel: argmax class when the prediction
/// entropy is strictly below cfg.tau, kIgnoreLabel otherwise. Argmax ties
/// resolve to the lowest class id.
std::pair<LabelMap, PseudoLabelStats> generate_pseudo_labels(
    const ProbabilityMap& probs, const PseudoLabelConfig& cfg);

}  // namespace wedge
