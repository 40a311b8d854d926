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

#include <vector>

#include "wedgekit/types.hpp"

namespace wedge {

struct AffinityConfig {
  enum class Mode { kCosine, kKnn };

  Mode mode = Mode::kCosine;
  /// Neighbors per source row; k-NN mode only.
  int k = 5;
  /// Floor for feature norms so zero features yield zero affinity.
  float epsilon = 1e-8f;
  /// Regular subsampling stride over web positions; 1 keeps every position.
  int subsample_stride = 1;
};

/// Cross-correlation weights between every source and web feature vector.
/// rows x cols dense storage; total_weight caches the element sum.
struct AffinityMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;  // row-major
  double total_weight = 0.0;

  float at(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
};

/// Keeps web rows 0, s, 2s, ... (the subsampling applied by both affinity
/// builders); stride 1 returns the input unchanged.
FlatFeatures subsample_rows(const FlatFeatures& rows, int stride);

/// Continuous affinity: entry (i, j) is the cosine similarity between source
/// row i and web row j, with norms floored at cfg.epsilon. Signed values are
/// kept as-is.
AffinityMatrix cosine_affinity(const FlatFeatures& src, const FlatFeatures& web,
                               const AffinityConfig& cfg);

/// Discrete affinity: row i carries weight 1 at the k web rows with highest
/// cosine similarity to source row i (ties broken by lowest web index), 0
/// elsewhere.
AffinityMatrix knn_affinity(const FlatFeatures& src, const FlatFeatures& web,
                            const AffinityConfig& cfg);

}  // namespace wedge
