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

#include "wedgekit/affinity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wedgekit/errors.hpp"

namespace wedge {

namespace {

using MatrixXdRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_inputs(const FlatFeatures& src, const FlatFeatures& web,
                  const AffinityConfig& cfg) {
  if (src.channels() != web.channels()) {
    throw ShapeError("affinity: channel mismatch (" +
                     std::to_string(src.channels()) + " vs " +
                     std::to_string(web.channels()) + ")");
  }
  if (!(cfg.epsilon > 0.0f)) {
    throw ConfigError("affinity: epsilon must be > 0");
  }
  if (cfg.subsample_stride < 1) {
    throw ConfigError("affinity: subsample_stride must be >= 1");
  }
}

/// Rows divided by max(norm, epsilon); norms accumulated in double.
MatrixXdRM normalized_rows(const FlatFeatures& f, double epsilon) {
  MatrixXdRM out(f.count(), f.channels());
  for (int i = 0; i < f.count(); ++i) {
    auto row = f.row(i);
    double sq = 0.0;
    for (float v : row) sq += static_cast<double>(v) * v;
    const double inv = 1.0 / std::max(std::sqrt(sq), epsilon);
    for (int c = 0; c < f.channels(); ++c) {
      out(i, c) = static_cast<double>(row[c]) * inv;
    }
  }
  return out;
}

/// Dense cosine matrix in double, entries clamped into [-1, 1].
MatrixXdRM cosine_matrix(const FlatFeatures& src, const FlatFeatures& web,
                         const AffinityConfig& cfg) {
  MatrixXdRM s = normalized_rows(src, cfg.epsilon);
  MatrixXdRM w = normalized_rows(web, cfg.epsilon);
  MatrixXdRM sigma = s * w.transpose();
  sigma = sigma.cwiseMax(-1.0).cwiseMin(1.0);
  return sigma;
}

AffinityMatrix pack(const MatrixXdRM& sigma) {
  AffinityMatrix out;
  out.rows = static_cast<int>(sigma.rows());
  out.cols = static_cast<int>(sigma.cols());
  out.data.resize(static_cast<std::size_t>(out.rows) * out.cols);
  for (int i = 0; i < out.rows; ++i) {
    for (int j = 0; j < out.cols; ++j) {
      out.data[static_cast<std::size_t>(i) * out.cols + j] =
          static_cast<float>(sigma(i, j));
    }
  }
  double total = 0.0;
  for (float v : out.data) total += v;
  out.total_weight = total;
  return out;
}

}  // namespace

FlatFeatures subsample_rows(const FlatFeatures& rows, int stride) {
  if (stride < 1) throw ConfigError("subsample_rows: stride must be >= 1");
  if (stride == 1) return rows;
  const int kept = (rows.count() + stride - 1) / stride;
  std::vector<float> data;
  data.reserve(static_cast<std::size_t>(kept) * rows.channels());
  for (int i = 0; i < rows.count(); i += stride) {
    auto r = rows.row(i);
    data.insert(data.end(), r.begin(), r.end());
  }
  return FlatFeatures(kept, rows.channels(), std::move(data));
}

AffinityMatrix cosine_affinity(const FlatFeatures& src, const FlatFeatures& web,
                               const AffinityConfig& cfg) {
  check_inputs(src, web, cfg);
  FlatFeatures web_used = subsample_rows(web, cfg.subsample_stride);
  return pack(cosine_matrix(src, web_used, cfg));
}

AffinityMatrix knn_affinity(const FlatFeatures& src, const FlatFeatures& web,
                            const AffinityConfig& cfg) {
  check_inputs(src, web, cfg);
  FlatFeatures web_used = subsample_rows(web, cfg.subsample_stride);
  if (cfg.k < 1) throw ConfigError("knn_affinity: k must be >= 1");
  if (cfg.k > web_used.count()) {
    throw ConfigError("knn_affinity: k=" + std::to_string(cfg.k) +
                      " exceeds web position count " +
                      std::to_string(web_used.count()));
  }
  MatrixXdRM sigma = cosine_matrix(src, web_used, cfg);

  AffinityMatrix out;
  out.rows = static_cast<int>(sigma.rows());
  out.cols = static_cast<int>(sigma.cols());
  out.data.assign(static_cast<std::size_t>(out.rows) * out.cols, 0.0f);

  std::vector<int> order(out.cols);
  for (int i = 0; i < out.rows; ++i) {
    std::iota(order.begin(), order.end(), 0);
    // Highest similarity first; equal similarities resolve to the lower index.
    auto better = [&](int a, int b) {
      double sa = sigma(i, a), sb = sigma(i, b);
      return sa > sb || (sa == sb && a < b);
    };
    std::nth_element(order.begin(), order.begin() + (cfg.k - 1), order.end(),
                     better);
    for (int n = 0; n < cfg.k; ++n) {
      out.data[static_cast<std::size_t>(i) * out.cols + order[n]] = 1.0f;
    }
  }
  out.total_weight =
      static_cast<double>(out.rows) * static_cast<double>(cfg.k);
  return out;
}

}  // namespace wedge
