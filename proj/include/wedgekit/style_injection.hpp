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

#include <Eigen/Dense>
#include <set>
#include <vector>

#include "wedgekit/affinity.hpp"
#include "wedgekit/rng.hpp"
#include "wedgekit/types.hpp"

namespace wedge {

/// Orthogonal C x C projection aligning source features to a web style
/// subspace. Construction validates ||M M^T - I||_F <= 1e-5 * C.
class ProjectionMatrix {
 public:
  ProjectionMatrix() = default;
  explicit ProjectionMatrix(Eigen::MatrixXf m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXf& matrix() const { return m_; }

  /// ||M M^T - I||_F, evaluated in double.
  double orthogonality_error() const;

 private:
  Eigen::MatrixXf m_;
};

enum class InjectionMethod { kNone, kProcrustes, kAdain, kMastKnn };

struct InjectionConfig {
  InjectionMethod method = InjectionMethod::kProcrustes;
  /// Feature stages whose output gets restyled before the next stage.
  std::set<int> injection_points = {0, 1};
  /// Chance per call that the injection is applied at all.
  double probability = 1.0;
  float adain_epsilon = 1e-5f;
  /// Parameters of the affinity build used by procrustes / mast_knn.
  AffinityConfig affinity{};
};

/// Closed-form solution of the affinity-weighted orthogonal alignment
/// problem: the orthogonal M minimizing
///   J(M) = (1/N_sigma) * sum_ij sigma_ij * ||F_i^src M^T - F_j^web||^2,
/// obtained as M = U V^T from the SVD of K = web^T sigma^T src (sign-flipped
/// when the affinity sum is negative, which flips the sense of the minimum).
/// SVD signs are fixed deterministically: in every singular-vector pair the
/// left vector's largest-magnitude entry is made non-negative.
ProjectionMatrix weighted_procrustes(const FlatFeatures& src,
                                     const FlatFeatures& web,
                                     const AffinityMatrix& aff);

/// J(M) with squared per-pair norms (the problem the closed form solves).
double objective_sq(const FlatFeatures& src, const FlatFeatures& web,
                    const AffinityMatrix& aff, const ProjectionMatrix& m);

/// J(M) with unsquared per-pair norms, kept for inspection.
double objective_l2(const FlatFeatures& src, const FlatFeatures& web,
                    const AffinityMatrix& aff, const ProjectionMatrix& m);

/// Replaces every row r by r * M^T. Orthogonal M preserves row norms.
FlatFeatures apply_projection(const FlatFeatures& src,
                              const ProjectionMatrix& m);

/// Per-channel moment matching: out = (src - mu_src) / max(sigma_src, eps)
/// * sigma_style + mu_style, with population standard deviations. Spatial
/// sizes may differ; channel counts must match.
FeatureMap adain_inject(const FeatureMap& src, const FeatureMap& style,
                        const InjectionConfig& cfg);

/// The frozen per-call restyling of one feature map. Within a training
/// iteration this is a constant transformation: no gradient flows into how
/// it was computed, only through its application.
struct PointTransform {
  enum class Kind { kIdentity, kLinear, kChannelAffine };

  Kind kind = Kind::kIdentity;
  Eigen::MatrixXf linear;          // kLinear: rows map through linear^T
  std::vector<float> scale, bias;  // kChannelAffine: x*scale[c] + bias[c]
};

/// Computes the transform the configured method would apply to src given the
/// web reference. Ignores cfg.probability (the caller gates on it).
PointTransform compute_transform(const FeatureMap& src, const FeatureMap& web,
                                 const InjectionConfig& cfg);

FeatureMap apply_transform(const FeatureMap& src, const PointTransform& t);

/// One-shot injection: with probability cfg.probability restyles src using
/// web via the configured method, otherwise returns src unchanged. Method
/// kNone is the identity.
FeatureMap inject(const FeatureMap& src, const FeatureMap& web,
                  const InjectionConfig& cfg, Rng& rng);

}  // namespace wedge
