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

#include "wedgekit/style_injection.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "wedgekit/errors.hpp"

namespace wedge {

namespace {

using MatrixXdRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

MatrixXdRM to_double(const FlatFeatures& f) {
  return Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(
             f.data().data(), f.count(), f.channels())
      .cast<double>();
}

void check_procrustes_inputs(const FlatFeatures& src, const FlatFeatures& web,
                             const AffinityMatrix& aff) {
  if (src.channels() != web.channels()) {
    throw ShapeError("weighted_procrustes: channel mismatch");
  }
  if (aff.rows != src.count() || aff.cols != web.count()) {
    throw ShapeError("weighted_procrustes: affinity is " +
                     std::to_string(aff.rows) + "x" + std::to_string(aff.cols) +
                     ", features are " + std::to_string(src.count()) + "/" +
                     std::to_string(web.count()));
  }
}

/// Largest-magnitude entry of each left singular vector made non-negative,
/// with the matching right vector flipped alongside. First index wins ties.
void fix_svd_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      double mag = std::abs(u(r, k));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (u(arg, k) < 0.0) {
      u.col(k) = -u.col(k);
      v.col(k) = -v.col(k);
    }
  }
}

double objective_impl(const FlatFeatures& src, const FlatFeatures& web,
                      const AffinityMatrix& aff, const ProjectionMatrix& m,
                      bool squared) {
  if (src.channels() != m.dim()) {
    throw ShapeError("objective: projection dim mismatch");
  }
  check_procrustes_inputs(src, web, aff);
  if (aff.total_weight == 0.0) {
    throw DegenerateAffinityError("objective: affinity sums to zero");
  }
  const int c = src.channels();
  MatrixXdRM projected = to_double(src) * m.matrix().cast<double>().transpose();
  MatrixXdRM w = to_double(web);
  double acc = 0.0;
  for (int i = 0; i < aff.rows; ++i) {
    for (int j = 0; j < aff.cols; ++j) {
      const double weight = aff.at(i, j);
      if (weight == 0.0) continue;
      double sq = 0.0;
      for (int ch = 0; ch < c; ++ch) {
        const double d = projected(i, ch) - w(j, ch);
        sq += d * d;
      }
      acc += weight * (squared ? sq : std::sqrt(sq));
    }
  }
  return acc / aff.total_weight;
}

}  // namespace

ProjectionMatrix::ProjectionMatrix(Eigen::MatrixXf m) : m_(std::move(m)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols()) {
    throw ShapeError("ProjectionMatrix: matrix must be square");
  }
  if (orthogonality_error() > 1e-5 * static_cast<double>(m_.rows())) {
    throw NumericError("ProjectionMatrix: matrix is not orthogonal");
  }
}

double ProjectionMatrix::orthogonality_error() const {
  Eigen::MatrixXd md = m_.cast<double>();
  Eigen::MatrixXd gram = md * md.transpose();
  gram -= Eigen::MatrixXd::Identity(md.rows(), md.rows());
  return gram.norm();
}

ProjectionMatrix weighted_procrustes(const FlatFeatures& src,
                                     const FlatFeatures& web,
                                     const AffinityMatrix& aff) {
  check_procrustes_inputs(src, web, aff);
  if (aff.total_weight == 0.0) {
    throw DegenerateAffinityError(
        "weighted_procrustes: affinity sums to zero");
  }

  MatrixXdRM s = to_double(src);
  MatrixXdRM w = to_double(web);
  Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      sigma_f(aff.data.data(), aff.rows, aff.cols);
  MatrixXdRM sigma = sigma_f.cast<double>();

  // K = web^T sigma^T src, assembled as (sigma * web)^T * src. Minimizing J
  // maximizes tr(M^T K) when the 1/N_sigma factor is positive and minimizes
  // it when negative, hence the sign flip.
  Eigen::MatrixXd k = (sigma * w).transpose() * s;
  if (aff.total_weight < 0.0) k = -k;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("weighted_procrustes: SVD did not converge");
  }
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  fix_svd_signs(u, v);
  Eigen::MatrixXd m = u * v.transpose();
  return ProjectionMatrix(m.cast<float>());
}

double objective_sq(const FlatFeatures& src, const FlatFeatures& web,
                    const AffinityMatrix& aff, const ProjectionMatrix& m) {
  return objective_impl(src, web, aff, m, /*squared=*/true);
}

double objective_l2(const FlatFeatures& src, const FlatFeatures& web,
                    const AffinityMatrix& aff, const ProjectionMatrix& m) {
  return objective_impl(src, web, aff, m, /*squared=*/false);
}

FlatFeatures apply_projection(const FlatFeatures& src,
                              const ProjectionMatrix& m) {
  if (src.channels() != m.dim()) {
    throw ShapeError("apply_projection: channel count " +
                     std::to_string(src.channels()) +
                     " does not match projection dim " +
                     std::to_string(m.dim()));
  }
  MatrixXdRM out = to_double(src) * m.matrix().cast<double>().transpose();
  std::vector<float> data(static_cast<std::size_t>(src.count()) *
                          src.channels());
  for (int i = 0; i < src.count(); ++i) {
    for (int c = 0; c < src.channels(); ++c) {
      data[static_cast<std::size_t>(i) * src.channels() + c] =
          static_cast<float>(out(i, c));
    }
  }
  return FlatFeatures(src.count(), src.channels(), std::move(data));
}

namespace {

struct ChannelMoments {
  std::vector<double> mean, stddev;  // population
};

ChannelMoments channel_moments(const FeatureMap& f) {
  const int c = f.channels();
  const std::size_t pixels =
      static_cast<std::size_t>(f.height()) * f.width();
  ChannelMoments m;
  m.mean.assign(c, 0.0);
  m.stddev.assign(c, 0.0);
  const auto& data = f.data();
  for (std::size_t p = 0; p < pixels; ++p) {
    for (int ch = 0; ch < c; ++ch) m.mean[ch] += data[p * c + ch];
  }
  for (int ch = 0; ch < c; ++ch) m.mean[ch] /= static_cast<double>(pixels);
  for (std::size_t p = 0; p < pixels; ++p) {
    for (int ch = 0; ch < c; ++ch) {
      const double d = data[p * c + ch] - m.mean[ch];
      m.stddev[ch] += d * d;
    }
  }
  for (int ch = 0; ch < c; ++ch) {
    m.stddev[ch] = std::sqrt(m.stddev[ch] / static_cast<double>(pixels));
  }
  return m;
}

PointTransform adain_transform(const FeatureMap& src, const FeatureMap& style,
                               float epsilon) {
  if (src.channels() != style.channels()) {
    throw ShapeError("adain: channel mismatch");
  }
  ChannelMoments ms = channel_moments(src);
  ChannelMoments mt = channel_moments(style);
  PointTransform t;
  t.kind = PointTransform::Kind::kChannelAffine;
  t.scale.resize(src.channels());
  t.bias.resize(src.channels());
  for (int ch = 0; ch < src.channels(); ++ch) {
    const double scale =
        mt.stddev[ch] / std::max(ms.stddev[ch], static_cast<double>(epsilon));
    t.scale[ch] = static_cast<float>(scale);
    t.bias[ch] = static_cast<float>(mt.mean[ch] - ms.mean[ch] * scale);
  }
  return t;
}

}  // namespace

FeatureMap adain_inject(const FeatureMap& src, const FeatureMap& style,
                        const InjectionConfig& cfg) {
  return apply_transform(src, adain_transform(src, style, cfg.adain_epsilon));
}

PointTransform compute_transform(const FeatureMap& src, const FeatureMap& web,
                                 const InjectionConfig& cfg) {
  PointTransform t;
  switch (cfg.method) {
    case InjectionMethod::kNone:
      return t;
    case InjectionMethod::kAdain:
      return adain_transform(src, web, cfg.adain_epsilon);
    case InjectionMethod::kProcrustes:
    case InjectionMethod::kMastKnn: {
      FlatFeatures s = flatten(src);
      FlatFeatures w = subsample_rows(flatten(web),
                                      cfg.affinity.subsample_stride);
      AffinityConfig acfg = cfg.affinity;
      acfg.subsample_stride = 1;  // already applied
      AffinityMatrix aff = cfg.method == InjectionMethod::kProcrustes
                               ? cosine_affinity(s, w, acfg)
                               : knn_affinity(s, w, acfg);
      ProjectionMatrix m = weighted_procrustes(s, w, aff);
      t.kind = PointTransform::Kind::kLinear;
      t.linear = m.matrix();
      return t;
    }
  }
  return t;
}

FeatureMap apply_transform(const FeatureMap& src, const PointTransform& t) {
  switch (t.kind) {
    case PointTransform::Kind::kIdentity:
      return src;
    case PointTransform::Kind::kLinear: {
      FlatFeatures rows = flatten(src);
      FlatFeatures out = apply_projection(rows, ProjectionMatrix(t.linear));
      return unflatten(out, src.height(), src.width());
    }
    case PointTransform::Kind::kChannelAffine: {
      if (static_cast<int>(t.scale.size()) != src.channels()) {
        throw ShapeError("apply_transform: affine channel mismatch");
      }
      std::vector<float> data(src.size());
      const auto& in = src.data();
      const int c = src.channels();
      for (std::size_t p = 0; p < in.size(); p += c) {
        for (int ch = 0; ch < c; ++ch) {
          data[p + ch] = in[p + ch] * t.scale[ch] + t.bias[ch];
        }
      }
      return FeatureMap(src.height(), src.width(), c, std::move(data));
    }
  }
  return src;
}

FeatureMap inject(const FeatureMap& src, const FeatureMap& web,
                  const InjectionConfig& cfg, Rng& rng) {
  if (cfg.method == InjectionMethod::kNone) return src;
  if (rng.uniform01() >= cfg.probability) return src;
  return apply_transform(src, compute_transform(src, web, cfg));
}

}  // namespace wedge
