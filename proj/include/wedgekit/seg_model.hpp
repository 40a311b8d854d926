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
#include <string>
#include <vector>

#include "wedgekit/detail/segnet.hpp"
#include "wedgekit/pseudo_label.hpp"
#include "wedgekit/rng.hpp"
#include "wedgekit/style_injection.hpp"
#include "wedgekit/types.hpp"

namespace wedge {

/// Three-stage per-pixel segmenter: 1x1 conv + tanh (stage A), 3x3 conv +
/// tanh (stage B), 1x1 conv + per-pixel softmax. Stages A and B are the
/// injectable feature points (indices 0 and 1). Weights are float; every
/// reduction accumulates in double. Initialization is symmetric uniform
/// scaled by 1/sqrt(fan_in) with zero biases.
class ToySegmenter {
 public:
  ToySegmenter() = default;
  ToySegmenter(int in_channels, int feat_channels, int num_classes,
               std::uint64_t seed);

  int in_channels() const { return params_.in_channels; }
  int feat_channels() const { return params_.feat_channels; }
  int num_classes() const { return params_.num_classes; }

  const detail::NetParams<float>& params() const { return params_; }
  detail::NetParams<float>& params() { return params_; }

 private:
  detail::NetParams<float> params_;
};

enum class TrainStage { kSourceOnly, kStage1SI, kStage2PL };

struct TrainConfig {
  double learning_rate = 2e-4;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  int iterations = 2000;
  int batch_size = 4;
  std::uint64_t seed = 0;
  TrainStage stage = TrainStage::kSourceOnly;
  InjectionConfig injection{};
  PseudoLabelConfig tau{};
  /// Restrict updates to the classifier (convex configuration).
  bool classifier_only = false;
};

struct LabeledImage {
  FeatureMap image;
  LabelMap labels;
};

struct LossPoint {
  int iteration = 0;
  double loss_src = 0.0;
  double loss_web = 0.0;
};

struct TrainResult {
  ToySegmenter model;
  std::vector<LossPoint> trace;
};

/// Plain prediction.
ProbabilityMap forward(const ToySegmenter& model, const FeatureMap& image);

/// Prediction with the configured style injection active at its points; with
/// probability (1 - cfg.probability) no restyling happens. rng drives only
/// that gate.
ProbabilityMap forward(const ToySegmenter& model, const FeatureMap& image,
                       const InjectionConfig& cfg, const FeatureMap& web_image,
                       Rng& rng);

/// Mean cross-entropy over supervised pixels (pixels labeled kIgnoreLabel
/// are excluded and the mean is over the rest). Throws
/// EmptySupervisionError when nothing is supervised.
double seg_loss(const ProbabilityMap& probs, const LabelMap& labels);

/// Source term plus web term with equal unit weights. A web map with no
/// supervised pixel contributes zero instead of raising.
double combined_loss(const ProbabilityMap& p_src, const LabelMap& y_src,
                     const ProbabilityMap& p_web, const LabelMap& y_web_pseudo);

/// Frozen per-call injection decisions; compute once per iteration, reuse in
/// backward so the restyling acts as a constant transformation.
using InjectionContext = detail::InjectionPlan;

/// Transforms the configured injection would apply right now (no probability
/// gate). An empty context means no injection.
InjectionContext plan_injection(const ToySegmenter& model,
                                const FeatureMap& image,
                                const FeatureMap& web_image,
                                const InjectionConfig& cfg);

struct BackwardResult {
  double loss = 0.0;
  detail::NetParams<float> grads;
};

/// Loss and analytic gradients for one image under a frozen injection
/// context.
BackwardResult backward(const ToySegmenter& model, const FeatureMap& image,
                        const LabelMap& labels, const InjectionContext& ctx);

/// SGD with momentum and weight decay over the configured stage:
///  - kSourceOnly ignores web data entirely,
///  - kStage1SI couples every source sample with a uniformly random web
///    image used purely as a style reference (web labels never enter),
///  - kStage2PL additionally trains on the web images against the supplied
///    pseudo labels.
/// web_pseudo_labels must be empty except for kStage2PL, where it matches
/// web_images one-to-one. Deterministic given cfg.seed.
TrainResult train(const ToySegmenter& init,
                  const std::vector<LabeledImage>& source,
                  const std::vector<FeatureMap>& web_images,
                  const std::vector<LabelMap>& web_pseudo_labels,
                  const TrainConfig& cfg);

/// Checkpoints: little-endian binary, magic + version + shape table +
/// float32 payloads.
void save_checkpoint(const std::string& path, const ToySegmenter& model);
ToySegmenter load_checkpoint(const std::string& path);

/// CSV with header iteration,loss_src,loss_web.
void write_loss_trace(const std::string& path,
                      const std::vector<LossPoint>& trace);

}  // namespace wedge
