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

#include "wedgekit/seg_model.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

#include "wedgekit/errors.hpp"

namespace wedge {

namespace {

ProbabilityMap probs_to_map(const std::vector<float>& probs, int h, int w,
                            int k) {
  return ProbabilityMap(h, w, k, probs);
}

void check_train_inputs(const std::vector<LabeledImage>& source,
                        const std::vector<FeatureMap>& web_images,
                        const std::vector<LabelMap>& web_pseudo_labels,
                        const TrainConfig& cfg) {
  if (source.empty()) throw ConfigError("train: source dataset is empty");
  if (!(cfg.learning_rate > 0.0) && cfg.learning_rate != 0.0) {
    throw ConfigError("train: learning rate must be >= 0");
  }
  if (cfg.batch_size < 1) throw ConfigError("train: batch size must be >= 1");
  switch (cfg.stage) {
    case TrainStage::kSourceOnly:
      break;
    case TrainStage::kStage1SI:
      if (web_images.empty()) {
        throw ConfigError("train: stage 1 requires web images");
      }
      if (!web_pseudo_labels.empty()) {
        // Stage 1 consumes web images as unlabeled style references only.
        throw ConfigError("train: stage 1 does not accept web labels");
      }
      break;
    case TrainStage::kStage2PL:
      if (web_images.empty()) {
        throw ConfigError("train: stage 2 requires web images");
      }
      if (web_pseudo_labels.size() != web_images.size()) {
        throw ConfigError("train: stage 2 needs one pseudo-label map per web "
                          "image");
      }
      break;
  }
}

}  // namespace

ToySegmenter::ToySegmenter(int in_channels, int feat_channels, int num_classes,
                           std::uint64_t seed) {
  if (in_channels < 1 || feat_channels < 1 || num_classes < 2) {
    throw ConfigError("ToySegmenter: bad dimensions");
  }
  params_ = detail::NetParams<float>::zeros(in_channels, feat_channels,
                                            num_classes);
  Rng rng(mix_seed(seed, 0x90de1ull));
  auto init = [&](std::vector<float>& w, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (float& v : w) {
      v = static_cast<float>(rng.uniform(-bound, bound));
    }
  };
  init(params_.wa, in_channels);
  init(params_.wb, feat_channels * 9);
  init(params_.wc, feat_channels);
  // biases stay zero
}

ProbabilityMap forward(const ToySegmenter& model, const FeatureMap& image) {
  detail::InjectionPlan plan;
  auto act = detail::run_forward(model.params(), image, plan);
  return probs_to_map(act.probs, image.height(), image.width(),
                      model.num_classes());
}

ProbabilityMap forward(const ToySegmenter& model, const FeatureMap& image,
                       const InjectionConfig& cfg, const FeatureMap& web_image,
                       Rng& rng) {
  if (cfg.method == InjectionMethod::kNone ||
      rng.uniform01() >= cfg.probability) {
    return forward(model, image);
  }
  auto [act, plan] =
      detail::run_forward_injected(model.params(), image, web_image, cfg);
  return probs_to_map(act.probs, image.height(), image.width(),
                      model.num_classes());
}

double seg_loss(const ProbabilityMap& probs, const LabelMap& labels) {
  if (probs.height() != labels.height() || probs.width() != labels.width()) {
    throw ShapeError("seg_loss: shape mismatch");
  }
  labels.validate_classes(probs.num_classes());
  return detail::loss_from_probs(probs.data(), probs.num_classes(), labels);
}

double combined_loss(const ProbabilityMap& p_src, const LabelMap& y_src,
                     const ProbabilityMap& p_web,
                     const LabelMap& y_web_pseudo) {
  const double src = seg_loss(p_src, y_src);
  if (y_web_pseudo.count_labeled() == 0) {
    return src;  // strict thresholds may ignore the whole map
  }
  return src + seg_loss(p_web, y_web_pseudo);
}

InjectionContext plan_injection(const ToySegmenter& model,
                                const FeatureMap& image,
                                const FeatureMap& web_image,
                                const InjectionConfig& cfg) {
  if (cfg.method == InjectionMethod::kNone) return {};
  auto [act, plan] =
      detail::run_forward_injected(model.params(), image, web_image, cfg);
  return plan;
}

BackwardResult backward(const ToySegmenter& model, const FeatureMap& image,
                        const LabelMap& labels, const InjectionContext& ctx) {
  auto act = detail::run_forward(model.params(), image, ctx);
  BackwardResult result;
  result.loss =
      detail::loss_from_probs(act.probs, model.num_classes(), labels);
  result.grads =
      detail::run_backward(model.params(), image, act, ctx, labels);
  return result;
}

namespace {

struct Momentum {
  detail::NetParams<float> v;

  explicit Momentum(const detail::NetParams<float>& like) {
    v = detail::NetParams<float>::zeros(like.in_channels, like.feat_channels,
                                        like.num_classes);
  }

  void step(detail::NetParams<float>& weights,
            const detail::NetParams<float>& grads, const TrainConfig& cfg) {
    auto wts = weights.tensors();
    auto gts = grads.tensors();
    auto vts = v.tensors();
    // Tensor order: wa ba wb bb wc bc; the first four freeze under
    // classifier_only.
    for (std::size_t t = 0; t < wts.size(); ++t) {
      if (cfg.classifier_only && t < 4) continue;
      auto& w = *wts[t];
      const auto& g = *gts[t];
      auto& vel = *vts[t];
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double gi =
            static_cast<double>(g[i]) + cfg.weight_decay * w[i];
        const double vi = cfg.momentum * vel[i] - cfg.learning_rate * gi;
        vel[i] = static_cast<float>(vi);
        w[i] = static_cast<float>(w[i] + vi);
      }
    }
  }
};

void add_scaled(detail::NetParams<float>& acc,
                const detail::NetParams<float>& g, double scale) {
  auto ats = acc.tensors();
  auto gts = g.tensors();
  for (std::size_t t = 0; t < ats.size(); ++t) {
    auto& a = *ats[t];
    const auto& b = *gts[t];
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = static_cast<float>(a[i] + scale * b[i]);
    }
  }
}

}  // namespace

TrainResult train(const ToySegmenter& init,
                  const std::vector<LabeledImage>& source,
                  const std::vector<FeatureMap>& web_images,
                  const std::vector<LabelMap>& web_pseudo_labels,
                  const TrainConfig& cfg) {
  check_train_inputs(source, web_images, web_pseudo_labels, cfg);

  TrainResult result;
  result.model = init;
  result.trace.reserve(cfg.iterations);
  Momentum opt(init.params());
  Rng rng(mix_seed(cfg.seed, 0x7247ull));

  const bool uses_web = cfg.stage != TrainStage::kSourceOnly;
  const bool injectable =
      uses_web && cfg.injection.method != InjectionMethod::kNone;
  const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);

  for (int it = 0; it < cfg.iterations; ++it) {
    // One probability draw decides injection for the whole iteration.
    const bool inject_now =
        injectable && rng.uniform01() < cfg.injection.probability;

    auto grads = detail::NetParams<float>::zeros(
        init.in_channels(), init.feat_channels(), init.num_classes());
    double loss_src = 0.0, loss_web = 0.0;

    for (int b = 0; b < cfg.batch_size; ++b) {
      const int si = rng.uniform_int(static_cast<int>(source.size()));
      const LabeledImage& s = source[si];

      InjectionContext ctx;
      int wi = -1;
      if (uses_web) {
        wi = rng.uniform_int(static_cast<int>(web_images.size()));
        if (inject_now) {
          ctx = plan_injection(result.model, s.image, web_images[wi],
                               cfg.injection);
        }
      }

      auto act = detail::run_forward(result.model.params(), s.image, ctx);
      loss_src += detail::loss_from_probs(act.probs, init.num_classes(),
                                          s.labels) *
                  inv_batch;
      add_scaled(grads,
                 detail::run_backward(result.model.params(), s.image, act, ctx,
                                      s.labels),
                 inv_batch);

      if (cfg.stage == TrainStage::kStage2PL) {
        const LabelMap& pseudo = web_pseudo_labels[wi];
        if (pseudo.count_labeled() == 0) continue;  // zero web term
        detail::InjectionPlan none;
        auto wact =
            detail::run_forward(result.model.params(), web_images[wi], none);
        loss_web += detail::loss_from_probs(wact.probs, init.num_classes(),
                                            pseudo) *
                    inv_batch;
        add_scaled(grads,
                   detail::run_backward(result.model.params(), web_images[wi],
                                        wact, none, pseudo),
                   inv_batch);
      }
    }

    result.trace.push_back({it, loss_src, loss_web});
    opt.step(result.model.params(), grads, cfg);
  }
  return result;
}

namespace {

constexpr char kMagic[8] = {'W', 'D', 'G', 'S', 'E', 'G', '0', '1'};

void put_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw IoError("checkpoint: truncated stream");
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32_vec(std::ofstream& out, const std::vector<float>& v) {
  for (float x : v) {
    std::uint32_t bits;
    std::memcpy(&bits, &x, 4);
    put_u32(out, bits);
  }
}

void get_f32_vec(std::ifstream& in, std::vector<float>& v) {
  for (float& x : v) {
    const std::uint32_t bits = get_u32(in);
    std::memcpy(&x, &bits, 4);
  }
}

struct TensorSpec {
  const char* name;
  std::vector<std::uint32_t> dims;
};

}  // namespace

void save_checkpoint(const std::string& path, const ToySegmenter& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path);
  const auto& p = model.params();
  const std::uint32_t cin = p.in_channels, f = p.feat_channels,
                      k = p.num_classes;
  const TensorSpec specs[] = {
      {"wa", {f, cin}}, {"ba", {f}},    {"wb", {f, f, 3, 3}},
      {"bb", {f}},      {"wc", {k, f}}, {"bc", {k}},
  };
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, 1);  // version
  put_u32(out, 6);  // tensor count
  auto tensors = p.tensors();
  for (std::size_t t = 0; t < 6; ++t) {
    const auto& spec = specs[t];
    put_u32(out, static_cast<std::uint32_t>(std::strlen(spec.name)));
    out.write(spec.name, static_cast<std::streamsize>(std::strlen(spec.name)));
    put_u32(out, static_cast<std::uint32_t>(spec.dims.size()));
    for (std::uint32_t d : spec.dims) put_u32(out, d);
    put_f32_vec(out, *tensors[t]);
  }
  if (!out) throw IoError("checkpoint write failed for " + path);
}

ToySegmenter load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("checkpoint " + path + ": bad magic");
  }
  if (get_u32(in) != 1) throw IoError("checkpoint " + path + ": bad version");
  if (get_u32(in) != 6) {
    throw IoError("checkpoint " + path + ": unexpected tensor count");
  }

  struct Loaded {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::vector<float> data;
  };
  std::vector<Loaded> tensors(6);
  for (auto& t : tensors) {
    const std::uint32_t name_len = get_u32(in);
    if (name_len > 64) throw IoError("checkpoint: absurd tensor name");
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    const std::uint32_t rank = get_u32(in);
    if (rank > 8) throw IoError("checkpoint: absurd tensor rank");
    t.dims.resize(rank);
    std::size_t n = 1;
    for (auto& d : t.dims) {
      d = get_u32(in);
      n *= d;
    }
    t.data.resize(n);
    get_f32_vec(in, t.data);
  }

  auto find = [&](const char* name) -> Loaded& {
    for (auto& t : tensors) {
      if (t.name == name) return t;
    }
    throw IoError(std::string("checkpoint: missing tensor ") + name);
  };
  const auto& wa = find("wa");
  if (wa.dims.size() != 2) throw IoError("checkpoint: wa must be rank 2");
  const auto& wc = find("wc");
  if (wc.dims.size() != 2) throw IoError("checkpoint: wc must be rank 2");
  const int f = static_cast<int>(wa.dims[0]);
  const int cin = static_cast<int>(wa.dims[1]);
  const int k = static_cast<int>(wc.dims[0]);

  ToySegmenter model(cin, f, k, /*seed=*/0);
  auto& p = model.params();
  auto assign = [&](const char* name, std::vector<float>& dst) {
    auto& t = find(name);
    if (t.data.size() != dst.size()) {
      throw IoError(std::string("checkpoint: tensor ") + name +
                    " has wrong element count");
    }
    dst = t.data;
  };
  assign("wa", p.wa);
  assign("ba", p.ba);
  assign("wb", p.wb);
  assign("bb", p.bb);
  assign("wc", p.wc);
  assign("bc", p.bc);
  return model;
}

void write_loss_trace(const std::string& path,
                      const std::vector<LossPoint>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write loss trace " + path);
  out << "iteration,loss_src,loss_web\n";
  char line[96];
  for (const auto& p : trace) {
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g\n", p.iteration,
                  p.loss_src, p.loss_web);
    out << line;
  }
}

}  // namespace wedge
