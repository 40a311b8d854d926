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

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "wedgekit/errors.hpp"
#include "wedgekit/style_injection.hpp"
#include "wedgekit/types.hpp"

// Scalar-templated network core. The float instantiation is the production
// path (32-bit storage, 64-bit accumulation in every reduction); the double
// instantiation exists so gradient checks can run fully in 64-bit.
namespace wedge::detail {

template <typename T>
struct NetParams {
  int in_channels = 0, feat_channels = 0, num_classes = 0;
  std::vector<T> wa, ba;  // [F][Cin], [F]      1x1 conv, stage A
  std::vector<T> wb, bb;  // [Fo][Fi][3][3], [Fo]  3x3 conv, stage B
  std::vector<T> wc, bc;  // [K][F], [K]        1x1 classifier

  static NetParams zeros(int cin, int f, int k) {
    NetParams p;
    p.in_channels = cin;
    p.feat_channels = f;
    p.num_classes = k;
    p.wa.assign(static_cast<std::size_t>(f) * cin, T(0));
    p.ba.assign(f, T(0));
    p.wb.assign(static_cast<std::size_t>(f) * f * 9, T(0));
    p.bb.assign(f, T(0));
    p.wc.assign(static_cast<std::size_t>(k) * f, T(0));
    p.bc.assign(k, T(0));
    return p;
  }

  template <typename U>
  NetParams<U> cast() const {
    NetParams<U> p;
    p.in_channels = in_channels;
    p.feat_channels = feat_channels;
    p.num_classes = num_classes;
    auto conv = [](const std::vector<T>& v) {
      return std::vector<U>(v.begin(), v.end());
    };
    p.wa = conv(wa);
    p.ba = conv(ba);
    p.wb = conv(wb);
    p.bb = conv(bb);
    p.wc = conv(wc);
    p.bc = conv(bc);
    return p;
  }

  std::vector<std::vector<T>*> tensors() {
    return {&wa, &ba, &wb, &bb, &wc, &bc};
  }
  std::vector<const std::vector<T>*> tensors() const {
    return {&wa, &ba, &wb, &bb, &wc, &bc};
  }
};

/// Frozen restyling decisions of one forward pass. Transforms are float
/// constants regardless of the scalar type; gradients flow through their
/// application only.
struct InjectionPlan {
  std::optional<PointTransform> at_stage_a;
  std::optional<PointTransform> at_stage_b;
};

template <typename T>
struct Activations {
  int height = 0, width = 0;
  std::vector<T> a, a_inj;  // H*W*F, stage-A output and its restyled version
  std::vector<T> b, b_inj;  // H*W*F
  std::vector<T> probs;     // H*W*K
};

template <typename T>
std::vector<T> conv1x1(const std::vector<T>& x, int pixels, int cin,
                       const std::vector<T>& w, const std::vector<T>& bias,
                       int cout) {
  std::vector<T> out(static_cast<std::size_t>(pixels) * cout);
  for (int p = 0; p < pixels; ++p) {
    const T* xp = x.data() + static_cast<std::size_t>(p) * cin;
    for (int o = 0; o < cout; ++o) {
      double acc = static_cast<double>(bias[o]);
      const T* wo = w.data() + static_cast<std::size_t>(o) * cin;
      for (int c = 0; c < cin; ++c) {
        acc += static_cast<double>(wo[c]) * static_cast<double>(xp[c]);
      }
      out[static_cast<std::size_t>(p) * cout + o] = static_cast<T>(acc);
    }
  }
  return out;
}

template <typename T>
std::vector<T> conv3x3(const std::vector<T>& x, int height, int width, int cin,
                       const std::vector<T>& w, const std::vector<T>& bias,
                       int cout) {
  std::vector<T> out(static_cast<std::size_t>(height) * width * cout);
  for (int y = 0; y < height; ++y) {
    for (int xcol = 0; xcol < width; ++xcol) {
      T* op = out.data() +
              (static_cast<std::size_t>(y) * width + xcol) * cout;
      for (int o = 0; o < cout; ++o) {
        double acc = static_cast<double>(bias[o]);
        for (int ky = 0; ky < 3; ++ky) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= height) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int sx = xcol + kx - 1;
            if (sx < 0 || sx >= width) continue;
            const T* xp =
                x.data() + (static_cast<std::size_t>(sy) * width + sx) * cin;
            const T* wp =
                w.data() +
                ((static_cast<std::size_t>(o) * cin) * 9 + ky * 3 + kx);
            for (int c = 0; c < cin; ++c) {
              acc += static_cast<double>(wp[static_cast<std::size_t>(c) * 9]) *
                     static_cast<double>(xp[c]);
            }
          }
        }
        op[o] = static_cast<T>(acc);
      }
    }
  }
  return out;
}

template <typename T>
void tanh_inplace(std::vector<T>& v) {
  for (T& x : v) x = static_cast<T>(std::tanh(static_cast<double>(x)));
}

template <typename T>
std::vector<T> softmax_rows(const std::vector<T>& logits, int pixels, int k) {
  std::vector<T> out(logits.size());
  std::vector<double> e(k);
  for (int p = 0; p < pixels; ++p) {
    const T* lp = logits.data() + static_cast<std::size_t>(p) * k;
    double m = static_cast<double>(lp[0]);
    for (int c = 1; c < k; ++c) m = std::max(m, static_cast<double>(lp[c]));
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      e[c] = std::exp(static_cast<double>(lp[c]) - m);
      sum += e[c];
    }
    for (int c = 0; c < k; ++c) {
      out[static_cast<std::size_t>(p) * k + c] = static_cast<T>(e[c] / sum);
    }
  }
  return out;
}

/// Applies a frozen transform to a raw activation buffer.
template <typename T>
std::vector<T> apply_point_transform(const std::vector<T>& x, int pixels,
                                     int channels, const PointTransform& t) {
  switch (t.kind) {
    case PointTransform::Kind::kIdentity:
      return x;
    case PointTransform::Kind::kLinear: {
      std::vector<T> out(x.size());
      for (int p = 0; p < pixels; ++p) {
        const T* xp = x.data() + static_cast<std::size_t>(p) * channels;
        T* op = out.data() + static_cast<std::size_t>(p) * channels;
        for (int f = 0; f < channels; ++f) {
          double acc = 0.0;
          for (int g = 0; g < channels; ++g) {
            acc += static_cast<double>(t.linear(f, g)) *
                   static_cast<double>(xp[g]);
          }
          op[f] = static_cast<T>(acc);
        }
      }
      return out;
    }
    case PointTransform::Kind::kChannelAffine: {
      std::vector<T> out(x.size());
      for (std::size_t p = 0; p < x.size(); p += channels) {
        for (int c = 0; c < channels; ++c) {
          out[p + c] = static_cast<T>(static_cast<double>(x[p + c]) *
                                          static_cast<double>(t.scale[c]) +
                                      static_cast<double>(t.bias[c]));
        }
      }
      return out;
    }
  }
  return x;
}

/// Backward of apply_point_transform w.r.t. its input.
template <typename T>
std::vector<T> point_transform_grad(const std::vector<T>& dout, int pixels,
                                    int channels, const PointTransform& t) {
  switch (t.kind) {
    case PointTransform::Kind::kIdentity:
      return dout;
    case PointTransform::Kind::kLinear: {
      // out = x * M^T  =>  dx = dout * M
      std::vector<T> dx(dout.size());
      for (int p = 0; p < pixels; ++p) {
        const T* dp = dout.data() + static_cast<std::size_t>(p) * channels;
        T* xp = dx.data() + static_cast<std::size_t>(p) * channels;
        for (int g = 0; g < channels; ++g) {
          double acc = 0.0;
          for (int f = 0; f < channels; ++f) {
            acc += static_cast<double>(dp[f]) *
                   static_cast<double>(t.linear(f, g));
          }
          xp[g] = static_cast<T>(acc);
        }
      }
      return dx;
    }
    case PointTransform::Kind::kChannelAffine: {
      std::vector<T> dx(dout.size());
      for (std::size_t p = 0; p < dout.size(); p += channels) {
        for (int c = 0; c < channels; ++c) {
          dx[p + c] = static_cast<T>(static_cast<double>(dout[p + c]) *
                                     static_cast<double>(t.scale[c]));
        }
      }
      return dx;
    }
  }
  return dout;
}

template <typename T>
FeatureMap buffer_to_feature_map(const std::vector<T>& v, int height,
                                 int width, int channels) {
  std::vector<float> data(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    data[i] = static_cast<float>(v[i]);
  }
  return FeatureMap(height, width, channels, std::move(data));
}

template <typename T>
std::vector<T> image_to_buffer(const FeatureMap& image) {
  return std::vector<T>(image.data().begin(), image.data().end());
}

/// Forward replay with a fixed injection plan.
template <typename T>
Activations<T> run_forward(const NetParams<T>& net, const FeatureMap& image,
                           const InjectionPlan& plan) {
  if (image.channels() != net.in_channels) {
    throw ShapeError("forward: image channels do not match the model input");
  }
  const int h = image.height(), w = image.width();
  const int pixels = h * w;
  const int f = net.feat_channels;

  Activations<T> act;
  act.height = h;
  act.width = w;

  std::vector<T> x = image_to_buffer<T>(image);
  act.a = conv1x1(x, pixels, net.in_channels, net.wa, net.ba, f);
  tanh_inplace(act.a);
  act.a_inj = plan.at_stage_a
                  ? apply_point_transform(act.a, pixels, f, *plan.at_stage_a)
                  : act.a;

  act.b = conv3x3(act.a_inj, h, w, f, net.wb, net.bb, f);
  tanh_inplace(act.b);
  act.b_inj = plan.at_stage_b
                  ? apply_point_transform(act.b, pixels, f, *plan.at_stage_b)
                  : act.b;

  std::vector<T> logits =
      conv1x1(act.b_inj, pixels, f, net.wc, net.bc, net.num_classes);
  act.probs = softmax_rows(logits, pixels, net.num_classes);
  return act;
}

/// Runs the web branch (never restyled) and the source branch, computing the
/// frozen transform at each configured stage from the current features.
template <typename T>
std::pair<Activations<T>, InjectionPlan> run_forward_injected(
    const NetParams<T>& net, const FeatureMap& image, const FeatureMap& web,
    const InjectionConfig& cfg) {
  const int h = image.height(), w = image.width();
  const int pixels = h * w;
  const int f = net.feat_channels;

  InjectionPlan plan;
  Activations<T> act;
  act.height = h;
  act.width = w;

  const bool want_a = cfg.injection_points.count(0) > 0;
  const bool want_b = cfg.injection_points.count(1) > 0;

  // Web features from the plain path.
  std::vector<T> xw = image_to_buffer<T>(web);
  std::vector<T> wa_act =
      conv1x1(xw, web.height() * web.width(), net.in_channels, net.wa, net.ba, f);
  tanh_inplace(wa_act);
  std::vector<T> wb_act;
  if (want_b) {
    wb_act = conv3x3(wa_act, web.height(), web.width(), f, net.wb, net.bb, f);
    tanh_inplace(wb_act);
  }

  std::vector<T> x = image_to_buffer<T>(image);
  act.a = conv1x1(x, pixels, net.in_channels, net.wa, net.ba, f);
  tanh_inplace(act.a);
  if (want_a) {
    plan.at_stage_a = compute_transform(
        buffer_to_feature_map(act.a, h, w, f),
        buffer_to_feature_map(wa_act, web.height(), web.width(), f), cfg);
    act.a_inj = apply_point_transform(act.a, pixels, f, *plan.at_stage_a);
  } else {
    act.a_inj = act.a;
  }

  act.b = conv3x3(act.a_inj, h, w, f, net.wb, net.bb, f);
  tanh_inplace(act.b);
  if (want_b) {
    plan.at_stage_b = compute_transform(
        buffer_to_feature_map(act.b, h, w, f),
        buffer_to_feature_map(wb_act, web.height(), web.width(), f), cfg);
    act.b_inj = apply_point_transform(act.b, pixels, f, *plan.at_stage_b);
  } else {
    act.b_inj = act.b;
  }

  std::vector<T> logits =
      conv1x1(act.b_inj, pixels, f, net.wc, net.bc, net.num_classes);
  act.probs = softmax_rows(logits, pixels, net.num_classes);
  return {std::move(act), std::move(plan)};
}

/// Mean cross-entropy over supervised pixels; pixel count returned so the
/// caller can treat an all-ignore map as a zero term.
template <typename T>
double loss_from_probs(const std::vector<T>& probs, int num_classes,
                       const LabelMap& labels) {
  const auto& e = labels.entries();
  double acc = 0.0;
  std::size_t valid = 0;
  for (std::size_t p = 0; p < e.size(); ++p) {
    if (e[p] == kIgnoreLabel) continue;
    ++valid;
    const double pr = static_cast<double>(
        probs[p * static_cast<std::size_t>(num_classes) + e[p]]);
    acc -= std::log(std::max(pr, 1e-45));
  }
  if (valid == 0) {
    throw EmptySupervisionError("seg loss: every pixel is ignored");
  }
  return acc / static_cast<double>(valid);
}

/// Analytic gradients of the mean cross-entropy w.r.t. every weight tensor.
/// Injection transforms in the plan are treated as constants.
template <typename T>
NetParams<T> run_backward(const NetParams<T>& net, const FeatureMap& image,
                          const Activations<T>& act, const InjectionPlan& plan,
                          const LabelMap& labels) {
  const int h = act.height, w = act.width;
  const int pixels = h * w;
  const int f = net.feat_channels;
  const int k = net.num_classes;
  if (labels.height() != h || labels.width() != w) {
    throw ShapeError("backward: label map shape mismatch");
  }

  NetParams<T> g = NetParams<T>::zeros(net.in_channels, f, k);

  const auto& le = labels.entries();
  std::size_t valid = 0;
  for (std::uint8_t e : le) {
    if (e != kIgnoreLabel) ++valid;
  }
  if (valid == 0) {
    throw EmptySupervisionError("backward: every pixel is ignored");
  }
  const double inv_valid = 1.0 / static_cast<double>(valid);

  // d loss / d logits = (P - Y) / N_valid on supervised pixels.
  std::vector<T> dlogits(static_cast<std::size_t>(pixels) * k, T(0));
  for (int p = 0; p < pixels; ++p) {
    const std::uint8_t y = le[p];
    if (y == kIgnoreLabel) continue;
    for (int c = 0; c < k; ++c) {
      double v = static_cast<double>(
          act.probs[static_cast<std::size_t>(p) * k + c]);
      if (c == y) v -= 1.0;
      dlogits[static_cast<std::size_t>(p) * k + c] =
          static_cast<T>(v * inv_valid);
    }
  }

  // Classifier.
  std::vector<T> db_inj(static_cast<std::size_t>(pixels) * f, T(0));
  for (int c = 0; c < k; ++c) {
    double dbias = 0.0;
    for (int p = 0; p < pixels; ++p) {
      dbias += static_cast<double>(dlogits[static_cast<std::size_t>(p) * k + c]);
    }
    g.bc[c] = static_cast<T>(dbias);
  }
  for (int c = 0; c < k; ++c) {
    for (int ff = 0; ff < f; ++ff) {
      double acc = 0.0;
      for (int p = 0; p < pixels; ++p) {
        acc += static_cast<double>(dlogits[static_cast<std::size_t>(p) * k + c]) *
               static_cast<double>(act.b_inj[static_cast<std::size_t>(p) * f + ff]);
      }
      g.wc[static_cast<std::size_t>(c) * f + ff] = static_cast<T>(acc);
    }
  }
  for (int p = 0; p < pixels; ++p) {
    for (int ff = 0; ff < f; ++ff) {
      double acc = 0.0;
      for (int c = 0; c < k; ++c) {
        acc += static_cast<double>(dlogits[static_cast<std::size_t>(p) * k + c]) *
               static_cast<double>(net.wc[static_cast<std::size_t>(c) * f + ff]);
      }
      db_inj[static_cast<std::size_t>(p) * f + ff] = static_cast<T>(acc);
    }
  }

  // Stage-B injection, then tanh.
  std::vector<T> db = plan.at_stage_b
                          ? point_transform_grad(db_inj, pixels, f,
                                                 *plan.at_stage_b)
                          : db_inj;
  for (int i = 0; i < pixels * f; ++i) {
    const double t = static_cast<double>(act.b[i]);
    db[i] = static_cast<T>(static_cast<double>(db[i]) * (1.0 - t * t));
  }

  // Conv3x3 backward, gather form so every sum runs in a double accumulator.
  std::vector<T> da_inj(static_cast<std::size_t>(pixels) * f, T(0));
  for (int o = 0; o < f; ++o) {
    double dbias = 0.0;
    for (int p = 0; p < pixels; ++p) {
      dbias += static_cast<double>(db[static_cast<std::size_t>(p) * f + o]);
    }
    g.bb[o] = static_cast<T>(dbias);
  }
  for (int o = 0; o < f; ++o) {
    for (int c = 0; c < f; ++c) {
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          double acc = 0.0;
          for (int y = 0; y < h; ++y) {
            const int sy = y + ky - 1;
            if (sy < 0 || sy >= h) continue;
            for (int xcol = 0; xcol < w; ++xcol) {
              const int sx = xcol + kx - 1;
              if (sx < 0 || sx >= w) continue;
              acc += static_cast<double>(
                         db[(static_cast<std::size_t>(y) * w + xcol) * f + o]) *
                     static_cast<double>(
                         act.a_inj[(static_cast<std::size_t>(sy) * w + sx) * f +
                                   c]);
            }
          }
          g.wb[(static_cast<std::size_t>(o) * f + c) * 9 + ky * 3 + kx] =
              static_cast<T>(acc);
        }
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int xcol = 0; xcol < w; ++xcol) {
      T* dap = da_inj.data() + (static_cast<std::size_t>(y) * w + xcol) * f;
      for (int c = 0; c < f; ++c) {
        double acc = 0.0;
        for (int ky = 0; ky < 3; ++ky) {
          const int ty = y - ky + 1;
          if (ty < 0 || ty >= h) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int tx = xcol - kx + 1;
            if (tx < 0 || tx >= w) continue;
            const T* dp =
                db.data() + (static_cast<std::size_t>(ty) * w + tx) * f;
            for (int o = 0; o < f; ++o) {
              acc += static_cast<double>(
                         net.wb[(static_cast<std::size_t>(o) * f + c) * 9 +
                                ky * 3 + kx]) *
                     static_cast<double>(dp[o]);
            }
          }
        }
        dap[c] = static_cast<T>(acc);
      }
    }
  }

  // Stage-A injection, then tanh.
  std::vector<T> da = plan.at_stage_a
                          ? point_transform_grad(da_inj, pixels, f,
                                                 *plan.at_stage_a)
                          : da_inj;
  for (int i = 0; i < pixels * f; ++i) {
    const double t = static_cast<double>(act.a[i]);
    da[i] = static_cast<T>(static_cast<double>(da[i]) * (1.0 - t * t));
  }

  // Conv1x1 backward into stage-A weights.
  const auto& x = image.data();
  for (int o = 0; o < f; ++o) {
    double dbias = 0.0;
    for (int p = 0; p < pixels; ++p) {
      dbias += static_cast<double>(da[static_cast<std::size_t>(p) * f + o]);
    }
    g.ba[o] = static_cast<T>(dbias);
  }
  for (int o = 0; o < f; ++o) {
    for (int c = 0; c < net.in_channels; ++c) {
      double acc = 0.0;
      for (int p = 0; p < pixels; ++p) {
        acc += static_cast<double>(da[static_cast<std::size_t>(p) * f + o]) *
               static_cast<double>(
                   x[static_cast<std::size_t>(p) * net.in_channels + c]);
      }
      g.wa[static_cast<std::size_t>(o) * net.in_channels + c] =
          static_cast<T>(acc);
    }
  }

  return g;
}

}  // namespace wedge::detail
