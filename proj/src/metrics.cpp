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

#include "wedgekit/metrics.hpp"

#include <cstdio>
#include <numeric>

#include "wedgekit/errors.hpp"

namespace wedge {

ConfusionMatrix::ConfusionMatrix(int num_classes) : num_classes_(num_classes) {
  if (num_classes_ < 1) {
    throw ConfigError("ConfusionMatrix: num_classes must be >= 1");
  }
  counts_.assign(static_cast<std::size_t>(num_classes_) * num_classes_, 0);
}

void ConfusionMatrix::accumulate(const LabelMap& pred, const LabelMap& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) {
    throw ShapeError("ConfusionMatrix: prediction/ground truth shape mismatch");
  }
  const auto& pe = pred.entries();
  const auto& ge = gt.entries();
  for (std::size_t i = 0; i < ge.size(); ++i) {
    if (ge[i] == kIgnoreLabel) continue;
    if (ge[i] >= num_classes_) {
      throw ValidationError("ConfusionMatrix: ground-truth class out of range");
    }
    if (pe[i] >= num_classes_) {
      throw ValidationError("ConfusionMatrix: predicted class out of range");
    }
    ++counts_[static_cast<std::size_t>(ge[i]) * num_classes_ + pe[i]];
    ++total_;
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.num_classes_ != num_classes_) {
    throw ShapeError("ConfusionMatrix: merge class-count mismatch");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
  }
  total_ += other.total_;
}

IouReport miou(const ConfusionMatrix& cm) {
  if (cm.total() == 0) {
    throw EvalError("miou: confusion matrix is empty");
  }
  const int k = cm.num_classes();
  IouReport report;
  report.per_class.resize(k);
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    const std::int64_t tp = cm.at(c, c);
    std::int64_t fp = 0, fn = 0;
    for (int o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += cm.at(o, c);
      fn += cm.at(c, o);
    }
    const std::int64_t denom = tp + fp + fn;
    if (denom == 0) continue;  // class absent from both gt and predictions
    const double iou = static_cast<double>(tp) / static_cast<double>(denom);
    report.per_class[c] = iou;
    sum += iou;
    ++present;
  }
  report.mean = present > 0 ? sum / present : 0.0;
  return report;
}

PseudoQuality pseudo_label_quality(const LabelMap& pseudo, const LabelMap& gt) {
  if (pseudo.height() != gt.height() || pseudo.width() != gt.width()) {
    throw ShapeError("pseudo_label_quality: shape mismatch");
  }
  const auto& pe = pseudo.entries();
  const auto& ge = gt.entries();
  std::size_t labeled = 0, judged = 0, correct = 0;
  for (std::size_t i = 0; i < pe.size(); ++i) {
    if (pe[i] == kIgnoreLabel) continue;
    ++labeled;
    if (ge[i] == kIgnoreLabel) continue;  // no ground truth to judge against
    ++judged;
    if (pe[i] == ge[i]) ++correct;
  }
  PseudoQuality q;
  q.coverage = static_cast<double>(labeled) / static_cast<double>(pe.size());
  if (judged > 0) {
    q.precision = static_cast<double>(correct) / static_cast<double>(judged);
  }
  return q;
}

namespace {

std::string format_iou(const std::optional<double>& iou) {
  if (!iou) return "absent";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *iou);
  return buf;
}

}  // namespace

std::string iou_report_csv(const IouReport& report,
                           const std::vector<std::string>& class_names) {
  std::string out = "class,iou\n";
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const std::string name =
        c < class_names.size() ? class_names[c] : "class" + std::to_string(c);
    out += name + "," + format_iou(report.per_class[c]) + "\n";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", report.mean);
  out += "mean,";
  out += buf;
  out += "\n";
  return out;
}

std::string iou_report_table(const IouReport& report,
                             const std::vector<std::string>& class_names) {
  std::string out;
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const std::string name =
        c < class_names.size() ? class_names[c] : "class" + std::to_string(c);
    char line[96];
    std::snprintf(line, sizeof(line), "  %-12s %s\n", name.c_str(),
                  format_iou(report.per_class[c]).c_str());
    out += line;
  }
  char line[96];
  std::snprintf(line, sizeof(line), "  %-12s %.6f\n", "mean", report.mean);
  out += line;
  return out;
}

}  // namespace wedge
