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
#include <optional>
#include <string>
#include <vector>

#include "wedgekit/types.hpp"

namespace wedge {

/// Pixel confusion counts; rows index ground truth, columns prediction.
/// Ground-truth ignore pixels are excluded. Merging is associative.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  int num_classes() const { return num_classes_; }
  std::int64_t at(int gt, int pred) const {
    return counts_[static_cast<std::size_t>(gt) * num_classes_ + pred];
  }
  std::int64_t total() const { return total_; }

  void accumulate(const LabelMap& pred, const LabelMap& gt);
  void merge(const ConfusionMatrix& other);

 private:
  int num_classes_ = 0;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> counts_;
};

struct IouReport {
  /// Per-class IoU; absent when the class never occurs (zero denominator).
  std::vector<std::optional<double>> per_class;
  double mean = 0.0;
};

/// IoU_c = TP / (TP + FP + FN) per class; the mean skips absent classes.
/// Throws EvalError on an empty matrix.
IouReport miou(const ConfusionMatrix& cm);

struct PseudoQuality {
  /// Fraction of labeled pseudo pixels matching ground truth; absent when
  /// nothing is labeled (or ground truth ignores every labeled pixel).
  std::optional<double> precision;
  double coverage = 0.0;
};

PseudoQuality pseudo_label_quality(const LabelMap& pseudo, const LabelMap& gt);

/// metrics CSV helpers: a header row followed by one row per class plus the
/// mean. Class names come from the experiment's class catalog.
std::string iou_report_csv(const IouReport& report,
                           const std::vector<std::string>& class_names);
std::string iou_report_table(const IouReport& report,
                             const std::vector<std::string>& class_names);

}  // namespace wedge
