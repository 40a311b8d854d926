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
#include <vector>

namespace wedge {

/// Sentinel class id for pixels excluded from losses and evaluation.
inline constexpr std::uint8_t kIgnoreLabel = 255;

/// Dense per-pixel feature tensor at one network layer. Storage is float,
/// row-major over (row, col, channel). Immutable after construction.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int height, int width, int channels, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }

  float at(int row, int col, int ch) const {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * channels_ +
                 ch];
  }

  /// Channel vector of one pixel.
  std::span<const float> pixel(int row, int col) const {
    return {data_.data() +
                (static_cast<std::size_t>(row) * width_ + col) * channels_,
            static_cast<std::size_t>(channels_)};
  }

  const std::vector<float>& data() const { return data_; }

 private:
  int height_ = 0, width_ = 0, channels_ = 0;
  std::vector<float> data_;
};

/// Feature map flattened to per-pixel rows: count x channels, one feature
/// vector per row (row i*W+j holds pixel (i, j)).
class FlatFeatures {
 public:
  FlatFeatures() = default;
  FlatFeatures(int count, int channels, std::vector<float> data);

  int count() const { return count_; }
  int channels() const { return channels_; }

  std::span<const float> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * channels_,
            static_cast<std::size_t>(channels_)};
  }

  const std::vector<float>& data() const { return data_; }

 private:
  int count_ = 0, channels_ = 0;
  std::vector<float> data_;
};

/// Per-pixel class probability simplex. Every pixel's class vector must sum
/// to 1 within 1e-6 with all entries in [0, 1]; construction enforces this.
class ProbabilityMap {
 public:
  ProbabilityMap() = default;
  ProbabilityMap(int height, int width, int num_classes,
                 std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int num_classes() const { return num_classes_; }

  std::span<const float> pixel(int row, int col) const {
    return {data_.data() +
                (static_cast<std::size_t>(row) * width_ + col) * num_classes_,
            static_cast<std::size_t>(num_classes_)};
  }

  const std::vector<float>& data() const { return data_; }

 private:
  int height_ = 0, width_ = 0, num_classes_ = 0;
  std::vector<float> data_;
};

/// Per-pixel class ids with kIgnoreLabel marking unsupervised pixels.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int height, int width, std::vector<std::uint8_t> entries);

  int height() const { return height_; }
  int width() const { return width_; }

  std::uint8_t at(int row, int col) const {
    return entries_[static_cast<std::size_t>(row) * width_ + col];
  }

  const std::vector<std::uint8_t>& entries() const { return entries_; }

  std::size_t count_labeled() const;

  /// Throws ValidationError if any non-ignore entry is >= num_classes.
  void validate_classes(int num_classes) const;

 private:
  int height_ = 0, width_ = 0;
  std::vector<std::uint8_t> entries_;
};

FlatFeatures flatten(const FeatureMap& map);

/// Inverse of flatten. Throws ShapeError when rows.count != height * width.
FeatureMap unflatten(const FlatFeatures& rows, int height, int width);

}  // namespace wedge
