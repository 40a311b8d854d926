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

#include "wedgekit/types.hpp"

#include <cmath>
#include <string>

#include "wedgekit/errors.hpp"

namespace wedge {

namespace {

void check_finite(const std::vector<float>& data, const char* what) {
  for (float v : data) {
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(what) + ": non-finite value");
    }
  }
}

}  // namespace

FeatureMap::FeatureMap(int height, int width, int channels,
                       std::vector<float> data)
    : height_(height), width_(width), channels_(channels),
      data_(std::move(data)) {
  if (height_ < 1 || width_ < 1 || channels_ < 1) {
    throw ShapeError("FeatureMap: height, width, channels must all be >= 1");
  }
  if (data_.size() != static_cast<std::size_t>(height_) * width_ * channels_) {
    throw ShapeError("FeatureMap: data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(height_) + "x" +
                     std::to_string(width_) + "x" + std::to_string(channels_));
  }
  check_finite(data_, "FeatureMap");
}

FlatFeatures::FlatFeatures(int count, int channels, std::vector<float> data)
    : count_(count), channels_(channels), data_(std::move(data)) {
  if (count_ < 1 || channels_ < 1) {
    throw ShapeError("FlatFeatures: count and channels must be >= 1");
  }
  if (data_.size() != static_cast<std::size_t>(count_) * channels_) {
    throw ShapeError("FlatFeatures: data length does not match count*channels");
  }
  check_finite(data_, "FlatFeatures");
}

ProbabilityMap::ProbabilityMap(int height, int width, int num_classes,
                               std::vector<float> data)
    : height_(height), width_(width), num_classes_(num_classes),
      data_(std::move(data)) {
  if (height_ < 1 || width_ < 1 || num_classes_ < 1) {
    throw ShapeError("ProbabilityMap: dimensions must be >= 1");
  }
  if (data_.size() !=
      static_cast<std::size_t>(height_) * width_ * num_classes_) {
    throw ShapeError("ProbabilityMap: data length mismatch");
  }
  const std::size_t pixels = static_cast<std::size_t>(height_) * width_;
  for (std::size_t p = 0; p < pixels; ++p) {
    double sum = 0.0;
    for (int k = 0; k < num_classes_; ++k) {
      float v = data_[p * num_classes_ + k];
      if (!(v >= 0.0f) || v > 1.0f + 1e-6f) {
        throw ValidationError("ProbabilityMap: entry outside [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw ValidationError(
          "ProbabilityMap: pixel " + std::to_string(p) +
          " probabilities sum to " + std::to_string(sum) + ", not 1");
    }
  }
}

LabelMap::LabelMap(int height, int width, std::vector<std::uint8_t> entries)
    : height_(height), width_(width), entries_(std::move(entries)) {
  if (height_ < 1 || width_ < 1) {
    throw ShapeError("LabelMap: height and width must be >= 1");
  }
  if (entries_.size() != static_cast<std::size_t>(height_) * width_) {
    throw ShapeError("LabelMap: entry count does not match height*width");
  }
}

std::size_t LabelMap::count_labeled() const {
  std::size_t n = 0;
  for (std::uint8_t e : entries_) {
    if (e != kIgnoreLabel) ++n;
  }
  return n;
}

void LabelMap::validate_classes(int num_classes) const {
  for (std::uint8_t e : entries_) {
    if (e != kIgnoreLabel && e >= num_classes) {
      throw ValidationError("LabelMap: class id " + std::to_string(e) +
                            " >= num_classes " + std::to_string(num_classes));
    }
  }
}

FlatFeatures flatten(const FeatureMap& map) {
  // Row-major (row, col, channel) storage already matches the flat layout.
  return FlatFeatures(map.height() * map.width(), map.channels(), map.data());
}

FeatureMap unflatten(const FlatFeatures& rows, int height, int width) {
  if (height < 1 || width < 1 ||
      rows.count() != height * width) {
    throw ShapeError("unflatten: rows.count " + std::to_string(rows.count()) +
                     " does not equal " + std::to_string(height) + "x" +
                     std::to_string(width));
  }
  return FeatureMap(height, width, rows.channels(), rows.data());
}

}  // namespace wedge
