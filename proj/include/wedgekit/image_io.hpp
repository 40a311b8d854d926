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

#include "wedgekit/types.hpp"

namespace wedge {

/// 8-bit RGB PNG -> float feature map in [0, 1] with 3 channels.
FeatureMap read_image_png(const std::string& path);

/// Float [0, 1] 3-channel map -> 8-bit RGB PNG (values clamped and rounded).
void write_image_png(const std::string& path, const FeatureMap& image);

/// 8-bit single-channel PNG; the ignore sentinel is 255.
LabelMap read_label_png(const std::string& path);
void write_label_png(const std::string& path, const LabelMap& labels);

/// In-memory decode used by the corpus fetcher.
FeatureMap decode_image_png(const std::vector<std::uint8_t>& bytes);

}  // namespace wedge
