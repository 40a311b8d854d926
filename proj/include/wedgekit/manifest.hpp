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

#include <optional>
#include <string>
#include <vector>

#include "wedgekit/types.hpp"

namespace wedge {

/// One JSON-lines manifest record: a local path or a URL, a split tag, and
/// an optional license note (recorded, not enforced).
struct ManifestRecord {
  std::string location;  // path or url, unique across the manifest
  bool is_url = false;
  std::string split;     // source | web | target
  std::string note;
};

struct CorpusManifest {
  std::vector<ManifestRecord> records;
};

/// Parses a JSON-lines manifest. Malformed lines raise IoError naming the
/// line number; duplicate locations and unknown splits raise
/// ValidationError.
CorpusManifest load_manifest(const std::string& path);

void save_manifest(const std::string& path, const CorpusManifest& manifest);

struct CorpusEntry {
  ManifestRecord record;
  std::optional<FeatureMap> image;  // empty on failure
  std::string error;                // per-record failure, never aborts a batch
};

struct FetchOptions {
  /// Cache directory for downloaded bodies; the WEDGE_KIT_CACHE environment
  /// variable overrides it.
  std::string cache_dir;
  int max_connections = 4;
  int retries = 3;
  /// Base backoff in milliseconds, doubled per attempt.
  int backoff_ms = 250;
  /// Base directory local relative paths resolve against.
  std::string base_dir = ".";
};

/// Resolves every record to a decoded image, downloading URLs through the
/// cache. Failures land in the entry's error field.
std::vector<CorpusEntry> fetch_corpus(const CorpusManifest& manifest,
                                      const FetchOptions& options);

}  // namespace wedge
