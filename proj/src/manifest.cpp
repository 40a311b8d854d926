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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "wedgekit/manifest.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "wedgekit/errors.hpp"
#include "wedgekit/image_io.hpp"

namespace wedge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kSplits = {"source", "web", "target"};

struct ParsedUrl {
  std::string scheme_host;  // e.g. "http://host:8080"
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw IoError("bad url: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string cache_key(const std::string& url) {
  // FNV-1a over the url plus a readable tail.
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : url) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::string tail;
  for (auto it = url.rbegin(); it != url.rend() && tail.size() < 24; ++it) {
    const char c = *it;
    tail.insert(tail.begin(),
                (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_');
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx_",
                static_cast<unsigned long long>(h));
  return buf + tail;
}

std::vector<std::uint8_t> download(const std::string& url, int retries,
                                   int backoff_ms) {
  const ParsedUrl parsed = split_url(url);
  std::string last_error = "no attempts made";
  for (int attempt = 0; attempt < retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(backoff_ms << (attempt - 1)));
    }
    httplib::Client client(parsed.scheme_host);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    client.set_follow_location(true);
    auto res = client.Get(parsed.path);
    if (!res) {
      last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status != 200) {
      last_error = "http status " + std::to_string(res->status);
      continue;
    }
    return {res->body.begin(), res->body.end()};
  }
  throw IoError(url + ": " + last_error);
}

std::vector<std::uint8_t> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

CorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);

  CorpusManifest manifest;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError("manifest " + path + " line " + std::to_string(line_no) +
                    ": " + e.what());
    }
    ManifestRecord r;
    if (record.contains("path")) {
      r.location = record["path"].get<std::string>();
      r.is_url = false;
    } else if (record.contains("url")) {
      r.location = record["url"].get<std::string>();
      r.is_url = true;
    } else {
      throw IoError("manifest " + path + " line " + std::to_string(line_no) +
                    ": record needs a path or url field");
    }
    if (!record.contains("split")) {
      throw IoError("manifest " + path + " line " + std::to_string(line_no) +
                    ": record needs a split field");
    }
    r.split = record["split"].get<std::string>();
    if (kSplits.count(r.split) == 0) {
      throw ValidationError("manifest " + path + " line " +
                            std::to_string(line_no) + ": unknown split '" +
                            r.split + "'");
    }
    if (record.contains("note")) r.note = record["note"].get<std::string>();
    if (!seen.insert(r.location).second) {
      throw ValidationError("manifest " + path + " line " +
                            std::to_string(line_no) + ": duplicate entry '" +
                            r.location + "'");
    }
    manifest.records.push_back(std::move(r));
  }
  return manifest;
}

void save_manifest(const std::string& path, const CorpusManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + path);
  for (const auto& r : manifest.records) {
    json record;
    record[r.is_url ? "url" : "path"] = r.location;
    record["split"] = r.split;
    if (!r.note.empty()) record["note"] = r.note;
    out << record.dump() << "\n";
  }
}

std::vector<CorpusEntry> fetch_corpus(const CorpusManifest& manifest,
                                      const FetchOptions& options) {
  std::string cache_dir = options.cache_dir;
  if (const char* env = std::getenv("WEDGE_KIT_CACHE")) {
    cache_dir = env;
  }

  std::vector<CorpusEntry> entries(manifest.records.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    entries[i].record = manifest.records[i];
  }

  auto process = [&](CorpusEntry& entry) {
    try {
      std::vector<std::uint8_t> bytes;
      if (entry.record.is_url) {
        fs::path cached;
        if (!cache_dir.empty()) {
          fs::create_directories(cache_dir);
          cached = fs::path(cache_dir) / cache_key(entry.record.location);
        }
        if (!cached.empty() && fs::exists(cached)) {
          bytes = read_all(cached.string());
        } else {
          bytes = download(entry.record.location, options.retries,
                           options.backoff_ms);
          if (!cached.empty()) {
            std::ofstream out(cached, std::ios::binary);
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
          }
        }
      } else {
        fs::path p(entry.record.location);
        if (p.is_relative()) p = fs::path(options.base_dir) / p;
        bytes = read_all(p.string());
      }
      entry.image = decode_image_png(bytes);
    } catch (const Error& e) {
      entry.error = e.what();
    }
  };

  const int workers =
      std::max(1, std::min<int>(options.max_connections,
                                static_cast<int>(entries.size())));
  if (workers <= 1) {
    for (auto& e : entries) process(e);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= entries.size()) return;
          process(entries[i]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return entries;
}

}  // namespace wedge
