// Copyright 2026 The evortho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evortho {

// Line-oriented `key = value` text, shared by recording manifests,
// calibration files and pipeline configs. `#` starts a comment line.
// Insertion order is preserved so that saved files are deterministic.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::string_view text, std::string_view source = "<text>");
  static KeyValueFile load(const std::filesystem::path& path);

  void save(const std::filesystem::path& path) const;
  std::string to_string() const;

  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;

  // Typed getters throw evortho::Error when present but malformed.
  std::string get_string(std::string_view key, std::string_view fallback) const;
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  // Throws evortho::Error if the key is absent.
  std::string require(std::string_view key) const;
  double require_double(std::string_view key) const;
  std::int64_t require_int(std::string_view key) const;

  void set(std::string_view key, std::string_view value);
  void set_double(std::string_view key, double value);
  void set_int(std::string_view key, std::int64_t value);
  bool erase(std::string_view key);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string source() const { return source_; }

 private:
  std::vector<std::pair<std::string, std::string>>::const_iterator find(std::string_view key) const;

  std::vector<std::pair<std::string, std::string>> entries_;
  std::string source_ = "<text>";
};

}  // namespace evortho
