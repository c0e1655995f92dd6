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


#include "evortho/kv_file.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "evortho/error.hpp"
#include "evortho/text.hpp"

namespace evortho {

KeyValueFile KeyValueFile::parse(std::string_view text, std::string_view source) {
  KeyValueFile kv;
  kv.source_ = std::string(source);
  std::size_t line_no = 0;
  for (auto line : text::split(text, '\n')) {
    ++line_no;
    line = text::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(std::string(source) + ":" + std::to_string(line_no) +
                  ": expected 'key = value', got '" + std::string(line) + "'");
    }
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(std::string(source) + ":" + std::to_string(line_no) + ": empty key");
    }
    if (kv.contains(key)) {
      throw Error(std::string(source) + ":" + std::to_string(line_no) + ": duplicate key '" +
                  std::string(key) + "'");
    }
    kv.entries_.emplace_back(std::string(key), std::string(value));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValueFile::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << to_string();
  if (!out) throw Error("write failed: " + path.string());
}

std::string KeyValueFile::to_string() const {
  std::string s;
  for (const auto& [k, v] : entries_) {
    s += k;
    s += " = ";
    s += v;
    s += '\n';
  }
  return s;
}

std::vector<std::pair<std::string, std::string>>::const_iterator KeyValueFile::find(
    std::string_view key) const {
  return std::find_if(entries_.begin(), entries_.end(),
                      [&](const auto& e) { return e.first == key; });
}

bool KeyValueFile::contains(std::string_view key) const { return find(key) != entries_.end(); }

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  const auto it = find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueFile::get_string(std::string_view key, std::string_view fallback) const {
  const auto v = get(key);
  return v ? *v : std::string(fallback);
}

double KeyValueFile::get_double(std::string_view key, double fallback) const {
  const auto v = get(key);
  return v ? text::parse_double(*v, key) : fallback;
}

std::int64_t KeyValueFile::get_int(std::string_view key, std::int64_t fallback) const {
  const auto v = get(key);
  return v ? text::parse_int(*v, key) : fallback;
}

bool KeyValueFile::get_bool(std::string_view key, bool fallback) const {
  const auto v = get(key);
  return v ? text::parse_bool(*v, key) : fallback;
}

std::string KeyValueFile::require(std::string_view key) const {
  const auto v = get(key);
  if (!v) throw Error(source_ + ": missing key '" + std::string(key) + "'");
  return *v;
}

double KeyValueFile::require_double(std::string_view key) const {
  return text::parse_double(require(key), key);
}

std::int64_t KeyValueFile::require_int(std::string_view key) const {
  return text::parse_int(require(key), key);
}

void KeyValueFile::set(std::string_view key, std::string_view value) {
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = std::string(value);
      return;
    }
  }
  entries_.emplace_back(std::string(key), std::string(value));
}

void KeyValueFile::set_double(std::string_view key, double value) {
  set(key, text::format_double(value));
}

void KeyValueFile::set_int(std::string_view key, std::int64_t value) {
  set(key, std::to_string(value));
}

bool KeyValueFile::erase(std::string_view key) {
  const auto it = find(key);
  if (it == entries_.end()) return false;
  entries_.erase(it);
  return true;
}

}  // namespace evortho
