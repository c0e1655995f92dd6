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


#include "evortho/csv.hpp"

#include "evortho/error.hpp"
#include "evortho/text.hpp"

namespace evortho {

CsvReader::CsvReader(const std::filesystem::path& path, std::string_view expected_header)
    : path_(path), in_(path) {
  if (!in_) throw Error("cannot open " + path.string());
  std::string header;
  if (!std::getline(in_, header)) throw Error(path.string() + ": missing header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != expected_header) {
    throw Error(path.string() + ": unexpected header '" + header + "', expected '" +
                std::string(expected_header) + "'");
  }
  columns_ = text::split(expected_header, ',').size();
}

bool CsvReader::next(std::vector<std::string>& fields) {
  while (std::getline(in_, buf_)) {
    ++line_;
    if (!buf_.empty() && buf_.back() == '\r') buf_.pop_back();
    if (text::trim(buf_).empty()) continue;
    fields.clear();
    for (auto f : text::split(buf_, ',')) fields.emplace_back(f);
    ++row_;
    if (fields.size() != columns_) {
      throw Error(where() + ": expected " + std::to_string(columns_) + " fields, got " +
                  std::to_string(fields.size()));
    }
    return true;
  }
  return false;
}

std::string CsvReader::where() const { return path_.string() + ":" + std::to_string(line_); }

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view header)
    : path_(path), out_(path, std::ios::trunc) {
  if (!out_) throw Error("cannot write " + path.string());
  out_ << header << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw Error("write failed: " + path_.string());
}

}  // namespace evortho
