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

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace evortho {

// Minimal CSV for the container's numeric streams: one exact header line,
// comma-separated fields, no quoting.
class CsvReader {
 public:
  CsvReader(const std::filesystem::path& path, std::string_view expected_header);

  // Returns false at end of file. Throws evortho::Error on a wrong field count.
  bool next(std::vector<std::string>& fields);

  // 0-based data row index of the last row returned by next().
  std::size_t row() const { return row_ - 1; }
  std::string where() const;

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t columns_ = 0;
  std::size_t line_ = 1;
  std::size_t row_ = 0;
  std::string buf_;
};

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view header);
  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace evortho
