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
#include <string>
#include <vector>

#include "evortho/kv_file.hpp"
#include "evortho/simulate.hpp"

namespace evortho::pipeline {

struct KeyInfo {
  std::string name;
  std::string default_value;  // empty: unset
  std::string help;
};

// Every accepted configuration key.
const std::vector<KeyInfo>& known_keys();
bool is_known_key(const std::string& key);

// Pipeline configuration: `key = value` text restricted to known keys, with
// defaults filled in.
class Config {
 public:
  Config();
  // ConfigError if the file is missing or names an unknown key.
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text);

  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  bool has(const std::string& key) const;

  std::filesystem::path recording() const;
  std::filesystem::path output() const;
  const KeyValueFile& values() const { return kv_; }

 private:
  KeyValueFile kv_;
};

enum class Stage { Sync, Gate, Keyframes, Reconstruct, Fuse, Export, Orthoproject };

const std::vector<Stage>& all_stages();
std::string to_string(Stage s);
Stage parse_stage(const std::string& s);

// Output layout under the output directory.
struct Layout {
  std::filesystem::path root;
  std::filesystem::path synced() const { return root / "synced"; }
  std::filesystem::path timeline() const { return root / "timeline.csv"; }
  std::filesystem::path keyframes() const { return root / "keyframes.csv"; }
  std::filesystem::path recon() const { return root / "recon"; }
  std::filesystem::path fused() const { return root / "fused"; }
  std::filesystem::path exported() const { return root / "export"; }
  std::filesystem::path ortho() const { return root / "ortho"; }
  std::filesystem::path log() const { return root / "stage_log.txt"; }
  std::filesystem::path partial() const { return root / ".partial"; }
};

struct KeyframeRow {
  std::size_t index = 0;
  std::int64_t t_ns = 0;         // time of the snapped RGB frame
  std::int64_t gnss_t_ns = 0;    // time of the selecting GNSS fix
  std::string frame;             // RGB file name
  double easting = 0.0;
  double northing = 0.0;
  int zone = 0;
};

void write_keyframes(const std::filesystem::path& csv, const std::vector<KeyframeRow>& rows);
std::vector<KeyframeRow> read_keyframes(const std::filesystem::path& csv);

// Runs one stage, reading earlier stage outputs from the output directory.
// Failures are rethrown as "stage <name>: <cause>" with a .partial marker
// left in the output directory.
void run_stage(Stage stage, const Config& cfg);
// All stages in order; orthoproject only when ortho.enabled.
void run_pipeline(const Config& cfg);

// sim.* keys on top of the named preset.
sim::SimConfig sim_config(const Config& cfg);
sim::SimResult run_simulation(const Config& cfg);

}  // namespace evortho::pipeline
