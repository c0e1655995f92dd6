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


#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "evortho/error.hpp"
#include "evortho/eval.hpp"
#include "evortho/parallel.hpp"
#include "evortho/pipeline.hpp"
#include "evortho/text.hpp"

namespace {

using namespace evortho;

struct Common {
  std::string config;
  std::string recording;
  std::string output;
  unsigned threads = 0;
  std::map<std::string, std::vector<CLI::Option*>> keys;
  std::map<std::string, std::string> values;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "key = value configuration file");
  sub->add_option("--recording", c.recording, "recording directory (config key 'recording')");
  sub->add_option("--out", c.output, "output directory (config key 'output')");
  sub->add_option("--threads", c.threads, "worker thread cap, 0 = all cores");
  for (const auto& k : pipeline::known_keys()) {
    if (k.name == "recording" || k.name == "output") continue;
    c.keys[k.name].push_back(sub->add_option("--" + k.name, c.values[k.name], k.help));
  }
}

pipeline::Config build_config(const Common& c) {
  auto cfg = c.config.empty() ? pipeline::Config() : pipeline::Config::load(c.config);
  for (const auto& [name, opts] : c.keys) {
    for (const auto* opt : opts) {
      if (opt->count() > 0) cfg.set(name, c.values.at(name));
    }
  }
  if (!c.recording.empty()) cfg.set("recording", c.recording);
  if (!c.output.empty()) cfg.set("output", c.output);
  set_thread_limit(c.threads);
  return cfg;
}

void print_log(const pipeline::Config& cfg, const std::string& stage) {
  std::ifstream in(pipeline::Layout{cfg.output()}.log());
  std::string line;
  while (std::getline(in, line)) {
    if (stage.empty() || line.starts_with("stage=" + stage + " ")) std::cout << line << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline event-camera aerial mapping pipeline", "evortho"};
  app.set_version_flag("--version", std::string("evortho ") + EVORTHO_VERSION);
  app.require_subcommand(1, 1);

  Common common;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic recording at 'recording'");
  add_common(simulate, common);
  std::map<std::string, CLI::App*> stages;
  for (auto s : pipeline::all_stages()) {
    auto* sub = app.add_subcommand(pipeline::to_string(s), "run the " + pipeline::to_string(s) + " stage");
    add_common(sub, common);
    stages[pipeline::to_string(s)] = sub;
  }
  auto* run = app.add_subcommand("run", "run every stage in order");
  add_common(run, common);

  std::string test, ref, points, sequence = "sim", type = "Fused";
  bool masked = false;
  auto* evaluate = app.add_subcommand("evaluate", "compare an orthomap with a reference");
  evaluate->add_option("--test", test, "orthomap to evaluate")->required();
  evaluate->add_option("--ref", ref, "reference orthophoto")->required();
  evaluate->add_option("--points", points, "correspondences CSV (x_test,y_test,x_ref,y_ref)")->required();
  evaluate->add_option("--sequence", sequence, "sequence label for the report row");
  evaluate->add_option("--type", type, "type label for the report row");
  evaluate->add_flag("--masked", masked, "restrict metrics to nonzero test pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (evaluate->parsed()) {
      const auto r = eval::evaluate_orthomap(test, ref, points, masked);
      std::cout << eval::report_header() << '\n' << eval::report_row(sequence, type, r) << '\n';
      return r.failed ? 1 : 0;
    }
    const auto cfg = build_config(common);
    if (simulate->parsed()) {
      const auto r = pipeline::run_simulation(cfg);
      std::cout << "simulated " << cfg.recording().string() << ": "
                << text::format_fixed(r.trajectory.duration(), 2) << " s, " << r.event_count << " events, "
                << r.dropped_events << " dropped\n";
      return 0;
    }
    if (run->parsed()) {
      pipeline::run_pipeline(cfg);
      print_log(cfg, "");
      return 0;
    }
    for (const auto& [name, sub] : stages) {
      if (sub->parsed()) {
        pipeline::run_stage(pipeline::parse_stage(name), cfg);
        print_log(cfg, name);
      }
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "evortho: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "evortho: " << e.what() << '\n';
    return 1;
  }
}
