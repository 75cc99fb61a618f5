// Copyright 2026 The BPDS Authors
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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bpds/errors.hpp"
#include "bpds/sim.hpp"

namespace {

using bpds::Errc;
using bpds::Error;

std::optional<std::string> read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int do_run(const std::string& scenario_path, std::optional<uint64_t> seed,
           std::optional<std::string> profile, std::string out_dir) {
  bpds::sim::Scenario scenario;
  try {
    scenario = bpds::sim::Scenario::load(scenario_path);
    if (seed) scenario.seed = *seed;
    if (profile) scenario.profile = *profile;
    scenario.validate();
  } catch (const Error& e) {
    std::cerr << "scenario: " << e.what() << "\n";
    return 2;
  }

  if (out_dir.empty()) out_dir = "artifacts/" + scenario.name;

  bpds::sim::RunOutput out;
  try {
    out = bpds::sim::run_scenario(scenario);
    bpds::sim::write_artifacts(out, out_dir);
  } catch (const Error& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 3;
  }

  for (const auto& [name, bytes] : out.files) {
    if (name == "summary.txt") {
      std::cout << std::string(bytes.begin(), bytes.end());
    }
  }
  std::cout << "artifacts: " << out_dir << "\n";

  if (!out.ok) {
    std::cerr << "invariant violated: " << out.failure << "\n";
    return 3;
  }
  return 0;
}

int do_inspect(const std::string& dir, const std::string& what, const std::string& actor) {
  std::filesystem::path base(dir);

  if (what == "chain" || what == "credits") {
    std::string name = what == "chain" ? "chain.txt" : "credits.txt";
    auto text = read_text(base / name);
    if (!text) {
      std::cerr << "missing artifact: " << name << "\n";
      return 4;
    }
    std::cout << *text;
    return 0;
  }

  // logs: the per-contract execution records, one section per patient.
  auto text = read_text(base / "execution_log.txt");
  if (!text) {
    std::cerr << "missing artifact: execution_log.txt\n";
    return 4;
  }
  if (actor.empty()) {
    std::cout << *text;
    return 0;
  }

  std::istringstream in(*text);
  std::string line;
  bool in_section = false;
  bool matched = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      in_section = line.find("patient=" + actor) != std::string::npos;
      matched = matched || in_section;
    }
    if (in_section) std::cout << line << "\n";
  }
  if (!matched) {
    std::cerr << "no log section for actor '" << actor << "'\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BPDS chain simulator: run scenarios, inspect and verify artifacts"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> profile;
  std::string out_dir;
  CLI::App* run = app.add_subcommand("run", "Execute a scenario and write its artifacts");
  run->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--profile", profile, "Override the group profile")
      ->check(CLI::IsMember({"test", "production"}));
  run->add_option("--out", out_dir, "Artifact directory (default artifacts/<name>)");

  std::string inspect_dir;
  std::string what = "chain";
  std::string actor;
  CLI::App* inspect = app.add_subcommand("inspect", "Print one artifact from a run directory");
  inspect->add_option("dir", inspect_dir, "Artifact directory")->required();
  inspect->add_option("--what", what, "chain, credits, or logs")
      ->check(CLI::IsMember({"chain", "credits", "logs"}));
  inspect->add_option("--actor", actor, "Restrict logs to one patient's contract");

  std::string verify_dir;
  CLI::App* verify = app.add_subcommand("verify", "Re-check a run directory's artifacts");
  verify->add_option("dir", verify_dir, "Artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (run->parsed()) return do_run(scenario_path, seed, profile, out_dir);
  if (inspect->parsed()) return do_inspect(inspect_dir, what, actor);
  if (verify->parsed()) return bpds::sim::verify_artifacts(verify_dir, std::cout);
  return 2;
}
