// Copyright 2026 The torusreal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <iostream>

#include "CLI11.hpp"
#include "torusreal/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Real structures on principal torus bundles over tori"};
  app.require_subcommand(1);
  torusreal::JobSpec spec;
  std::string format = "human";
  for (auto name : torusreal::kCommands) {
    CLI::App* sub = app.add_subcommand(std::string(name));
    sub->add_option("input", spec.input_path, "job file")->required();
    sub->add_option("--seed", spec.seed, "random seed")->capture_default_str();
    sub->add_option("--tol", spec.tolerance, "residual and lattice-membership threshold");
    sub->add_option("--samples", spec.samples, "number of samples")->capture_default_str();
    sub->add_option("--out", spec.output_path, "write the report here");
    sub->add_option("--format", format, "human or machine")
        ->check(CLI::IsMember({"human", "machine"}))
        ->capture_default_str();
    sub->callback([&spec, sub] { spec.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? torusreal::kSuccess : torusreal::kInputFailure;
  }
  spec.format = format == "machine" ? torusreal::OutputFormat::machine : torusreal::OutputFormat::human;
  return torusreal::run(spec, std::cout, std::cerr);
}
