// Copyright 2026 The DRF Planner Authors
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

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "drf/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Risk-field corridor trajectory planner"};
  app.require_subcommand(1);
  drf::CommandOptions opt;
  int runs = 0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "scenario configuration file")->required();
    sub->add_option("--out", opt.out, "output directory")->required();
    sub->add_option("--runs", runs, "number of seeded runs (simulate, sweep)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "base seed, overrides scenario.seed");
    sub->add_flag("--dry-run", opt.dry_run, "validate and echo the effective config only");
  };
  CLI::App* plan = app.add_subcommand("plan", "single open-loop solve");
  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop run");
  CLI::App* render = app.add_subcommand("render", "SVG figures from a plan or simulation directory");
  CLI::App* sweep = app.add_subcommand("sweep", "seeded Monte Carlo runs");
  for (CLI::App* sub : {plan, simulate, render, sweep}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : drf::kExitConfig;
  }
  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--runs") > 0) opt.runs = runs;
  if (chosen->count("--seed") > 0) opt.seed = seed;

  if (chosen == plan) return drf::cmd_plan(opt, std::cout, std::cerr);
  if (chosen == simulate) return drf::cmd_simulate(opt, std::cout, std::cerr);
  if (chosen == render) return drf::cmd_render(opt, std::cout, std::cerr);
  return drf::cmd_sweep(opt, std::cout, std::cerr);
}
