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

#ifndef DRF_COMMANDS_HPP_
#define DRF_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>

#include "drf/config.hpp"
#include "drf/planner.hpp"

namespace drf {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNonConverged = 2,
  kExitInfeasibleSeed = 3,
  kExitCollision = 4,
};

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
};

/// Loads the config with command-line overrides applied before defaults
/// are resolved, so the echoed document reflects them.
ConfigDocument load_with_overrides(const CommandOptions& opt);

/// Solver dynamics for a run: the bicycle model, or its linearization at the
/// initial speed for the lq_oracle type.
std::unique_ptr<Dynamics> make_dynamics(const RunConfig& rc);

/// Workers used by sweeps: PLANNER_THREADS when set, else the hardware count.
int sweep_workers();

int cmd_plan(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_render(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace drf

#endif  // DRF_COMMANDS_HPP_
