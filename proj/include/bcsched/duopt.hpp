// Copyright 2026 The bcsched Authors
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

#include <vector>

#include "bcsched/model.hpp"

namespace bcsched {

struct SolverConfig {
  // Stop once a full sweep reduces completion time by no more than this.
  // Zero means relative: 1e-9 times the initial completion time.
  double epsilon = 0.0;
  int max_iterations = 10000;
  // Length of the trailing epoch.  Zero means automatic: the duration of
  // the initial schedule's single transmitting block.  A shorter explicit
  // value is ignored (the initial schedule must fit).
  double horizon_hint = 0.0;
  // Re-run the feasibility checker after every sweep.  Debug aid; a
  // violation raises std::logic_error.
  bool validate_each_sweep = false;
};

// Per-sweep record of the descent.
struct IterationTrace {
  // completion_times[0] is the initial schedule's; one more per sweep.
  std::vector<double> completion_times;
  // Flag position after each sweep: index of the last pair optimized for
  // energy (1-based over pairs, 0 while unset).  Nondecreasing.
  std::vector<int> flags;
  // Active-constraint pattern index chosen for each pair, per sweep.
  std::vector<std::vector<int>> pair_patterns;
  bool converged = false;
  int sweeps = 0;
};

struct SolveResult {
  Schedule schedule;
  IterationTrace trace;
};

// Feasible starting point: silent before the last arrival, then one block
// at constant power and rates carrying all traffic over the shortest
// duration the total harvest affords.  Throws InfeasibleInstanceError when
// no finite completion time exists.
Schedule initial_schedule(const Instance& inst);

// Block-coordinate descent over consecutive epoch pairs.  Pairs at or
// before the Flag minimize pair energy (excess pushed past the pair);
// later pairs minimize pair completion time.  The Flag advances to a pair
// once it saturates both users' availability caps.  Stops when a sweep no
// longer improves completion time by more than epsilon, or after
// max_iterations sweeps (converged = false in the trace).
SolveResult solve(const Instance& inst, const SolverConfig& cfg = {});

// Normalizes a schedule so zero-power time appears only after the final
// positive-power instant.  Does not move traffic.
Schedule compact_gaps(const Schedule& sched);

}  // namespace bcsched
