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

#include "bcsched/channel.hpp"
#include "bcsched/model.hpp"

namespace bcsched {

// Reference solver: an outer bisection on the completion time around an
// exhaustive grid search over per-epoch bit splits.  Shares no code with
// the descent solver, so the two can check each other.
struct OracleConfig {
  // Initial grid step as a fraction of each user's total bits.
  double grid_resolution = 1.0 / 64.0;
  // How many times the grid is shrunk around the best split found so far.
  int refinement_rounds = 4;
  // Bisection stops once the bracket is this wide; <= 0 picks a relative
  // width from the bracket itself.
  double T_tolerance = 0.0;
};

// Minimum completion time by brute force.  Throws OracleSizeError beyond
// four epochs and InfeasibleInstanceError when no finite time works.
double oracle_min_time(const Instance& inst, const OracleConfig& cfg = {});

// Minimum completion time when one user has the channel alone; `user`
// selects the gain (1 or 2).  Exact: each feasibility probe builds the
// constant-rate profile that tightens against the binding arrival
// constraints, so no grid is involved.
double oracle_single_user(const StepCurve& energy, const StepCurve& bits,
                          const ChannelParams& ch, int user);

}  // namespace bcsched
