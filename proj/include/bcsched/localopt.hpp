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

#include <optional>

#include "bcsched/channel.hpp"

namespace bcsched {

// Redistribution problem over two consecutive epochs.  The pair owns
// b?_total bits and E1+E2 joules; epoch-1 consumption is additionally
// capped by what has arrived before the pair's interior boundary and not
// been used by earlier epochs (e1_cap / b11_cap / b21_cap).
struct TwoEpochProblem {
  ChannelParams ch;
  double T1 = 0.0;      // first epoch length (fully usable)
  double T2_max = 0.0;  // second epoch length
  double E1 = 0.0;      // energy currently assigned to epoch 1
  double E2 = 0.0;      // energy currently assigned to epoch 2
  double E_next = 0.0;  // energy currently assigned to epoch 3 (energy objective)
  double b1_total = 0.0;
  double b2_total = 0.0;
  double e1_cap = 0.0;
  double b11_cap = 0.0;
  double b21_cap = 0.0;
};

// Which epoch-1 constraints are treated as active (equalities).
struct CasePattern {
  bool energy_active = false;
  bool b1_active = false;
  bool b2_active = false;

  int index() const {
    return 4 * static_cast<int>(energy_active) + 2 * static_cast<int>(b1_active) +
           static_cast<int>(b2_active);
  }
  int active_count() const {
    return static_cast<int>(energy_active) + static_cast<int>(b1_active) +
           static_cast<int>(b2_active);
  }
};

enum class Objective { kTime, kEnergy };

struct EpochRates {
  double power = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

struct TwoEpochSolution {
  EpochRates epoch1;
  EpochRates epoch2;
  double active1 = 0.0;     // transmitting time inside epoch 1 (== T1 unless
                            // the pair completes inside epoch 1)
  double T2_used = 0.0;     // transmitting time inside epoch 2
  double E_transfer = 0.0;  // pair energy left unconsumed
  CasePattern pattern;

  double consumed1() const { return epoch1.power * active1; }
  double consumed2() const { return epoch2.power * T2_used; }
  double consumed() const { return consumed1() + consumed2(); }
  double b11() const { return epoch1.r1 * active1; }
  double b21() const { return epoch1.r2 * active1; }
  double completion() const {
    return (T2_used > 0.0) ? /* full first epoch */ active1 + T2_used : active1;
  }
};

// Solves the equality-constrained system implied by `pattern` for the given
// objective.  Returns nothing when the system is inconsistent or leaves the
// feasible set.  Sub-cases where a free variable lands on a box bound are
// resolved internally; the best feasible sub-candidate is returned.
std::optional<TwoEpochSolution> solve_case(const TwoEpochProblem& p,
                                           CasePattern pattern, Objective obj);

// Least completion time for the pair's traffic.  Considers all 2^3
// active-constraint patterns plus the completes-inside-epoch-1 regime and
// returns the best feasible candidate.  Throws PairInfeasibleError when the
// pair cannot carry its own traffic (never reachable from a feasible
// schedule state).
TwoEpochSolution minimize_time(const TwoEpochProblem& p);

// Least total energy delivering the pair's traffic over both full epochs;
// the unconsumed remainder (E_transfer) is meant to be pushed to the epoch
// after the pair.
TwoEpochSolution minimize_energy(const TwoEpochProblem& p);

// Scalar bisection for the only-b1-active pattern under the time objective:
// constant total power E/(T1+T2), stronger bits pinned at b11_cap in epoch 1,
// weaker bits as a monotone increasing function of T2.  Returns the epoch-2
// duration delivering exactly b2_total.  Throws std::out_of_range when the
// target is unreachable within [0, T2_max].
double bisect_T2_b1_active(const TwoEpochProblem& p);

}  // namespace bcsched
