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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bcsched/model.hpp"

namespace bcsched {

// True when every weaker-user bit arrives at t = 0 (vacuously true with no
// weaker-user traffic).  The regime where the full structural battery and
// the uniqueness probe apply.
bool is_wufbc(const Instance& inst);

struct CheckResult {
  std::string check;
  bool applicable = true;
  bool pass = true;
  // Worst margin seen; negative values measure the violation.
  double slack = 0.0;
  std::string detail;
};

// One strict increase of power (or of the stronger user's rate) at an
// epoch boundary, with the conditions that justify it.
struct RiseRecord {
  std::size_t epoch = 0;  // the epoch the rise leads into
  double time = 0.0;
  double before_level = 0.0;
  double after_level = 0.0;
  std::vector<std::string> licenses;
  bool licensed = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  std::vector<RiseRecord> power_rises;
  std::vector<RiseRecord> rate_rises;

  bool clean() const;
  const CheckResult* find(const std::string& name) const;
};

// Structural battery over a schedule: epoch activity shape, power
// monotonicity, licensing of every power rise, the stronger user's rate
// staircase (only when is_wufbc holds; otherwise reported not-applicable),
// full energy use at the completion time, and the per-rise backlog/energy
// implications.  Failures land in the report; nothing throws.
VerificationReport verify_structure(const Instance& inst, const Schedule& sched,
                                    double tol = 1e-6);

struct ProbeSpec {
  int count = 100;
  // Fraction of an epoch's bit load moved by one perturbation.
  double magnitude = 0.05;
  std::uint64_t seed = 1;
};

struct ProbeOutcome {
  std::string description;
  bool feasible = false;  // a feasible distinct allocation falsifies
};

// Empirical uniqueness check: random bit transfers between adjacent
// transmitting epochs, rates rebuilt at unchanged durations.  Every
// perturbed allocation must break feasibility (the optimum admits no
// distinct equal-time rival).  Survivors are reported as falsifications.
struct ProbeReport {
  int attempted = 0;
  int noops = 0;
  int infeasible = 0;
  int falsifications = 0;
  std::vector<ProbeOutcome> survivors;

  bool clean() const { return falsifications == 0; }
};

ProbeReport certify_uniqueness_probe(const Instance& inst,
                                     const Schedule& sched,
                                     const ProbeSpec& spec = {});

}  // namespace bcsched
