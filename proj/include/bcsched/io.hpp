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

#include <string>

#include "bcsched/duopt.hpp"
#include "bcsched/model.hpp"
#include "bcsched/structure.hpp"

namespace bcsched {

// Instance documents are JSON:
//   {"channel": {"s1","s2","sigma2","kappa"}, "window": w,
//    "events": [{"t","energy","bits1","bits2"}, ...]}
// with omitted event amounts defaulting to zero.  Parsing normalizes
// (sorts, merges coincident instants) and validates; any schema or value
// problem raises ParseError.  serialize/parse round-trip doubles exactly.
Instance parse_instance(const std::string& text);
std::string serialize_instance(const Instance& inst);

// Schedule documents carry the grid, the per-epoch allocations, and the
// completion time:
//   {"grid": {"starts": [...], "lengths": [...]},
//    "epochs": [{"power","r1","r2","active"}, ...],
//    "completion_time": T}
Schedule parse_schedule(const std::string& text);
std::string serialize_schedule(const Schedule& sched);

std::string serialize_trace(const IterationTrace& trace);

std::string serialize_report(const VerificationReport& structure,
                             const FeasibilityReport& feasibility);

// Breakpoints of the piecewise-constant schedule, one CSV row per change:
// `t,P_total,P_strong,r1,r2`.  P_strong is the share of the total power
// carrying the stronger user's stream.
std::string plot_table(const ChannelParams& ch, const Schedule& sched);

}  // namespace bcsched
