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
#include <vector>

#include "bcsched/channel.hpp"

namespace bcsched {

// One arrival instant.  Amounts are what shows up at time t; any of them
// may be zero.
struct ArrivalEvent {
  double t = 0.0;
  double energy = 0.0;
  double bits1 = 0.0;
  double bits2 = 0.0;
};

// A transmission task: channel, arrival process, and the observation
// window.  Everything arriving inside [0, window] must be delivered;
// nothing arrives after the window.
struct Instance {
  ChannelParams channel;
  std::vector<ArrivalEvent> events;
  double window = 0.0;

  double total_bits1() const;
  double total_bits2() const;
  double total_energy() const;
  void validate() const;
};

// Coalesces coincident instants (amounts add) and sorts by time.  An event
// at t = 0 is inserted if absent so every instance starts with an epoch
// boundary at zero.
std::vector<ArrivalEvent> normalize_events(std::vector<ArrivalEvent> events);

// Right-continuous cumulative arrival curve: at(t) includes amounts
// arriving exactly at t, before(t) excludes them.  Arrivals are usable the
// instant they appear, so consumption over [0, t) is limited by before(t).
class StepCurve {
 public:
  StepCurve() = default;
  StepCurve(std::vector<double> instants, std::vector<double> amounts);

  double at(double time) const;
  double before(double time) const;
  double total() const;
  const std::vector<double>& instants() const { return instants_; }

 private:
  std::vector<double> instants_;
  std::vector<double> cum_;  // cum_[i] = sum of amounts[0..i]
};

StepCurve energy_curve(const Instance& inst);
StepCurve bits1_curve(const Instance& inst);
StepCurve bits2_curve(const Instance& inst);

// Epoch grid: boundaries are the distinct event instants; the final epoch
// is a sentinel of length horizon_hint starting at the last event.
struct EpochGrid {
  std::vector<double> starts;   // epoch i spans [starts[i], starts[i]+xi[i])
  std::vector<double> lengths;  // xi

  std::size_t count() const { return lengths.size(); }
  double start(std::size_t i) const { return starts[i]; }
  double end(std::size_t i) const { return starts[i] + lengths[i]; }
};

EpochGrid build_epochs(const Instance& inst, double horizon_hint);

// Constant power and rate pair over the leading `active` part of an epoch;
// the remainder of the epoch is silent.
struct EpochAllocation {
  double power = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double active = 0.0;

  double energy() const { return power * active; }
  double bits1() const { return r1 * active; }
  double bits2() const { return r2 * active; }
};

struct Schedule {
  EpochGrid grid;
  std::vector<EpochAllocation> epochs;

  double completion_time() const;
};

double completion_time(const Schedule& sched);

struct FeasibilityReport {
  bool feasible = false;
  // Slack of each causality constraint, one entry per epoch boundary
  // (end of epoch i) plus a final entry at the completion time.
  std::vector<double> energy_slacks;
  std::vector<double> bits1_slacks;
  std::vector<double> bits2_slacks;
  // power - min_power(r1, r2) per epoch: rate-region membership.
  std::vector<double> region_slacks;
  // delivered - required for each user at completion.
  double completion_residual1 = 0.0;
  double completion_residual2 = 0.0;
  double worst_slack = 0.0;
};

// Verifies energy causality, data causality, and exact delivery of all
// arrived bits by the schedule's completion time.
FeasibilityReport check_feasibility(const Instance& inst, const Schedule& sched,
                                    double tol_abs = 1e-9, double tol_rel = 1e-9);

// Necessary and sufficient condition for finite completion time: the
// harvested energy must strictly exceed the minimum-energy cost of the bit
// demands even at vanishing power.
bool asymptotic_feasible(const Instance& inst);

}  // namespace bcsched
