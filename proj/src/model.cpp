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

#include "bcsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bcsched/errors.hpp"

namespace bcsched {

namespace {

void check_amount(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and nonnegative");
  }
}

}  // namespace

std::vector<ArrivalEvent> normalize_events(std::vector<ArrivalEvent> events) {
  for (const ArrivalEvent& e : events) {
    if (!std::isfinite(e.t) || e.t < 0.0) {
      throw std::invalid_argument("event instants must be finite and nonnegative");
    }
    check_amount(e.energy, "event energy");
    check_amount(e.bits1, "event bits1");
    check_amount(e.bits2, "event bits2");
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const ArrivalEvent& a, const ArrivalEvent& b) { return a.t < b.t; });
  std::vector<ArrivalEvent> merged;
  for (const ArrivalEvent& e : events) {
    if (!merged.empty() && merged.back().t == e.t) {
      merged.back().energy += e.energy;
      merged.back().bits1 += e.bits1;
      merged.back().bits2 += e.bits2;
    } else {
      merged.push_back(e);
    }
  }
  if (merged.empty() || merged.front().t > 0.0) {
    merged.insert(merged.begin(), ArrivalEvent{0.0, 0.0, 0.0, 0.0});
  }
  return merged;
}

double Instance::total_bits1() const {
  double s = 0.0;
  for (const auto& e : events) s += e.bits1;
  return s;
}

double Instance::total_bits2() const {
  double s = 0.0;
  for (const auto& e : events) s += e.bits2;
  return s;
}

double Instance::total_energy() const {
  double s = 0.0;
  for (const auto& e : events) s += e.energy;
  return s;
}

void Instance::validate() const {
  channel.validate();
  if (!std::isfinite(window) || window < 0.0) {
    throw std::invalid_argument("window must be finite and nonnegative");
  }
  if (events.empty()) {
    throw std::invalid_argument("instance has no events; normalize_events inserts t=0");
  }
  if (events.front().t != 0.0) {
    throw std::invalid_argument("first event must be at t = 0");
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    const ArrivalEvent& e = events[i];
    check_amount(e.energy, "event energy");
    check_amount(e.bits1, "event bits1");
    check_amount(e.bits2, "event bits2");
    if (i > 0 && !(events[i - 1].t < e.t)) {
      throw std::invalid_argument("event instants must be strictly increasing");
    }
    if (e.t > window) {
      throw std::invalid_argument("event after the observation window");
    }
  }
}

StepCurve::StepCurve(std::vector<double> instants, std::vector<double> amounts)
    : instants_(std::move(instants)) {
  if (instants_.size() != amounts.size()) {
    throw std::invalid_argument("curve instants/amounts size mismatch");
  }
  cum_.resize(amounts.size());
  double run = 0.0;
  for (std::size_t i = 0; i < amounts.size(); ++i) {
    run += amounts[i];
    cum_[i] = run;
  }
}

double StepCurve::at(double time) const {
  // Last instant <= time.
  auto it = std::upper_bound(instants_.begin(), instants_.end(), time);
  if (it == instants_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - instants_.begin()) - 1];
}

double StepCurve::before(double time) const {
  // Last instant < time.
  auto it = std::lower_bound(instants_.begin(), instants_.end(), time);
  if (it == instants_.begin()) return 0.0;
  return cum_[static_cast<std::size_t>(it - instants_.begin()) - 1];
}

double StepCurve::total() const { return cum_.empty() ? 0.0 : cum_.back(); }

namespace {

StepCurve make_curve(const Instance& inst, double ArrivalEvent::*field) {
  std::vector<double> t, a;
  t.reserve(inst.events.size());
  a.reserve(inst.events.size());
  for (const ArrivalEvent& e : inst.events) {
    t.push_back(e.t);
    a.push_back(e.*field);
  }
  return StepCurve(std::move(t), std::move(a));
}

}  // namespace

StepCurve energy_curve(const Instance& inst) { return make_curve(inst, &ArrivalEvent::energy); }
StepCurve bits1_curve(const Instance& inst) { return make_curve(inst, &ArrivalEvent::bits1); }
StepCurve bits2_curve(const Instance& inst) { return make_curve(inst, &ArrivalEvent::bits2); }

EpochGrid build_epochs(const Instance& inst, double horizon_hint) {
  inst.validate();
  if (!(horizon_hint > 0.0) || !std::isfinite(horizon_hint)) {
    throw std::invalid_argument("horizon_hint must be positive and finite");
  }
  EpochGrid grid;
  grid.starts.reserve(inst.events.size());
  grid.lengths.reserve(inst.events.size());
  for (std::size_t i = 0; i < inst.events.size(); ++i) {
    grid.starts.push_back(inst.events[i].t);
    if (i + 1 < inst.events.size()) {
      grid.lengths.push_back(inst.events[i + 1].t - inst.events[i].t);
    } else {
      grid.lengths.push_back(horizon_hint);
    }
  }
  return grid;
}

double completion_time(const Schedule& sched) {
  double T = 0.0;
  for (std::size_t i = 0; i < sched.epochs.size(); ++i) {
    const EpochAllocation& a = sched.epochs[i];
    if (a.power > 0.0 && a.active > 0.0) {
      T = sched.grid.start(i) + a.active;
    }
  }
  return T;
}

double Schedule::completion_time() const { return bcsched::completion_time(*this); }

FeasibilityReport check_feasibility(const Instance& inst, const Schedule& sched,
                                    double tol_abs, double tol_rel) {
  inst.validate();
  const std::size_t k = sched.grid.count();
  if (sched.epochs.size() != k) {
    throw std::invalid_argument("schedule allocation/grid size mismatch");
  }
  if (k < inst.events.size()) {
    throw std::invalid_argument("schedule grid has fewer epochs than event instants");
  }
  for (std::size_t i = 0; i < inst.events.size(); ++i) {
    const double t = inst.events[i].t;
    if (std::fabs(sched.grid.start(i) - t) > 1e-12 * std::max(1.0, std::fabs(t))) {
      throw std::invalid_argument("schedule grid does not match instance event instants");
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const EpochAllocation& a = sched.epochs[i];
    if (a.active < 0.0 || a.active > sched.grid.lengths[i] * (1.0 + 1e-12) + 1e-300) {
      throw std::invalid_argument("allocation active duration outside its epoch");
    }
    if (a.power < 0.0 || a.r1 < 0.0 || a.r2 < 0.0) {
      throw std::invalid_argument("allocation with negative power or rate");
    }
  }

  const StepCurve ec = energy_curve(inst);
  const StepCurve b1c = bits1_curve(inst);
  const StepCurve b2c = bits2_curve(inst);

  FeasibilityReport rep;
  const double T = completion_time(sched);

  auto tol_for = [&](double scale) { return std::max(tol_abs, tol_rel * scale); };
  const double e_tol = tol_for(ec.total());
  const double b1_tol = tol_for(b1c.total());
  const double b2_tol = tol_for(b2c.total());

  double ce = 0.0, cb1 = 0.0, cb2 = 0.0;
  bool ok = true;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  auto push_slack = [&](std::vector<double>* v, double slack, double tol) {
    v->push_back(slack);
    rep.worst_slack = std::min(rep.worst_slack, slack);
    if (slack < -tol) ok = false;
  };

  const detail::RegionCoef coef = detail::coef(inst.channel);
  for (std::size_t i = 0; i < k; ++i) {
    const EpochAllocation& a = sched.epochs[i];
    ce += a.energy();
    cb1 += a.bits1();
    cb2 += a.bits2();
    const double bound = sched.grid.end(i);
    push_slack(&rep.energy_slacks, ec.before(bound) - ce, e_tol);
    push_slack(&rep.bits1_slacks, b1c.before(bound) - cb1, b1_tol);
    push_slack(&rep.bits2_slacks, b2c.before(bound) - cb2, b2_tol);
    // Rates must be supportable by the declared power.
    if (a.active > 0.0) {
      const double need = detail::g_power(coef, a.r1, a.r2);
      push_slack(&rep.region_slacks, a.power - need,
                 tol_for(std::max(a.power, need)));
    } else {
      rep.region_slacks.push_back(0.0);
    }
  }
  // Final check at the completion instant itself.
  push_slack(&rep.energy_slacks, ec.before(T) - ce, e_tol);
  push_slack(&rep.bits1_slacks, b1c.before(T) - cb1, b1_tol);
  push_slack(&rep.bits2_slacks, b2c.before(T) - cb2, b2_tol);

  rep.completion_residual1 = cb1 - b1c.total();
  rep.completion_residual2 = cb2 - b2c.total();
  if (std::fabs(rep.completion_residual1) > b1_tol) ok = false;
  if (std::fabs(rep.completion_residual2) > b2_tol) ok = false;

  rep.feasible = ok;
  return rep;
}

bool asymptotic_feasible(const Instance& inst) {
  inst.validate();
  const double b1 = inst.total_bits1();
  const double b2 = inst.total_bits2();
  if (b1 + b2 == 0.0) return true;
  const double bound = inst.channel.sigma2 * M_LN2 / inst.channel.kappa *
                       (b1 / inst.channel.s1 + b2 / inst.channel.s2);
  return inst.total_energy() > bound;
}

}  // namespace bcsched
