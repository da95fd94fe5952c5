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

#include "bcsched/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "bcsched/channel.hpp"
#include "bcsched/errors.hpp"

namespace bcsched {
namespace {

// A constraint whose slack is within this (relative) counts as active; an
// increase above it counts as a genuine rise.  Bisection-limited solutions
// sit near but not exactly on their constraints.
constexpr double kActiveRel = 1e-7;
constexpr double kRiseRel = 1e-7;

bool transmitting(const EpochAllocation& a) {
  return a.power > 0.0 && a.active > 0.0;
}

bool nearly(double got, double want, double rel) {
  return std::abs(got - want) <=
         rel * std::max({1.0, std::abs(got), std::abs(want)});
}

bool rises(double before, double after) {
  return after > before * (1.0 + kRiseRel) + 1e-15;
}

std::string at_boundary(std::size_t epoch, double t) {
  std::ostringstream os;
  os << "epoch " << epoch << " (t = " << t << ")";
  return os.str();
}

}  // namespace

bool is_wufbc(const Instance& inst) {
  for (const ArrivalEvent& e : normalize_events(inst.events)) {
    if (e.t > 0.0 && e.bits2 > 0.0) return false;
  }
  return true;
}

bool VerificationReport::clean() const {
  for (const CheckResult& c : checks) {
    if (c.applicable && !c.pass) return false;
  }
  return true;
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const CheckResult& c : checks) {
    if (c.check == name) return &c;
  }
  return nullptr;
}

VerificationReport verify_structure(const Instance& inst,
                                    const Schedule& sched, double tol) {
  VerificationReport rep;
  Instance norm = inst;
  norm.events = normalize_events(inst.events);

  const StepCurve Ec = energy_curve(norm);
  const StepCurve B1c = bits1_curve(norm);
  const StepCurve B2c = bits2_curve(norm);

  const std::size_t K = sched.epochs.size();
  std::vector<std::size_t> tx;
  for (std::size_t i = 0; i < K; ++i) {
    if (transmitting(sched.epochs[i])) tx.push_back(i);
  }

  // Cumulative consumption and delivery by the start of each epoch.
  std::vector<double> usedE(K + 1, 0.0), d1(K + 1, 0.0), d2(K + 1, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    usedE[i + 1] = usedE[i] + sched.epochs[i].energy();
    d1[i + 1] = d1[i] + sched.epochs[i].bits1();
    d2[i + 1] = d2[i] + sched.epochs[i].bits2();
  }

  // Activity shape: every transmitting epoch before the final one spans its
  // full epoch; silence only at the tail (the completion epoch may be cut).
  {
    CheckResult c;
    c.check = "epoch_activity";
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < tx.size(); ++k) {
      const std::size_t i = tx[k];
      const double xi = sched.grid.lengths[i];
      const double gap = std::abs(xi - sched.epochs[i].active);
      const double relgap = gap / std::max(xi, 1e-300);
      if (relgap > worst) {
        worst = relgap;
        c.detail = at_boundary(i, sched.grid.start(i));
      }
    }
    c.slack = -worst;
    c.pass = worst <= tol;
    rep.checks.push_back(c);
  }

  // Power staircase: nondecreasing across transmitting epochs.
  {
    CheckResult c;
    c.check = "power_monotone";
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < tx.size(); ++k) {
      const double prev = sched.epochs[tx[k - 1]].power;
      const double cur = sched.epochs[tx[k]].power;
      const double rel = (cur - prev) / std::max(prev, 1e-300);
      if (rel < worst) {
        worst = rel;
        c.detail = at_boundary(tx[k], sched.grid.start(tx[k]));
      }
    }
    c.slack = tx.size() > 1 ? worst : 0.0;
    c.pass = !(c.slack < -tol);
    rep.checks.push_back(c);
  }

  // Every strict power rise needs an arrival-side justification.
  {
    CheckResult c;
    c.check = "power_rises_licensed";
    int unlicensed = 0;
    for (std::size_t k = 1; k < tx.size(); ++k) {
      const std::size_t i = tx[k];
      const double prev = sched.epochs[tx[k - 1]].power;
      const double cur = sched.epochs[i].power;
      if (!rises(prev, cur)) continue;
      const double t = sched.grid.start(i);
      RiseRecord r;
      r.epoch = i;
      r.time = t;
      r.before_level = prev;
      r.after_level = cur;
      if (nearly(usedE[i], Ec.before(t), kActiveRel)) {
        r.licenses.push_back("energy_exhausted_at_boundary");
      }
      const bool b1_active = nearly(d1[i], B1c.before(t), kActiveRel);
      const bool b2_active = nearly(d2[i], B2c.before(t), kActiveRel);
      if (b1_active && b2_active) {
        r.licenses.push_back("both_backlogs_empty");
      }
      if (b2_active && B2c.at(t) - B2c.before(t) > 0.0) {
        r.licenses.push_back("weaker_backlog_empty_at_weaker_arrival");
      }
      r.licensed = !r.licenses.empty();
      if (!r.licensed) {
        ++unlicensed;
        c.detail = at_boundary(i, t);
      }
      rep.power_rises.push_back(r);
    }
    c.slack = -static_cast<double>(unlicensed);
    c.pass = unlicensed == 0;
    rep.checks.push_back(c);
  }

  const bool wufbc = is_wufbc(norm);

  // Stronger user's rate staircase; only meaningful when the weaker user's
  // buffer is full from the start.
  {
    CheckResult mono;
    mono.check = "stronger_rate_monotone";
    CheckResult lic;
    lic.check = "stronger_rate_rises_licensed";
    mono.applicable = wufbc;
    lic.applicable = wufbc;
    if (wufbc) {
      double worst = std::numeric_limits<double>::infinity();
      int unlicensed = 0;
      for (std::size_t k = 1; k < tx.size(); ++k) {
        const std::size_t i = tx[k];
        const double prev = sched.epochs[tx[k - 1]].r1;
        const double cur = sched.epochs[i].r1;
        const double rel = (cur - prev) / std::max(prev, 1e-300);
        if (rel < worst) {
          worst = rel;
          mono.detail = at_boundary(i, sched.grid.start(i));
        }
        if (!rises(prev, cur)) continue;
        const double t = sched.grid.start(i);
        RiseRecord r;
        r.epoch = i;
        r.time = t;
        r.before_level = prev;
        r.after_level = cur;
        if (B1c.at(t) - B1c.before(t) > 0.0 &&
            nearly(d1[i], B1c.before(t), kActiveRel)) {
          r.licenses.push_back("stronger_arrival_with_empty_backlog");
        }
        const double r2_prev = sched.epochs[tx[k - 1]].r2;
        if (Ec.at(t) - Ec.before(t) > 0.0 &&
            r2_prev <= kActiveRel * std::max(1.0, prev)) {
          r.licenses.push_back("harvest_after_stronger_only_epoch");
        }
        r.licensed = !r.licenses.empty();
        if (!r.licensed) {
          ++unlicensed;
          lic.detail = at_boundary(i, t);
        }
        rep.rate_rises.push_back(r);
      }
      mono.slack = tx.size() > 1 ? worst : 0.0;
      mono.pass = !(mono.slack < -tol);
      lic.slack = -static_cast<double>(unlicensed);
      lic.pass = unlicensed == 0;
    }
    rep.checks.push_back(mono);
    rep.checks.push_back(lic);
  }

  // Full energy use at the schedule's own completion time.
  {
    CheckResult c;
    c.check = "energy_exhausted";
    const double T = completion_time(sched);
    const double avail = Ec.before(T);
    const double used = usedE[K];
    c.slack = (used - avail) / std::max(1.0, avail);
    c.pass = std::abs(used - avail) <= tol * std::max(1.0, avail);
    rep.checks.push_back(c);
  }

  // Each power rise must trace back to an arrival at that instant whose
  // implied clearing condition holds.  A boundary can carry several arrival
  // kinds at once; the rise only needs one of them to account for it.
  {
    CheckResult c;
    c.check = "rise_implications";
    int violations = 0;
    for (const RiseRecord& r : rep.power_rises) {
      const std::size_t i = r.epoch;
      const double t = r.time;
      bool explained = false;
      if (B2c.at(t) - B2c.before(t) > 0.0 &&
          nearly(d2[i], B2c.before(t), kActiveRel)) {
        explained = true;  // weaker arrival, weaker traffic finished
      }
      if (B1c.at(t) - B1c.before(t) > 0.0 &&
          nearly(d1[i], B1c.before(t), kActiveRel) &&
          nearly(d2[i], B2c.before(t), kActiveRel)) {
        explained = true;  // stronger arrival, all available bits sent
      }
      if (Ec.at(t) - Ec.before(t) > 0.0) {
        // walk to the head of the equal-power band before this rise
        std::size_t k = 0;
        while (k < tx.size() && tx[k] != i) ++k;
        std::size_t s = k - 1;
        while (s > 0 && nearly(sched.epochs[tx[s - 1]].power,
                               sched.epochs[tx[s]].power, kRiseRel)) {
          --s;
        }
        const double band_avail = Ec.at(sched.grid.start(tx[s]));
        if (band_avail - usedE[i] <= kActiveRel * std::max(1.0, band_avail)) {
          explained = true;  // harvest, pre-rise band drained its energy
        }
      }
      if (!explained) {
        ++violations;
        c.detail = at_boundary(i, t) + ": rise not accounted for";
      }
    }
    c.slack = -static_cast<double>(violations);
    c.pass = violations == 0;
    rep.checks.push_back(c);
  }

  return rep;
}

ProbeReport certify_uniqueness_probe(const Instance& inst,
                                     const Schedule& sched,
                                     const ProbeSpec& spec) {
  ProbeReport rep;
  Instance norm = inst;
  norm.events = normalize_events(inst.events);

  std::mt19937_64 eng(spec.seed);
  auto uniform01 = [&] {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  };

  std::vector<std::size_t> tx;
  for (std::size_t i = 0; i < sched.epochs.size(); ++i) {
    if (transmitting(sched.epochs[i])) tx.push_back(i);
  }
  double consumed0 = 0.0;
  for (const EpochAllocation& a : sched.epochs) consumed0 += a.energy();
  // below measurement resolution a perturbation proves nothing
  const double noise_floor = 1e-7 * std::max(1.0, consumed0);

  for (int n = 0; n < spec.count; ++n) {
    ++rep.attempted;
    if (tx.size() < 2 || spec.magnitude <= 0.0) {
      ++rep.noops;
      continue;
    }
    const std::size_t k =
        1 + static_cast<std::size_t>(uniform01() * (tx.size() - 1));
    const std::size_t a = tx[k - 1], b = tx[k];
    const bool user1 = uniform01() < 0.5;
    const bool leftward = uniform01() < 0.5;
    const std::size_t src = leftward ? b : a;
    const std::size_t dst = leftward ? a : b;

    Schedule pert = sched;
    EpochAllocation& s_al = pert.epochs[src];
    EpochAllocation& d_al = pert.epochs[dst];
    const double have = user1 ? s_al.bits1() : s_al.bits2();
    const double delta = spec.magnitude * have * (0.5 + 0.5 * uniform01());
    if (delta <= 1e-12 * std::max(1.0, have)) {
      ++rep.noops;
      continue;
    }
    if (user1) {
      s_al.r1 = (s_al.bits1() - delta) / s_al.active;
      d_al.r1 = (d_al.bits1() + delta) / d_al.active;
    } else {
      s_al.r2 = (s_al.bits2() - delta) / s_al.active;
      d_al.r2 = (d_al.bits2() + delta) / d_al.active;
    }
    bool ok = true;
    try {
      s_al.power = min_power(norm.channel, s_al.r1, s_al.r2).total;
      d_al.power = min_power(norm.channel, d_al.r1, d_al.r2).total;
    } catch (const RangeError&) {
      ok = false;
    } catch (const std::invalid_argument&) {
      ok = false;  // the move would drive a rate negative
    }

    std::ostringstream os;
    os << "move " << delta << " bits of user " << (user1 ? 1 : 2)
       << " from epoch " << src << " to epoch " << dst;

    if (ok) {
      double consumed = 0.0;
      for (const EpochAllocation& al : pert.epochs) consumed += al.energy();
      if (std::abs(consumed - consumed0) <= noise_floor) {
        ++rep.noops;
        continue;
      }
      ok = check_feasibility(norm, pert).feasible;
    }
    if (!ok) {
      ++rep.infeasible;
    } else {
      ++rep.falsifications;
      rep.survivors.push_back({os.str(), true});
    }
  }
  return rep;
}

}  // namespace bcsched
