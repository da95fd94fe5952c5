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

#include "bcsched/duopt.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bcsched/errors.hpp"
#include "bcsched/localopt.hpp"

namespace bcsched {
namespace {

// Energy cost of one constant-rate block; +inf where the rate pair
// overflows the region maps.
double block_cost(const ChannelParams& ch, double dur, double b1, double b2) {
  if (dur <= 0.0) {
    return (b1 > 0.0 || b2 > 0.0) ? std::numeric_limits<double>::infinity()
                                  : 0.0;
  }
  try {
    return dur * min_power(ch, b1 / dur, b2 / dur).total;
  } catch (const RangeError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Smallest duration whose block cost fits within `budget`.  The cost is
// decreasing in the duration, so this is a plain bisection once a feasible
// right end is found by doubling.
double shortest_block(const ChannelParams& ch, double b1, double b2,
                      double budget) {
  double hi = 1.0;
  for (int guard = 0; block_cost(ch, hi, b1, b2) > budget; ++guard) {
    if (guard > 600) {
      throw InfeasibleInstanceError(
          "bit demand is not affordable within any finite duration");
    }
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (block_cost(ch, mid, b1, b2) <= budget ? hi : lo) = mid;
  }
  return hi;
}

bool cap_met(double got, double cap) {
  return std::abs(got - cap) <=
         std::max(1e-15, 1e-9 * std::max(std::abs(got), std::abs(cap)));
}

// Energy added per extra stronger-user bit at fixed duration, evaluated at
// the epoch's current rate pair.
double bit_cost1(const ChannelParams& ch, double r1, double r2) {
  const double c = std::log(2.0) / ch.kappa;
  return c * (ch.sigma2 / ch.s1) * std::exp(c * (r1 + r2));
}

// Same for a weaker-user bit; its stream also lifts the floor under the
// stronger stream, so both exponents appear.
double bit_cost2(const ChannelParams& ch, double r1, double r2) {
  const double c = std::log(2.0) / ch.kappa;
  const double dnu = ch.sigma2 / ch.s2 - ch.sigma2 / ch.s1;
  return bit_cost1(ch, r1, r2) + c * dnu * std::exp(c * r2);
}

bool transmitting(const EpochAllocation& a) {
  return a.power > 0.0 && a.active > 0.0;
}

Schedule empty_schedule(const Instance& inst) {
  Schedule s;
  for (std::size_t i = 0; i < inst.events.size(); ++i) {
    s.grid.starts.push_back(inst.events[i].t);
    s.grid.lengths.push_back(i + 1 < inst.events.size()
                                 ? inst.events[i + 1].t - inst.events[i].t
                                 : 0.0);
  }
  s.epochs.assign(s.grid.count(), EpochAllocation{});
  return s;
}

}  // namespace

Schedule initial_schedule(const Instance& inst) {
  Instance norm = inst;
  norm.events = normalize_events(inst.events);
  norm.validate();
  if (!asymptotic_feasible(norm)) {
    throw InfeasibleInstanceError(
        "harvested energy cannot cover the bit demand at any power level");
  }
  const double B1 = norm.total_bits1();
  const double B2 = norm.total_bits2();
  if (B1 <= 0.0 && B2 <= 0.0) return empty_schedule(norm);

  const double T0 = shortest_block(norm.channel, B1, B2, norm.total_energy());
  Schedule s;
  s.grid = build_epochs(norm, T0);
  s.epochs.assign(s.grid.count(), EpochAllocation{});
  EpochAllocation& tail = s.epochs.back();
  tail.r1 = B1 / T0;
  tail.r2 = B2 / T0;
  tail.power = min_power(norm.channel, tail.r1, tail.r2).total;
  tail.active = T0;
  return s;
}

SolveResult solve(const Instance& inst, const SolverConfig& cfg) {
  if (cfg.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be at least 1");
  }
  if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon)) {
    throw std::invalid_argument("epsilon must be nonnegative and finite");
  }
  if (!(cfg.horizon_hint >= 0.0) || !std::isfinite(cfg.horizon_hint)) {
    throw std::invalid_argument("horizon_hint must be nonnegative and finite");
  }

  Instance norm = inst;
  norm.events = normalize_events(inst.events);
  Schedule sched = initial_schedule(norm);

  SolveResult out;
  if (norm.total_bits1() <= 0.0 && norm.total_bits2() <= 0.0) {
    out.schedule = sched;
    out.trace.completion_times = {0.0};
    out.trace.converged = true;
    return out;
  }
  if (cfg.horizon_hint > sched.grid.lengths.back()) {
    sched.grid.lengths.back() = cfg.horizon_hint;
  }

  const double T_up = completion_time(sched);
  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : 1e-9 * T_up;

  const StepCurve Ecur = energy_curve(norm);
  const StepCurve B1cur = bits1_curve(norm);
  const StepCurve B2cur = bits2_curve(norm);

  const std::size_t K = sched.grid.count();
  std::vector<double> E(K), b1v(K), b2v(K);
  std::vector<EpochAllocation> alloc = sched.epochs;
  for (std::size_t i = 0; i < K; ++i) {
    E[i] = alloc[i].energy();
    b1v[i] = alloc[i].bits1();
    b2v[i] = alloc[i].bits2();
  }

  int flag0 = -1;        // pair index of the Flag; -1 while unset
  std::size_t k_n = K;   // epochs still in play
  double T_prev = T_up;
  std::vector<EpochAllocation> prev_alloc = alloc;
  out.trace.completion_times.push_back(T_up);

  int sweeps_done = 0;
  auto descend = [&]() {
    out.trace.converged = false;
    while (sweeps_done < cfg.max_iterations) {
      ++sweeps_done;
      std::vector<int> pats;
      double prefE = 0.0, prefB1 = 0.0, prefB2 = 0.0;
      for (std::size_t p0 = 0; p0 + 1 < k_n; ++p0) {
        TwoEpochProblem p;
        p.ch = norm.channel;
        p.T1 = sched.grid.lengths[p0];
        p.T2_max = sched.grid.lengths[p0 + 1];
        p.E1 = E[p0];
        p.E2 = E[p0 + 1];
        p.E_next = (p0 + 2 < K) ? E[p0 + 2] : 0.0;
        p.b1_total = b1v[p0] + b1v[p0 + 1];
        p.b2_total = b2v[p0] + b2v[p0 + 1];
        const double t0 = sched.grid.start(p0);
        p.e1_cap = std::max(0.0, Ecur.at(t0) - prefE);
        p.b11_cap = std::max(0.0, B1cur.at(t0) - prefB1);
        p.b21_cap = std::max(0.0, B2cur.at(t0) - prefB2);

        // Energy minimization needs an epoch after the pair to receive the
        // excess, so it never runs on the final pair.
        bool energy_obj = static_cast<int>(p0) <= flag0 && p0 + 2 < k_n;
        TwoEpochSolution sol =
            energy_obj ? minimize_energy(p) : minimize_time(p);
        if (!energy_obj && p0 + 2 < k_n &&
            sol.T2_used >= p.T2_max * (1.0 - 1e-6)) {
          // The pair's traffic fills its whole window, so its completion
          // cannot move; take the cheapest allocation instead and pass the
          // savings to the epochs behind it.
          try {
            TwoEpochSolution cheap = minimize_energy(p);
            if (cheap.consumed() < sol.consumed()) {
              sol = cheap;
              energy_obj = true;
            }
          } catch (const PairInfeasibleError&) {
            // keep the time solution
          }
        }

        E[p0] = sol.consumed1();
        b1v[p0] = sol.b11();
        b2v[p0] = sol.b21();
        b1v[p0 + 1] = std::max(0.0, p.b1_total - sol.b11());
        b2v[p0 + 1] = std::max(0.0, p.b2_total - sol.b21());
        if (energy_obj) {
          E[p0 + 1] = sol.consumed2();
          E[p0 + 2] += sol.E_transfer;
        } else {
          // unconsumed pair energy stays with the second epoch
          E[p0 + 1] = std::max(0.0, p.E1 + p.E2 - sol.consumed1());
        }
        alloc[p0] = {sol.epoch1.power, sol.epoch1.r1, sol.epoch1.r2,
                     sol.active1};
        alloc[p0 + 1] = {sol.epoch2.power, sol.epoch2.r1, sol.epoch2.r2,
                         sol.T2_used};
        if (!transmitting(alloc[p0])) alloc[p0] = EpochAllocation{};
        if (!transmitting(alloc[p0 + 1])) alloc[p0 + 1] = EpochAllocation{};
        pats.push_back(sol.pattern.index());

        if (flag0 < static_cast<int>(p0) && p0 + 2 < k_n &&
            cap_met(sol.b11(), p.b11_cap) && cap_met(sol.b21(), p.b21_cap)) {
          flag0 = static_cast<int>(p0);
        }
        prefE += E[p0];
        prefB1 += b1v[p0];
        prefB2 += b2v[p0];
      }

      // The completion time flattens out long before the interior epochs
      // finish trading energy and bits (the cost of a residual imbalance is
      // quadratic in its size), so termination also waits for the allocation
      // itself to settle.
      bool settled = true;
      for (std::size_t i = 0; i < K && settled; ++i) {
        auto moved = [](double now, double was) {
          return std::abs(now - was) > 1e-9 * std::max(1.0, std::abs(was));
        };
        settled = !moved(alloc[i].power, prev_alloc[i].power) &&
                  !moved(alloc[i].r1, prev_alloc[i].r1) &&
                  !moved(alloc[i].r2, prev_alloc[i].r2) &&
                  !moved(alloc[i].active, prev_alloc[i].active);
      }
      prev_alloc = alloc;

      sched.epochs = alloc;
      const double T_n = completion_time(sched);
      out.trace.completion_times.push_back(T_n);
      out.trace.flags.push_back(flag0 + 1);
      out.trace.pair_patterns.push_back(std::move(pats));

      if (cfg.validate_each_sweep) {
        if (!check_feasibility(norm, sched).feasible) {
          throw std::logic_error("sweep produced an infeasible schedule");
        }
      }

      std::size_t last = 0;
      bool any = false;
      for (std::size_t i = 0; i < K; ++i) {
        if (transmitting(alloc[i])) {
          last = i;
          any = true;
        }
      }
      k_n = any ? last + 1 : 1;

      const bool done = T_prev - T_n <= eps && settled;
      T_prev = T_n;
      if (done) {
        out.trace.converged = true;
        break;
      }
    }
    out.trace.sweeps = static_cast<int>(out.trace.flags.size());
  };

  descend();

  // Pairwise exchange can wedge weaker bits behind an epoch whose energy
  // intake is capped by causality: inside each window the swap loses, yet
  // carrying the bits two epochs back is strictly cheaper overall.  Move
  // them there directly, pushing stronger bits the other way across the
  // capped epoch when a boundary has no slack left, and let the sweeps
  // spend the freed energy on an earlier finish.
  auto pull_back_weaker = [&]() -> bool {
    std::vector<std::size_t> tx;
    for (std::size_t q = 0; q < K; ++q) {
      if (transmitting(alloc[q])) tx.push_back(q);
    }
    if (tx.size() < 3) return false;
    std::vector<double> usedE(K + 1, 0.0), deliv2(K + 1, 0.0);
    for (std::size_t q = 0; q < K; ++q) {
      usedE[q + 1] = usedE[q] + alloc[q].energy();
      deliv2[q + 1] = deliv2[q] + alloc[q].bits2();
    }
    const double bit_tol = 1e-10 * std::max(1.0, norm.total_bits2());
    for (std::size_t a = 2; a < tx.size(); ++a) {
      const std::size_t i = tx[a - 2], m = tx[a - 1], j = tx[a];
      if (b2v[j] <= bit_tol) continue;
      const double wi = bit_cost2(norm.channel, alloc[i].r1, alloc[i].r2);
      const double wj = bit_cost2(norm.channel, alloc[j].r1, alloc[j].r2);
      if (!(wi < wj * (1.0 - 1e-6))) continue;
      const double acti = alloc[i].active;
      const double actm = alloc[m].active;
      const double actj = alloc[j].active;
      const double room =
          B2cur.at(sched.grid.start(i)) - (deliv2[i] + b2v[i]);
      const double delta_cap = std::min(b2v[j], room);
      if (delta_cap <= bit_tol) continue;

      double slack_mid = std::numeric_limits<double>::infinity();
      for (std::size_t q = i + 1; q < j; ++q) {
        slack_mid =
            std::min(slack_mid, Ecur.before(sched.grid.start(q)) - usedE[q]);
      }
      const double slack_j = Ecur.before(sched.grid.start(j)) - usedE[j];
      const double burn_i0 = alloc[i].energy();
      const double burn_m0 = alloc[m].energy();
      const double burn_j0 = alloc[j].energy();
      const double shed_max =
          burn_m0 - block_cost(norm.channel, actm, 0.0, b2v[m]);
      const double total0 = burn_i0 + burn_m0 + burn_j0;

      // The compensating push through the tail grows exponentially with the
      // pull size, so the largest pull that clears the boundaries often burns
      // more than it frees while a smaller one still wins.  Walk the size
      // down a halving ladder and take the first rung that pays.
      double delta = 0.0, z = 0.0;
      double burn_i1 = burn_i0, burn_m1 = burn_m0, burn_j1 = burn_j0;
      for (double d = delta_cap; d > bit_tol; d *= 0.5) {
        const double bi1 = block_cost(norm.channel, acti, b1v[i], b2v[i] + d);
        const double ci = bi1 - burn_i0;
        if (!(ci <= slack_mid) || !(ci <= slack_j + shed_max)) continue;
        double zd = 0.0;
        double bm1 = burn_m0;
        const double needed = ci - slack_j;
        if (needed > 0.0) {
          double zlo = 0.0, zhi = b1v[m];
          for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (zlo + zhi);
            const double shed = burn_m0 - block_cost(norm.channel, actm,
                                                     b1v[m] - mid, b2v[m]);
            (shed >= needed ? zhi : zlo) = mid;
          }
          zd = zhi;
          bm1 = block_cost(norm.channel, actm, b1v[m] - zd, b2v[m]);
        }
        const double bj1 =
            block_cost(norm.channel, actj, b1v[j] + zd, b2v[j] - d);
        if (std::getenv("BCSCHED_DEBUG_PULL")) {
          std::fprintf(stderr,
                       "pull try i=%zu m=%zu j=%zu d=%.6f ci=%.6f mid=%.6f "
                       "sj=%.6f shmax=%.6f t1=%.6f t0=%.6f\n",
                       i, m, j, d, bi1 - burn_i0, slack_mid, slack_j, shed_max,
                       bi1 + bm1 + bj1, total0);
        }
        if (bi1 + bm1 + bj1 < total0 - 1e-12 * std::max(1.0, total0)) {
          delta = d;
          z = zd;
          burn_i1 = bi1;
          burn_m1 = bm1;
          burn_j1 = bj1;
          break;
        }
      }
      if (delta <= bit_tol) continue;
      const double total1 = burn_i1 + burn_m1 + burn_j1;

      const double old_b2i = b2v[i], old_b2j = b2v[j];
      const double old_b1m = b1v[m], old_b1j = b1v[j];
      const double old_Ei = E[i], old_Em = E[m], old_Ej = E[j];
      const EpochAllocation old_ai = alloc[i];
      const EpochAllocation old_am = alloc[m];
      const EpochAllocation old_aj = alloc[j];

      b2v[i] += delta;
      b2v[j] -= delta;
      b1v[m] -= z;
      b1v[j] += z;
      const double hold = (E[i] + E[m] + E[j]) - (total1);
      E[i] = burn_i1;
      E[m] = burn_m1;
      E[j] = burn_j1 + hold;  // freed energy waits with the source epoch
      const std::size_t touched[] = {i, m, j};
      for (std::size_t q : touched) {
        EpochAllocation& al = alloc[q];
        al.r1 = b1v[q] / al.active;
        al.r2 = b2v[q] / al.active;
        al.power = min_power(norm.channel, al.r1, al.r2).total;
        if (!transmitting(al)) al = EpochAllocation{};
      }
      sched.epochs = alloc;
      if (std::getenv("BCSCHED_DEBUG_PULL")) {
        std::fprintf(stderr, "pull apply i=%zu m=%zu j=%zu d=%.6f z=%.6f feas=%d\n",
                     i, m, j, delta, z,
                     check_feasibility(norm, sched).feasible ? 1 : 0);
      }
      if (!check_feasibility(norm, sched).feasible) {
        b2v[i] = old_b2i;
        b2v[j] = old_b2j;
        b1v[m] = old_b1m;
        b1v[j] = old_b1j;
        E[i] = old_Ei;
        E[m] = old_Em;
        E[j] = old_Ej;
        alloc[i] = old_ai;
        alloc[m] = old_am;
        alloc[j] = old_aj;
        sched.epochs = alloc;
        return false;
      }
      return true;
    }
    return false;
  };

  const int max_pulls = static_cast<int>(4 * K) + 8;
  for (int r = 0; r < max_pulls && out.trace.converged; ++r) {
    const double T_mark = T_prev;
    const auto snap_alloc = alloc;
    const auto snap_prev = prev_alloc;
    const auto snap_E = E;
    const auto snap_b1 = b1v;
    const auto snap_b2 = b2v;
    const int snap_flag = flag0;
    const std::size_t snap_kn = k_n;
    const std::size_t snap_len = out.trace.flags.size();
    if (!pull_back_weaker()) break;
    prev_alloc = alloc;
    descend();
    if (std::getenv("BCSCHED_DEBUG_PULL")) {
      std::fprintf(stderr, "pull round r=%d T_mark=%.9f T_new=%.9f\n", r, T_mark,
                   T_prev);
    }
    if (T_prev > T_mark + 1e-12 * std::max(1.0, T_up)) {
      alloc = snap_alloc;
      prev_alloc = snap_prev;
      E = snap_E;
      b1v = snap_b1;
      b2v = snap_b2;
      flag0 = snap_flag;
      k_n = snap_kn;
      sched.epochs = alloc;
      T_prev = T_mark;
      out.trace.completion_times.resize(snap_len + 1);
      out.trace.flags.resize(snap_len);
      out.trace.pair_patterns.resize(snap_len);
      out.trace.sweeps = static_cast<int>(snap_len);
      out.trace.converged = true;
      break;
    }
  }

  out.schedule = compact_gaps(sched);
  return out;
}

Schedule compact_gaps(const Schedule& sched) {
  Schedule out = sched;
  std::size_t last = 0;
  bool any = false;
  for (std::size_t i = 0; i < out.epochs.size(); ++i) {
    if (transmitting(out.epochs[i])) {
      last = i;
      any = true;
    }
  }
  for (std::size_t i = 0; i < out.epochs.size(); ++i) {
    if (!any || i > last) out.epochs[i] = EpochAllocation{};
  }
  return out;
}

}  // namespace bcsched
