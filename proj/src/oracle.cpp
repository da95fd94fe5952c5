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

#include "bcsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bcsched/errors.hpp"

namespace bcsched {

namespace {

constexpr std::size_t kMaxEpochs = 4;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Joint energy to push (b1, b2) bits through `len` seconds at the least
// power that supports the implied rate pair.
double epoch_cost(const ChannelParams& ch, double len, double b1, double b2) {
  if (b1 <= 0.0 && b2 <= 0.0) return 0.0;
  if (len <= 0.0) return kInf;
  try {
    return len * min_power(ch, b1 / len, b2 / len).total;
  } catch (const RangeError&) {
    return kInf;
  }
}

// Candidate values for one epoch's bit count: multiples of step_frac of
// the user's total, clipped to the total.
std::vector<double> full_lattice(double total, double step_frac) {
  std::vector<double> v{0.0};
  if (total <= 0.0) return v;
  const double g = step_frac * total;
  for (long m = 1; v.back() < total; ++m) {
    v.push_back(std::min(total, static_cast<double>(m) * g));
  }
  return v;
}

// Nine lattice points straddling `center` at the current step, clipped to
// [0, total]; clipping may collapse neighbours, so duplicates are dropped.
std::vector<double> window_lattice(double total, double center, double step) {
  std::vector<double> v;
  if (total <= 0.0) {
    v.push_back(0.0);
    return v;
  }
  for (int k = -4; k <= 4; ++k) {
    const double x = std::clamp(center + k * step, 0.0, total);
    if (v.empty() || x > v.back()) v.push_back(x);
  }
  return v;
}

// One fixed-horizon feasibility question: can the bit totals be split
// across the epochs still open before T so that every causality prefix
// holds?  Splits are drawn from per-epoch candidate lists for all epochs
// but the last open one, which absorbs the remainder.
struct SplitSearch {
  const ChannelParams* ch = nullptr;
  std::size_t ell = 0;  // last epoch that starts before T
  double B1 = 0.0, B2 = 0.0;
  double tol1 = 0.0, tol2 = 0.0, etol = 0.0;
  double floor1 = 0.0, floor2 = 0.0;  // vanishing-power cost per bit
  std::vector<double> len;
  const std::vector<double>* b1cap = nullptr;
  const std::vector<double>* b2cap = nullptr;
  const std::vector<double>* ecap = nullptr;
  const std::vector<std::vector<double>>* cand1 = nullptr;
  const std::vector<std::vector<double>>* cand2 = nullptr;
  std::vector<std::vector<std::vector<double>>> cost;  // [i][a][b], i < ell
  std::vector<double> pick1, pick2;
  std::vector<double> path1, path2;
  double best_total = kInf;

  void tabulate() {
    cost.assign(ell, {});
    for (std::size_t i = 0; i < ell; ++i) {
      const auto& v1 = (*cand1)[i];
      const auto& v2 = (*cand2)[i];
      cost[i].assign(v1.size(), std::vector<double>(v2.size()));
      for (std::size_t a = 0; a < v1.size(); ++a) {
        for (std::size_t b = 0; b < v2.size(); ++b) {
          cost[i][a][b] = epoch_cost(*ch, len[i], v1[a], v2[b]);
        }
      }
    }
  }

  bool walk(std::size_t i, double s1, double s2, double used) {
    if (i == ell) {
      const double r1 = std::max(0.0, B1 - s1);
      const double r2 = std::max(0.0, B2 - s2);
      if (B1 - s1 < -tol1 || B2 - s2 < -tol2) return false;
      const double tail = epoch_cost(*ch, len[ell], r1, r2);
      if (used + tail > (*ecap)[ell] + etol) return false;
      pick1[ell] = r1;
      pick2[ell] = r2;
      return true;
    }
    const auto& v1 = (*cand1)[i];
    const auto& v2 = (*cand2)[i];
    const double elast = (*ecap)[ell] + etol;
    for (std::size_t a = 0; a < v1.size(); ++a) {
      const double s1n = s1 + v1[a];
      if (s1n > (*b1cap)[i] + tol1 || s1n > B1 + tol1) break;
      for (std::size_t b = 0; b < v2.size(); ++b) {
        const double s2n = s2 + v2[b];
        if (s2n > (*b2cap)[i] + tol2 || s2n > B2 + tol2) break;
        const double en = used + cost[i][a][b];
        if (en > (*ecap)[i] + etol) break;
        // Even at vanishing power the rest of the bits cost this much.
        const double rest =
            std::max(0.0, B1 - s1n) * floor1 + std::max(0.0, B2 - s2n) * floor2;
        if (en + rest > elast) continue;
        if (walk(i + 1, s1n, s2n, en)) {
          pick1[i] = v1[a];
          pick2[i] = v2[b];
          return true;
        }
      }
    }
    return false;
  }

  // Full sweep keeping the cheapest feasible split, so the next round's
  // windows centre on the best basin rather than the first one found.
  void scan(std::size_t i, double s1, double s2, double used) {
    if (i == ell) {
      if (B1 - s1 < -tol1 || B2 - s2 < -tol2) return;
      const double r1 = std::max(0.0, B1 - s1);
      const double r2 = std::max(0.0, B2 - s2);
      const double total = used + epoch_cost(*ch, len[ell], r1, r2);
      if (total > (*ecap)[ell] + etol || total >= best_total) return;
      best_total = total;
      for (std::size_t m = 0; m < ell; ++m) {
        pick1[m] = path1[m];
        pick2[m] = path2[m];
      }
      pick1[ell] = r1;
      pick2[ell] = r2;
      return;
    }
    const auto& v1 = (*cand1)[i];
    const auto& v2 = (*cand2)[i];
    const double elast = (*ecap)[ell] + etol;
    for (std::size_t a = 0; a < v1.size(); ++a) {
      const double s1n = s1 + v1[a];
      if (s1n > (*b1cap)[i] + tol1 || s1n > B1 + tol1) break;
      for (std::size_t b = 0; b < v2.size(); ++b) {
        const double s2n = s2 + v2[b];
        if (s2n > (*b2cap)[i] + tol2 || s2n > B2 + tol2) break;
        const double en = used + cost[i][a][b];
        if (en > (*ecap)[i] + etol) break;
        const double rest =
            std::max(0.0, B1 - s1n) * floor1 + std::max(0.0, B2 - s2n) * floor2;
        if (en + rest > elast || en + rest >= best_total) continue;
        path1[i] = v1[a];
        path2[i] = v2[b];
        scan(i + 1, s1n, s2n, en);
      }
    }
  }
};

// -------- single-user exact probe --------

double lone_energy(double nu, double kappa, double bits, double len) {
  if (bits <= 0.0) return 0.0;
  if (len <= 0.0) return kInf;
  const double x = std::log(2.0) / kappa * (bits / len);
  if (x > 700.0) return kInf;
  return len * nu * std::expm1(x);
}

double lone_rate(double nu, double kappa, double energy, double len) {
  if (len <= 0.0 || energy <= 0.0) return 0.0;
  return kappa * std::log1p(energy / (len * nu)) / std::log(2.0);
}

// Feasibility of delivering `want` bits by the end of the last epoch.
// Repeatedly finds the tightest uniform rate any prefix allows; if the
// whole stretch sustains the required rate the split works, otherwise the
// binding prefix is pinned at its ceiling and the rest carries on.
bool lone_fits(const std::vector<double>& len, const std::vector<double>& bcap,
               const std::vector<double>& ecap, double nu, double kappa,
               double want) {
  const double btol = 1e-12 * std::max(1.0, want);
  std::size_t lo = 0;
  double usedB = 0.0, usedE = 0.0;
  while (want > btol) {
    if (lo >= len.size()) return false;
    double span = 0.0, whole = 0.0;
    double rstar = kInf, Lstar = 0.0;
    std::size_t mstar = lo;
    for (std::size_t m = lo; m < len.size(); ++m) {
      span += len[m];
      const double rb = std::max(0.0, bcap[m] - usedB) / span;
      const double re = lone_rate(nu, kappa, std::max(0.0, ecap[m] - usedE), span);
      const double r = std::min(rb, re);
      if (r < rstar) {
        rstar = r;
        mstar = m;
        Lstar = span;
      }
    }
    whole = span;
    if (want <= rstar * whole * (1.0 + 1e-12) + btol) return true;
    if (mstar + 1 >= len.size()) return false;
    const double carry = rstar * Lstar;
    want -= carry;
    usedB += carry;
    usedE += lone_energy(nu, kappa, carry, Lstar);
    lo = mstar + 1;
  }
  return true;
}

}  // namespace

double oracle_min_time(const Instance& inst, const OracleConfig& cfg) {
  if (!(cfg.grid_resolution > 0.0) || !(cfg.grid_resolution < 1.0)) {
    throw std::invalid_argument("grid_resolution must lie in (0, 1)");
  }
  if (cfg.refinement_rounds < 1) {
    throw std::invalid_argument("refinement_rounds must be at least 1");
  }
  if (!std::isfinite(cfg.T_tolerance)) {
    throw std::invalid_argument("T_tolerance must be finite");
  }
  Instance norm = inst;
  norm.events = normalize_events(inst.events);
  norm.validate();
  const std::size_t K = norm.events.size();
  if (K > kMaxEpochs) {
    throw OracleSizeError("instance has " + std::to_string(K) +
                          " epochs; the exhaustive search stops at " +
                          std::to_string(kMaxEpochs));
  }
  if (!asymptotic_feasible(norm)) {
    throw InfeasibleInstanceError(
        "harvest cannot cover the bit demand at any power");
  }
  const double B1 = norm.total_bits1();
  const double B2 = norm.total_bits2();
  if (B1 <= 0.0 && B2 <= 0.0) return 0.0;

  const StepCurve E = energy_curve(norm);
  const StepCurve Q1 = bits1_curve(norm);
  const StepCurve Q2 = bits2_curve(norm);
  std::vector<double> tau, b1cap, b2cap, ecap;
  for (const ArrivalEvent& ev : norm.events) {
    tau.push_back(ev.t);
    b1cap.push_back(Q1.at(ev.t));
    b2cap.push_back(Q2.at(ev.t));
    ecap.push_back(E.at(ev.t));
  }

  SplitSearch ss;
  ss.ch = &norm.channel;
  ss.B1 = B1;
  ss.B2 = B2;
  ss.tol1 = 1e-9 * std::max(1.0, B1);
  ss.tol2 = 1e-9 * std::max(1.0, B2);
  ss.etol = 1e-9 * std::max(1.0, E.total());
  const double c = std::log(2.0) / norm.channel.kappa;
  ss.floor1 = c * norm.channel.sigma2 / norm.channel.s1;
  ss.floor2 = c * norm.channel.sigma2 / norm.channel.s2;
  ss.b1cap = &b1cap;
  ss.b2cap = &b2cap;
  ss.ecap = &ecap;
  ss.pick1.assign(K, 0.0);
  ss.pick2.assign(K, 0.0);
  ss.path1.assign(K, 0.0);
  ss.path2.assign(K, 0.0);

  std::vector<std::vector<double>> cand1(K), cand2(K);
  ss.cand1 = &cand1;
  ss.cand2 = &cand2;

  std::vector<double> best1(K, 0.0), best2(K, 0.0);
  auto probe = [&](double T) -> bool {
    if (B1 - Q1.before(T) > ss.tol1) return false;
    if (B2 - Q2.before(T) > ss.tol2) return false;
    std::size_t active = 0;
    while (active < K && tau[active] < T) ++active;
    ss.ell = active - 1;
    ss.len.assign(active, 0.0);
    for (std::size_t i = 0; i + 1 < active; ++i) ss.len[i] = tau[i + 1] - tau[i];
    ss.len[ss.ell] = T - tau[ss.ell];
    ss.tabulate();
    if (!ss.walk(0, 0.0, 0.0, 0.0)) return false;
    for (std::size_t i = 0; i < K; ++i) {
      best1[i] = i < active ? ss.pick1[i] : 0.0;
      best2[i] = i < active ? ss.pick2[i] : 0.0;
    }
    return true;
  };
  auto recenter = [&](double T) {
    std::size_t active = 0;
    while (active < K && tau[active] < T) ++active;
    ss.ell = active - 1;
    ss.len.assign(active, 0.0);
    for (std::size_t i = 0; i + 1 < active; ++i) ss.len[i] = tau[i + 1] - tau[i];
    ss.len[ss.ell] = T - tau[ss.ell];
    ss.tabulate();
    ss.best_total = kInf;
    ss.scan(0, 0.0, 0.0, 0.0);
    if (ss.best_total < kInf) {
      for (std::size_t i = 0; i < K; ++i) {
        best1[i] = i < active ? ss.pick1[i] : 0.0;
        best2[i] = i < active ? ss.pick2[i] : 0.0;
      }
    }
  };

  double step = cfg.grid_resolution;
  for (std::size_t i = 0; i < K; ++i) {
    cand1[i] = full_lattice(B1, step);
    cand2[i] = full_lattice(B2, step);
  }

  double lo_floor = 0.0;
  for (const ArrivalEvent& ev : norm.events) {
    if (ev.bits1 > 0.0 || ev.bits2 > 0.0) lo_floor = std::max(lo_floor, ev.t);
  }
  double lo = lo_floor;
  double hi = std::max({1.0, 2.0 * lo, tau.back() + 1.0});
  int doublings = 0;
  while (!probe(hi)) {
    hi *= 2.0;
    if (++doublings > 80) {
      throw InfeasibleInstanceError("no finite completion time found");
    }
  }
  const double width_goal =
      cfg.T_tolerance > 0.0 ? cfg.T_tolerance : 1e-12 * std::max(1.0, hi);

  for (int round = 0; round <= cfg.refinement_rounds; ++round) {
    if (round > 0) {
      step /= 4.0;
      for (std::size_t i = 0; i < K; ++i) {
        cand1[i] = window_lattice(B1, best1[i], step * B1);
        cand2[i] = window_lattice(B2, best2[i], step * B2);
      }
      // Times the coarse grid ruled out may open up on the finer one, so
      // the lower end of the bracket starts over each round.
      lo = lo_floor;
    }
    // The coarse grid caps how exact the first pass can get, so most of
    // the bisection budget goes to the cheap windowed rounds.
    const int iter_cap = round == 0 ? 16 : 60;
    for (int it = 0; it < iter_cap && hi - lo > width_goal; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (probe(mid) ? hi : lo) = mid;
    }
    if (round < cfg.refinement_rounds) recenter(hi);
  }
  return hi;
}

double oracle_single_user(const StepCurve& energy, const StepCurve& bits,
                          const ChannelParams& ch, int user) {
  if (user != 1 && user != 2) {
    throw std::invalid_argument("user must be 1 or 2");
  }
  ch.validate();
  const double nu = ch.sigma2 / (user == 1 ? ch.s1 : ch.s2);
  const double want = bits.total();
  if (want <= 0.0) return 0.0;
  const double c = std::log(2.0) / ch.kappa;
  if (want * c * nu >= energy.total()) {
    throw InfeasibleInstanceError(
        "harvest cannot cover the bit demand at any power");
  }

  std::vector<double> taus{0.0};
  for (double t : energy.instants()) {
    if (t > 0.0) taus.push_back(t);
  }
  for (double t : bits.instants()) {
    if (t > 0.0) taus.push_back(t);
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  const double btol = 1e-12 * std::max(1.0, want);
  auto feasible = [&](double T) -> bool {
    if (want - bits.before(T) > btol) return false;
    std::vector<double> len, bcap, ecap;
    for (std::size_t i = 0; i < taus.size() && taus[i] < T; ++i) {
      const double end = i + 1 < taus.size() ? std::min(taus[i + 1], T) : T;
      len.push_back(end - taus[i]);
      bcap.push_back(bits.at(taus[i]));
      ecap.push_back(energy.at(taus[i]));
    }
    if (len.empty()) return false;
    return lone_fits(len, bcap, ecap, nu, ch.kappa, want);
  };

  double lo = 0.0;
  for (double t : bits.instants()) {
    if (bits.at(t) - bits.before(t) > 0.0) lo = std::max(lo, t);
  }
  double hi = std::max({1.0, 2.0 * lo, taus.back() + 1.0});
  int doublings = 0;
  while (!feasible(hi)) {
    hi *= 2.0;
    if (++doublings > 80) {
      throw InfeasibleInstanceError("no finite completion time found");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace bcsched
