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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "bcsched/channel.hpp"
#include "bcsched/localopt.hpp"

namespace testutil {

// Deterministic uniform doubles built from raw mt19937_64 output so the
// sampled corpora are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Energy needed by one block, +inf where the rate pair overflows the map.
inline double block_energy(const bcsched::ChannelParams& ch, double dur,
                           double b1, double b2) {
  if (dur <= 0.0)
    return (b1 > 0.0 || b2 > 0.0) ? std::numeric_limits<double>::infinity()
                                  : 0.0;
  try {
    return dur * bcsched::min_power(ch, b1 / dur, b2 / dur).total;
  } catch (const bcsched::RangeError&) {
    return std::numeric_limits<double>::infinity();
  }
}

struct PairGridBest {
  double consumed = std::numeric_limits<double>::infinity();
  double x = 0.0;
  double y = 0.0;
};

// Exhaustive refined grid over the epoch-1 bit split at fixed durations.
// Independent of the closed-form solver: energies come from min_power only.
inline PairGridBest grid_pair_energy(const bcsched::TwoEpochProblem& p,
                                     double T2_used, int n = 64,
                                     int rounds = 6) {
  const double xmax = std::min(p.b11_cap, p.b1_total);
  const double ymax = std::min(p.b21_cap, p.b2_total);
  PairGridBest best;
  auto eval = [&](double x, double y) {
    x = std::clamp(x, 0.0, xmax);
    y = std::clamp(y, 0.0, ymax);
    const double e1 = block_energy(p.ch, p.T1, x, y);
    if (e1 > p.e1_cap * (1.0 + 1e-9) + 1e-12) return;
    const double e2 =
        block_energy(p.ch, T2_used, p.b1_total - x, p.b2_total - y);
    const double tot = e1 + e2;
    if (tot < best.consumed) {
      best.consumed = tot;
      best.x = x;
      best.y = y;
    }
  };
  double cx = 0.5 * xmax, cy = 0.5 * ymax;
  double hx = 0.5 * xmax, hy = 0.5 * ymax;
  for (int round = 0; round < rounds; ++round) {
    const double x0 = std::max(0.0, cx - hx), x1 = std::min(xmax, cx + hx);
    const double y0 = std::max(0.0, cy - hy), y1 = std::min(ymax, cy + hy);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        eval(x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * j / n);
    cx = best.x;
    cy = best.y;
    hx = std::max((x1 - x0) * 2.0 / n, 1e-14 * (xmax + 1.0));
    hy = std::max((y1 - y0) * 2.0 / n, 1e-14 * (ymax + 1.0));
  }
  return best;
}

// Smallest pair completion found by bisecting on the grid oracle above.
inline double grid_pair_min_time(const bcsched::TwoEpochProblem& p,
                                 int n = 48, int rounds = 3) {
  const double Etot = p.E1 + p.E2;
  auto feasible = [&](double tau) {
    if (tau <= p.T1) {
      if (p.b1_total > p.b11_cap * (1.0 + 1e-9) + 1e-12) return false;
      if (p.b2_total > p.b21_cap * (1.0 + 1e-9) + 1e-12) return false;
      return block_energy(p.ch, tau, p.b1_total, p.b2_total) <=
             std::min(Etot, p.e1_cap) * (1.0 + 1e-12) + 1e-12;
    }
    return grid_pair_energy(p, tau - p.T1, n, rounds).consumed <=
           Etot * (1.0 + 1e-12) + 1e-12;
  };
  const double hi0 = p.T1 + p.T2_max;
  if (!feasible(hi0)) return std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = hi0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace testutil
