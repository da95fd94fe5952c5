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

#include "bcsched/localopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "bcsched/errors.hpp"

namespace bcsched {
namespace {

using detail::RegionCoef;

constexpr int kMaxBisect = 200;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ctx {
  RegionCoef k;
  double T1 = 0.0, T2 = 0.0;
  double bt1 = 0.0, bt2 = 0.0;
  double CE = 0.0, C1 = 0.0, C2 = 0.0;
  double Etot = 0.0;
  double tb1 = 0.0, tb2 = 0.0, te = 0.0;
};

double bits_tol(double total) { return std::max(1e-12, 1e-10 * total); }

Ctx make_ctx(const TwoEpochProblem& p) {
  p.ch.validate();
  auto bad = [](double v) { return !std::isfinite(v) || v < 0.0; };
  if (!std::isfinite(p.T1) || p.T1 <= 0.0)
    throw std::invalid_argument("two-epoch problem: T1 must be positive");
  if (bad(p.T2_max) || bad(p.E1) || bad(p.E2) || bad(p.E_next) ||
      bad(p.b1_total) || bad(p.b2_total) || bad(p.e1_cap) ||
      bad(p.b11_cap) || bad(p.b21_cap))
    throw std::invalid_argument("two-epoch problem: negative or non-finite field");
  Ctx c;
  c.k = detail::coef(p.ch);
  c.T1 = p.T1;
  c.T2 = p.T2_max;
  c.bt1 = p.b1_total;
  c.bt2 = p.b2_total;
  c.CE = p.e1_cap;
  c.C1 = p.b11_cap;
  c.C2 = p.b21_cap;
  c.Etot = p.E1 + p.E2;
  c.tb1 = bits_tol(c.bt1);
  c.tb2 = bits_tol(c.bt2);
  c.te = std::max(1e-12, 1e-10 * c.Etot);
  return c;
}

double g(const Ctx& c, double r1, double r2) {
  return detail::g_power(c.k, r1, r2);
}

struct Cand {
  TwoEpochSolution sol;
  double objective = kInf;
};

bool better(const Cand& a, const Cand& b) {
  const double tie =
      1e-9 * std::max(std::abs(a.objective), std::abs(b.objective)) + 1e-15;
  if (a.objective < b.objective - tie) return true;
  if (b.objective < a.objective - tie) return false;
  const int na = a.sol.pattern.active_count();
  const int nb = b.sol.pattern.active_count();
  if (na != nb) return na < nb;
  return a.sol.pattern.index() < b.sol.pattern.index();
}

// Assembles and screens a candidate from its bit split.  x and y are the
// pair bits of each user delivered in epoch 1; whatever remains goes into
// the second block.  Returns nothing if the point violates the pair's caps,
// budget, or the no-power-drop requirement.
std::optional<Cand> two_block(const Ctx& c, double x, double y, double t2,
                              double active1, CasePattern pat, Objective obj) {
  if (!(std::isfinite(x) && std::isfinite(y) && std::isfinite(t2) &&
        std::isfinite(active1)))
    return std::nullopt;
  if (x < -c.tb1 || y < -c.tb2) return std::nullopt;
  x = std::clamp(x, 0.0, c.bt1);
  y = std::clamp(y, 0.0, c.bt2);
  t2 = std::clamp(t2, 0.0, c.T2);
  const double b12 = c.bt1 - x;
  const double b22 = c.bt2 - y;

  TwoEpochSolution s;
  s.pattern = pat;
  s.active1 = active1;
  s.T2_used = t2;
  if (active1 <= 0.0) {
    if (x > c.tb1 || y > c.tb2) return std::nullopt;
    s.active1 = 0.0;
  } else {
    s.epoch1.r1 = x / active1;
    s.epoch1.r2 = y / active1;
    s.epoch1.power = g(c, s.epoch1.r1, s.epoch1.r2);
  }
  if (t2 <= 0.0) {
    if (b12 > c.tb1 || b22 > c.tb2) return std::nullopt;
    s.T2_used = 0.0;
  } else {
    s.epoch2.r1 = b12 / t2;
    s.epoch2.r2 = b22 / t2;
    s.epoch2.power = g(c, s.epoch2.r1, s.epoch2.r2);
  }
  if (!std::isfinite(s.epoch1.power) || !std::isfinite(s.epoch2.power))
    return std::nullopt;

  if (s.b11() > c.C1 + c.tb1) return std::nullopt;
  if (s.b21() > c.C2 + c.tb2) return std::nullopt;
  if (s.consumed1() > c.CE + c.te) return std::nullopt;
  if (s.consumed() > c.Etot + c.te) return std::nullopt;
  if (s.T2_used > 0.0 && s.active1 > 0.0) {
    // a power drop across the boundary always admits a cheaper smoothing
    if (s.epoch1.power > s.epoch2.power * (1.0 + 1e-9) + 1e-12)
      return std::nullopt;
  }
  s.E_transfer = std::max(0.0, c.Etot - s.consumed());

  Cand cd;
  cd.sol = s;
  cd.objective =
      (obj == Objective::kTime) ? s.active1 + s.T2_used : s.consumed();
  return cd;
}

// Total power shared by both epochs when the weaker user's bits fill around
// a pinned stronger split (geometric-mean form of the bit conservation).
double common_power(const Ctx& c, double r11, double r12) {
  const double ln =
      (c.k.c * c.bt2 + c.T1 * std::log(detail::p1_of_r1(c.k, r11) + c.k.nu2) +
       c.T2 * std::log(detail::p1_of_r1(c.k, r12) + c.k.nu2)) /
      (c.T1 + c.T2);
  return std::exp(ln) - c.k.nu2;
}

void energy_candidates(const Ctx& c, CasePattern pat, std::vector<Cand>* out) {
  const double Ttot = c.T1 + c.T2;
  if (c.T2 <= 0.0) {
    // no second block: the split is forced
    if (auto cd = two_block(c, c.bt1, c.bt2, 0.0, c.T1, pat, Objective::kEnergy))
      if (!pat.energy_active && !pat.b1_active && !pat.b2_active)
        out->push_back(*cd);
    return;
  }
  auto emit = [&](double x, double y) {
    if (auto cd = two_block(c, x, y, c.T2, c.T1, pat, Objective::kEnergy))
      out->push_back(*cd);
  };
  if (pat.b1_active && c.C1 > c.bt1 + c.tb1) return;
  if (pat.b2_active && c.C2 > c.bt2 + c.tb2) return;
  const double xc = std::min(c.C1, c.bt1);
  const double yc = std::min(c.C2, c.bt2);

  if (!pat.energy_active) {
    if (!pat.b1_active && !pat.b2_active) {
      emit(c.T1 * c.bt1 / Ttot, c.T1 * c.bt2 / Ttot);
    } else if (pat.b1_active && pat.b2_active) {
      emit(xc, yc);
    } else if (pat.b1_active) {
      // weaker bits fill to a common total power around the pinned split
      const double r11 = xc / c.T1;
      const double r12 = (c.bt1 - xc) / c.T2;
      const double P = common_power(c, r11, r12);
      if (!std::isfinite(P)) return;
      const double y = c.T1 * detail::h2_rate(c.k, P, r11);
      if (std::isfinite(y) && y >= 0.0)
        emit(xc, std::min(y, c.bt2));
      else
        emit(xc, 0.0);
    } else {
      // stronger bits split so the rate sums match across the boundary
      const double d = (c.bt2 - yc) / c.T2 - yc / c.T1;
      emit(c.T1 * (c.bt1 + c.T2 * d) / Ttot, yc);
    }
    return;
  }

  const double P1 = c.CE / c.T1;
  if (pat.b1_active && pat.b2_active) {
    const double e1 = c.T1 * g(c, xc / c.T1, yc / c.T1);
    if (std::abs(e1 - c.CE) <= std::max(c.te, 1e-9 * std::max(1.0, c.CE)))
      emit(xc, yc);
    return;
  }
  if (pat.b1_active) {
    emit(xc, c.T1 * detail::h2_rate(c.k, P1, xc / c.T1));
    return;
  }
  if (pat.b2_active) {
    const double r11 = detail::h1_rate(c.k, P1, yc / c.T1);
    if (std::isfinite(r11)) emit(c.T1 * r11, yc);
    return;
  }
  // only the energy cap pinned: interior keeps the stronger rate constant
  // across the pair; the box edges of the bit split are tried as well
  emit(c.T1 * c.bt1 / Ttot, c.T1 * detail::h2_rate(c.k, P1, c.bt1 / Ttot));
  emit(c.T1 * detail::h1_rate(c.k, P1, 0.0), 0.0);
  {
    const double r11 = detail::h1_rate(c.k, P1, c.bt2 / c.T1);
    if (std::isfinite(r11)) emit(c.T1 * r11, c.bt2);
  }
  emit(0.0, c.T1 * detail::h2_rate(c.k, P1, 0.0));
  emit(c.bt1, c.T1 * detail::h2_rate(c.k, P1, c.bt1 / c.T1));
}

// Smallest duration of a single block carrying (b1, b2) within `budget`.
std::optional<double> min_block_time(const Ctx& c, double b1, double b2,
                                     double budget, double hi) {
  b1 = std::max(b1, 0.0);
  b2 = std::max(b2, 0.0);
  if (b1 <= 0.0 && b2 <= 0.0) return 0.0;
  if (!(budget > 0.0) || !(hi > 0.0)) return std::nullopt;
  auto need = [&](double t) { return t * g(c, b1 / t, b2 / t); };
  // the budget is often the exact consumption of an incumbent allocation,
  // so the boundary case must stay feasible under roundoff
  if (need(hi) > budget + c.te) return std::nullopt;
  double lo = 0.0, h = hi;
  for (int i = 0; i < kMaxBisect; ++i) {
    const double mid = 0.5 * (lo + h);
    if (mid <= lo || mid >= h) break;
    (need(mid) <= budget ? h : lo) = mid;
  }
  return h;
}

void time_candidates(const Ctx& c, CasePattern pat, std::vector<Cand>* out) {
  auto emit2 = [&](double x, double y, double t2) {
    if (auto cd = two_block(c, x, y, t2, c.T1, pat, Objective::kTime))
      out->push_back(*cd);
  };
  if (pat.b1_active && c.C1 > c.bt1 + c.tb1) return;
  if (pat.b2_active && c.C2 > c.bt2 + c.tb2) return;
  if (pat.energy_active && c.CE > c.Etot + c.te) return;
  const double xc = std::min(c.C1, c.bt1);
  const double yc = std::min(c.C2, c.bt2);
  const bool short_is_capped = c.CE < c.Etot - c.te;

  // completes inside epoch 1, all pair traffic in one block
  if (!pat.b1_active && !pat.b2_active &&
      pat.energy_active == short_is_capped && c.bt1 <= c.C1 + c.tb1 &&
      c.bt2 <= c.C2 + c.tb2) {
    if (auto a = min_block_time(c, c.bt1, c.bt2, std::min(c.Etot, c.CE), c.T1))
      if (auto cd = two_block(c, c.bt1, c.bt2, 0.0, *a, pat, Objective::kTime))
        out->push_back(*cd);
  }
  if (c.T2 <= 0.0) return;

  if (!pat.energy_active && !pat.b1_active && !pat.b2_active) {
    auto need = [&](double tau) { return tau * g(c, c.bt1 / tau, c.bt2 / tau); };
    if (need(c.T1) < c.Etot - c.te) return;  // would finish before the boundary
    if (need(c.T1 + c.T2) > c.Etot + c.te) return;
    double lo = c.T1, hi = c.T1 + c.T2;
    for (int i = 0; i < kMaxBisect; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (need(mid) <= c.Etot ? hi : lo) = mid;
    }
    emit2(c.T1 * c.bt1 / hi, c.T1 * c.bt2 / hi, hi - c.T1);
    return;
  }

  if (!pat.energy_active && pat.b1_active && !pat.b2_active) {
    // constant total power, stronger split pinned; the weaker bits carried
    // grow with the second duration, so bisect on them
    const double b12 = c.bt1 - xc;
    // weaker split at a box edge: epoch 2 then carries a fixed remainder
    for (const double yb : {0.0, c.bt2}) {
      const double e1 = c.T1 * g(c, xc / c.T1, yb / c.T1);
      if (!std::isfinite(e1)) continue;
      if (auto t2 = min_block_time(c, b12, c.bt2 - yb, c.Etot - e1, c.T2))
        emit2(xc, yb, *t2);
    }
    const double p11 = detail::p1_of_r1(c.k, xc / c.T1);
    double H = c.T2;
    if (p11 > 0.0) H = std::min(H, c.Etot / p11 - c.T1);
    if (H < 0.0) return;
    auto carried = [&](double t2) -> double {
      const double P = c.Etot / (c.T1 + t2);
      const double v1 = detail::h2_rate(c.k, P, xc / c.T1);
      if (!std::isfinite(v1)) return -kInf;
      if (t2 <= 0.0) return (b12 <= c.tb1) ? c.T1 * v1 : -kInf;
      const double v2 = detail::h2_rate(c.k, P, b12 / t2);
      if (!std::isfinite(v2)) return -kInf;
      return c.T1 * v1 + t2 * v2;
    };
    if (carried(H) < c.bt2 - c.tb2) return;
    double t2s = H;
    if (carried(0.0) >= c.bt2) {
      t2s = 0.0;
    } else if (carried(H) >= c.bt2) {
      double lo = 0.0, hi = H;
      for (int i = 0; i < kMaxBisect; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (carried(mid) >= c.bt2 ? hi : lo) = mid;
      }
      t2s = hi;
    }
    const double P = c.Etot / (c.T1 + t2s);
    const double y =
        std::clamp(c.T1 * detail::h2_rate(c.k, P, xc / c.T1), 0.0, c.bt2);
    emit2(xc, y, t2s);
    return;
  }

  if (!pat.energy_active && !pat.b1_active && pat.b2_active) {
    // weaker split pinned; stronger bits split so rate sums match
    const double r21 = yc / c.T1;
    const double b22 = c.bt2 - yc;
    auto split_x = [&](double t2) {
      const double d = (t2 > 0.0 ? b22 / t2 : 0.0) - r21;
      return std::clamp(c.T1 * (c.bt1 + t2 * d) / (c.T1 + t2), 0.0, c.bt1);
    };
    auto need = [&](double t2) -> double {
      if (t2 <= 0.0 && b22 > c.tb2) return kInf;
      const double x = split_x(t2);
      double v = c.T1 * g(c, x / c.T1, r21);
      if (t2 > 0.0) v += t2 * g(c, (c.bt1 - x) / t2, b22 / t2);
      return v;
    };
    if (need(c.T2) > c.Etot + c.te) return;
    double t2s = c.T2;
    if (need(0.0) <= c.Etot) {
      t2s = 0.0;
    } else if (need(c.T2) <= c.Etot) {
      double lo = 0.0, hi = c.T2;
      for (int i = 0; i < kMaxBisect; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (need(mid) <= c.Etot ? hi : lo) = mid;
      }
      t2s = hi;
    }
    emit2(split_x(t2s), yc, t2s);
    return;
  }

  if (pat.energy_active && !pat.b1_active && !pat.b2_active) {
    const double P1 = c.CE / c.T1;
    const double budget2 = c.Etot - c.CE;
    // interior: stronger rate constant across the pair
    auto deficit = [&](double t2) -> double {
      const double rho = c.bt1 / (c.T1 + t2);
      const double r21 = detail::h2_rate(c.k, P1, rho);
      if (!std::isfinite(r21) || c.T1 * r21 < -c.tb2) return kInf;
      const double y = std::max(c.T1 * r21, 0.0);
      if (t2 <= 0.0) return (c.bt2 - y > c.tb2) ? kInf : -budget2;
      const double r22 = std::max(c.bt2 - y, 0.0) / t2;
      return t2 * g(c, rho, r22) - budget2;
    };

    double t2s = -1.0;
    if (deficit(0.0) <= 0.0) {
      t2s = 0.0;
    } else {
      // The affordable stretch can close again before T2 (once the weaker
      // fill saturates the pair total, stretching the second block only
      // dilutes it), so scan for a foothold instead of probing the far end.
      double foot = deficit(c.T2) <= 0.0 ? c.T2 : -1.0;
      for (int i = 1; i < 64 && foot < 0.0; ++i) {
        const double t = c.T2 * static_cast<double>(i) / 64.0;
        if (deficit(t) <= 0.0) foot = t;
      }
      if (foot >= 0.0) {
        double lo = 0.0, hi = foot;
        for (int i = 0; i < kMaxBisect; ++i) {
          const double mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          (deficit(mid) <= 0.0 ? hi : lo) = mid;
        }
        t2s = hi;
      } else if (deficit(c.T2) <= c.te) {
        t2s = c.T2;
      }
    }
    if (t2s >= 0.0) {
      const double rho = c.bt1 / (c.T1 + t2s);
      const double r21 = detail::h2_rate(c.k, P1, rho);
      if (std::isfinite(r21) && c.T1 * r21 >= -c.tb2)
        emit2(c.T1 * rho, std::clamp(c.T1 * r21, 0.0, c.bt2), t2s);
    }
    // box edges of the epoch-1 split, remainder in one block
    auto edge = [&](double x, double y) {
      if (!(std::isfinite(x) && std::isfinite(y))) return;
      if (x < -c.tb1 || x > c.bt1 + c.tb1 || y < -c.tb2 || y > c.bt2 + c.tb2)
        return;
      x = std::clamp(x, 0.0, c.bt1);
      y = std::clamp(y, 0.0, c.bt2);
      if (auto t2 = min_block_time(c, c.bt1 - x, c.bt2 - y, budget2, c.T2))
        emit2(x, y, *t2);
    };
    edge(c.bt1, c.T1 * detail::h2_rate(c.k, P1, c.bt1 / c.T1));
    edge(0.0, c.T1 * detail::h2_rate(c.k, P1, 0.0));
    edge(c.T1 * detail::h1_rate(c.k, P1, 0.0), 0.0);
    edge(c.T1 * detail::h1_rate(c.k, P1, c.bt2 / c.T1), c.bt2);
    return;
  }

  if (pat.energy_active && pat.b1_active && !pat.b2_active) {
    const double r21 = detail::h2_rate(c.k, c.CE / c.T1, xc / c.T1);
    if (!std::isfinite(r21) || c.T1 * r21 < -c.tb2) return;
    if (c.T1 * r21 > c.bt2 + c.tb2) return;
    const double y = std::clamp(c.T1 * r21, 0.0, c.bt2);
    if (auto t2 = min_block_time(c, c.bt1 - xc, c.bt2 - y, c.Etot - c.CE, c.T2))
      emit2(xc, y, *t2);
    return;
  }

  if (pat.energy_active && !pat.b1_active && pat.b2_active) {
    const double r11 = detail::h1_rate(c.k, c.CE / c.T1, yc / c.T1);
    if (!std::isfinite(r11) || c.T1 * r11 < -c.tb1) return;
    if (c.T1 * r11 > c.bt1 + c.tb1) return;
    const double x = std::clamp(c.T1 * r11, 0.0, c.bt1);
    if (auto t2 = min_block_time(c, c.bt1 - x, c.bt2 - yc, c.Etot - c.CE, c.T2))
      emit2(x, yc, *t2);
    return;
  }

  // both bit caps pinned (with or without the energy pin)
  const double e1 = c.T1 * g(c, xc / c.T1, yc / c.T1);
  if (pat.energy_active &&
      std::abs(e1 - c.CE) > std::max(c.te, 1e-9 * std::max(1.0, c.CE)))
    return;
  if (e1 > std::min(c.CE, c.Etot) + c.te) return;
  if (auto t2 = min_block_time(c, c.bt1 - xc, c.bt2 - yc, c.Etot - e1, c.T2))
    emit2(xc, yc, *t2);
}

std::vector<Cand> candidates(const Ctx& c, CasePattern pat, Objective obj) {
  std::vector<Cand> out;
  if (obj == Objective::kEnergy)
    energy_candidates(c, pat, &out);
  else
    time_candidates(c, pat, &out);
  return out;
}

TwoEpochSolution best_of_all(const Ctx& c, Objective obj) {
  std::vector<Cand> all;
  for (int idx = 0; idx < 8; ++idx) {
    CasePattern pat;
    pat.energy_active = (idx & 4) != 0;
    pat.b1_active = (idx & 2) != 0;
    pat.b2_active = (idx & 1) != 0;
    auto v = candidates(c, pat, obj);
    all.insert(all.end(), v.begin(), v.end());
  }
  if (all.empty()) {
    std::ostringstream os;
    os << "two-epoch subproblem admits no feasible allocation"
       << " (T1=" << c.T1 << " T2=" << c.T2 << " bt1=" << c.bt1
       << " bt2=" << c.bt2 << " Etot=" << c.Etot << " CE=" << c.CE
       << " C1=" << c.C1 << " C2=" << c.C2 << ")";
    throw PairInfeasibleError(os.str());
  }
  const Cand* best = &all.front();
  for (const Cand& cd : all)
    if (better(cd, *best)) best = &cd;
  return best->sol;
}

}  // namespace

std::optional<TwoEpochSolution> solve_case(const TwoEpochProblem& p,
                                           CasePattern pattern, Objective obj) {
  const Ctx c = make_ctx(p);
  auto v = candidates(c, pattern, obj);
  if (v.empty()) return std::nullopt;
  const Cand* best = &v.front();
  for (const Cand& cd : v)
    if (better(cd, *best)) best = &cd;
  return best->sol;
}

TwoEpochSolution minimize_time(const TwoEpochProblem& p) {
  return best_of_all(make_ctx(p), Objective::kTime);
}

TwoEpochSolution minimize_energy(const TwoEpochProblem& p) {
  return best_of_all(make_ctx(p), Objective::kEnergy);
}

double bisect_T2_b1_active(const TwoEpochProblem& p) {
  const Ctx c = make_ctx(p);
  if (c.C1 > c.bt1 + c.tb1)
    throw std::out_of_range("stronger-bit cap exceeds the pair total");
  const double xc = std::min(c.C1, c.bt1);
  const double b12 = c.bt1 - xc;
  const double p11 = detail::p1_of_r1(c.k, xc / c.T1);
  double H = c.T2;
  if (p11 > 0.0) H = std::min(H, c.Etot / p11 - c.T1);
  if (H < 0.0)
    throw std::out_of_range("pinned stronger split needs more than the budget");
  auto carried = [&](double t2) -> double {
    const double P = c.Etot / (c.T1 + t2);
    const double v1 = detail::h2_rate(c.k, P, xc / c.T1);
    if (!std::isfinite(v1)) return -kInf;
    if (t2 <= 0.0) return (b12 <= c.tb1) ? c.T1 * v1 : -kInf;
    const double v2 = detail::h2_rate(c.k, P, b12 / t2);
    if (!std::isfinite(v2)) return -kInf;
    return c.T1 * v1 + t2 * v2;
  };
  if (carried(H) < c.bt2 - c.tb2)
    throw std::out_of_range("target weaker bits unreachable within T2_max");
  if (carried(0.0) >= c.bt2) return 0.0;
  if (carried(H) < c.bt2) return H;
  double lo = 0.0, hi = H;
  for (int i = 0; i < kMaxBisect; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (carried(mid) >= c.bt2 ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace bcsched
