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

#include "bcsched/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcsched/errors.hpp"

namespace bcsched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest admissible normalized rate r / kappa.  Beyond this the power map
// overflows double range anyway (2^1000).
constexpr double kMaxRateOverKappa = 1000.0;

void check_rate_range(const ChannelParams& ch, double r, const char* name) {
  if (!(r >= 0.0)) {
    throw std::invalid_argument(std::string(name) + " must be nonnegative");
  }
  if (r / ch.kappa > kMaxRateOverKappa) {
    throw RangeError(std::string(name) + " / kappa exceeds " +
                     std::to_string(kMaxRateOverKappa));
  }
}

void check_power(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("power must be finite and nonnegative");
  }
}

}  // namespace

void ChannelParams::validate() const {
  if (!(s1 > 0.0) || !(s2 > 0.0) || !std::isfinite(s1) || !std::isfinite(s2)) {
    throw std::invalid_argument("channel gains must be positive and finite");
  }
  if (s1 < s2) {
    throw std::invalid_argument("stronger-user gain s1 must not be below s2");
  }
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("noise variance must be positive and finite");
  }
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("rate scale kappa must be positive and finite");
  }
}

namespace detail {

RegionCoef coef(const ChannelParams& ch) {
  RegionCoef k;
  k.nu1 = ch.sigma2 / ch.s1;
  k.nu2 = ch.sigma2 / ch.s2;
  k.dnu = k.nu2 - k.nu1;
  k.c = M_LN2 / ch.kappa;
  return k;
}

double p1_of_r1(const RegionCoef& k, double r1) {
  const double x = k.c * r1;
  if (x > 700.0) return kInf;
  return k.nu1 * std::expm1(x);
}

double g_power(const RegionCoef& k, double r1, double r2) {
  const double x1 = k.c * (r1 + r2);
  const double x2 = k.c * r2;
  if (x1 > 700.0 || x2 > 700.0) return kInf;
  // nu1*(e^{x1}-1) + (nu2-nu1)*(e^{x2}-1) == nu1 e^{x1} + dnu e^{x2} - nu2
  return k.nu1 * std::expm1(x1) + k.dnu * std::expm1(x2);
}

double h2_rate(const RegionCoef& k, double power, double r1) {
  const double p1 = p1_of_r1(k, r1);
  if (!(p1 <= power)) return -kInf;
  return std::log1p((power - p1) / (p1 + k.nu2)) / k.c;
}

double h1_rate(const RegionCoef& k, double power, double r2) {
  const double x = k.c * r2;
  if (x > 700.0) return -kInf;
  const double e = std::exp(-x);
  // p1 = (P + nu2) e^{-x} - nu2, written to stay accurate for small x.
  const double p1 = power * e + k.nu2 * std::expm1(-x);
  if (p1 < 0.0) return -kInf;
  return std::log1p(p1 / k.nu1) / k.c;
}

}  // namespace detail

double rate_stronger(const ChannelParams& ch, double power, double r2) {
  ch.validate();
  check_power(power);
  check_rate_range(ch, r2, "r2");
  const detail::RegionCoef k = detail::coef(ch);
  const double cap = detail::h2_rate(k, power, 0.0);
  if (r2 > cap * (1.0 + 1e-12) + 1e-300) {
    throw InfeasibleRateError("r2 exceeds the weaker-user capacity at this power");
  }
  const double r1 = detail::h1_rate(k, power, std::min(r2, cap));
  return std::max(r1, 0.0);
}

double rate_weaker(const ChannelParams& ch, double power, double r1) {
  ch.validate();
  check_power(power);
  check_rate_range(ch, r1, "r1");
  const detail::RegionCoef k = detail::coef(ch);
  double p1 = detail::p1_of_r1(k, r1);
  if (p1 > power * (1.0 + 1e-12) + 1e-300) {
    throw InfeasibleRateError("r1 exceeds the stronger-user capacity at this power");
  }
  p1 = std::min(p1, power);
  return std::log1p((power - p1) / (p1 + k.nu2)) / k.c;
}

MinPowerResult min_power(const ChannelParams& ch, double r1, double r2) {
  ch.validate();
  check_rate_range(ch, r1, "r1");
  check_rate_range(ch, r2, "r2");
  const detail::RegionCoef k = detail::coef(ch);
  MinPowerResult out;
  out.split.p1 = detail::p1_of_r1(k, r1);
  out.split.p2 = std::expm1(k.c * r2) * (out.split.p1 + k.nu2);
  out.total = out.split.total();
  if (!std::isfinite(out.total)) {
    throw RangeError("rate pair overflows the power map");
  }
  return out;
}

RateRegion awgn_region(const ChannelParams& ch) {
  ch.validate();
  const detail::RegionCoef k = detail::coef(ch);
  RateRegion region;
  region.h1 = [k](double power, double r2) { return detail::h1_rate(k, power, r2); };
  region.h2 = [k](double power, double r1) { return detail::h2_rate(k, power, r1); };
  return region;
}

namespace {

using Fn = std::function<double(double, double)>;

struct Stencil {
  double f00, fp, fm, fr, fl, fpr, fpl, fmr, fml;
  double hp, hr;
};

Stencil sample_stencil(const Fn& f, double p, double r, double hp, double hr) {
  Stencil s;
  s.hp = hp;
  s.hr = hr;
  s.f00 = f(p, r);
  s.fp = f(p + hp, r);
  s.fm = f(p - hp, r);
  s.fr = f(p, r + hr);
  s.fl = f(p, r - hr);
  s.fpr = f(p + hp, r + hr);
  s.fpl = f(p + hp, r - hr);
  s.fmr = f(p - hp, r + hr);
  s.fml = f(p - hp, r - hr);
  return s;
}

void check_one_map(const Fn& f, const Fn& partner, const char* tag,
                   bool mixed_must_vanish, const RegionGrid& grid,
                   double rel_step, double tol, RegionPropertyReport* report) {
  const double ratio = (grid.n_power > 1)
                           ? std::pow(grid.p_max / grid.p_min, 1.0 / (grid.n_power - 1))
                           : 1.0;
  for (int ip = 0; ip < grid.n_power; ++ip) {
    const double p = grid.p_min * std::pow(ratio, ip);
    // The partner map at rate 0 bounds the admissible partner rate axis.
    const double r_cap = partner(p, 0.0);
    if (!(r_cap > 0.0) || !std::isfinite(r_cap)) continue;
    for (int ir = 0; ir < grid.n_rate; ++ir) {
      const double r = grid.r_fill * r_cap * (ir + 0.3) / grid.n_rate;
      const double hp = rel_step * p;
      const double hr = rel_step * std::max(r, 1e-3 * r_cap);
      const Stencil s = sample_stencil(f, p, r, hp, hr);
      ++report->samples;

      const double scale = std::max(1.0, std::fabs(s.f00));
      auto flag = [&](const char* prop, double value) {
        report->violations.push_back({std::string(tag) + "." + prop, p, r, value});
      };

      const bool finite = std::isfinite(s.f00) && std::isfinite(s.fp) &&
                          std::isfinite(s.fm) && std::isfinite(s.fr) &&
                          std::isfinite(s.fl) && std::isfinite(s.fpr) &&
                          std::isfinite(s.fpl) && std::isfinite(s.fmr) &&
                          std::isfinite(s.fml);
      if (!finite) {
        flag("finite", s.f00);
        continue;
      }

      if (s.f00 < -tol * scale) flag("nonnegative", s.f00);

      const double d_dp = (s.fp - s.fm) / (2 * s.hp);
      if (d_dp < -tol * scale) flag("increasing_in_power", d_dp);

      const double d_dr = (s.fr - s.fl) / (2 * s.hr);
      if (d_dr > tol * scale) flag("decreasing_in_rate", d_dr);

      const double d2_pp = (s.fp - 2 * s.f00 + s.fm) / (s.hp * s.hp);
      if (d2_pp > tol * scale) flag("concave_in_power", d2_pp);

      const double d2_rr = (s.fr - 2 * s.f00 + s.fl) / (s.hr * s.hr);
      if (d2_rr > tol * scale) flag("concave_in_rate", d2_rr);

      const double mixed = (s.fpr - s.fpl - s.fmr + s.fml) / (4 * s.hp * s.hr);
      if (mixed_must_vanish) {
        const double mscale =
            std::max({std::fabs(d2_pp), std::fabs(d2_rr), 1.0});
        if (std::fabs(mixed) > tol * mscale) flag("cross_partial_zero", mixed);
      } else {
        if (mixed < -tol * scale) flag("cross_partial_sign", mixed);
      }
    }
  }
}

}  // namespace

RegionPropertyReport certify_region_properties(const RateRegion& region,
                                               const RegionGrid& grid,
                                               double rel_step, double tol) {
  RegionPropertyReport report;
  check_one_map(region.h1, region.h2, "h1", /*mixed_must_vanish=*/false, grid,
                rel_step, tol, &report);
  check_one_map(region.h2, region.h1, "h2", /*mixed_must_vanish=*/true, grid,
                rel_step, tol, &report);
  return report;
}

RegionPropertyReport certify_region_properties(const ChannelParams& ch,
                                               const RegionGrid& grid,
                                               double rel_step, double tol) {
  return certify_region_properties(awgn_region(ch), grid, rel_step, tol);
}

}  // namespace bcsched
