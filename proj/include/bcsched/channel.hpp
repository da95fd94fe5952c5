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

#include <functional>
#include <string>
#include <vector>

namespace bcsched {

// Two-user scalar Gaussian broadcast channel, user 1 being the stronger
// receiver (s1 > s2).  kappa scales rates: r = kappa * log2(1 + SNR), so
// kappa = 0.5 is the discrete-time channel and kappa = bandwidth gives
// bits per second for a continuous-time channel.
struct ChannelParams {
  double s1 = 2.0;      // stronger-user power gain
  double s2 = 1.0;      // weaker-user power gain
  double sigma2 = 1.0;  // noise variance at both receivers (after gain)
  double kappa = 0.5;   // rate scale

  void validate() const;
};

struct PowerSplit {
  double p1 = 0.0;  // power carrying the stronger user's stream
  double p2 = 0.0;  // power carrying the weaker user's stream
  double total() const { return p1 + p2; }
};

struct MinPowerResult {
  double total = 0.0;
  PowerSplit split;
};

// Maximum stronger-user rate when total power P also carries r2 for the
// weaker user (superposition coding, weaker stream treated as noise at
// neither receiver: user 1 decodes and cancels it).
double rate_stronger(const ChannelParams& ch, double power, double r2);

// Maximum weaker-user rate when total power P also carries r1 for the
// stronger user; the stronger stream acts as interference at receiver 2.
double rate_weaker(const ChannelParams& ch, double power, double r1);

// Least total power supporting the rate pair (r1, r2), with its split.
MinPowerResult min_power(const ChannelParams& ch, double r1, double r2);

// A rate region presented through its two boundary maps
// h1(P, r2) and h2(P, r1).  Used so the property certifier can also run
// against user-supplied (possibly broken) regions.
struct RateRegion {
  std::function<double(double power, double r2)> h1;
  std::function<double(double power, double r1)> h2;
};

RateRegion awgn_region(const ChannelParams& ch);

// Sample grid for certify_region_properties.  Powers are placed
// geometrically in [p_min, p_max]; for each power the partner rate ranges
// over [0, r_fill * h(P, 0)].
struct RegionGrid {
  double p_min = 0.25;
  double p_max = 16.0;
  int n_power = 8;
  int n_rate = 7;
  double r_fill = 0.85;
};

struct RegionViolation {
  std::string property;
  double power = 0.0;
  double rate = 0.0;
  double value = 0.0;  // offending signed quantity
};

struct RegionPropertyReport {
  std::vector<RegionViolation> violations;
  int samples = 0;
  bool clean() const { return violations.empty(); }
};

// Finite-difference certification of the structural properties the solver
// relies on: nonnegativity, monotonicity (decreasing in the partner rate,
// increasing in power), concavity in each argument, the sign of the h1
// cross partial, and the vanishing h2 cross partial.
RegionPropertyReport certify_region_properties(const RateRegion& region,
                                               const RegionGrid& grid,
                                               double rel_step = 1e-5,
                                               double tol = 1e-4);

RegionPropertyReport certify_region_properties(const ChannelParams& ch,
                                               const RegionGrid& grid = {},
                                               double rel_step = 1e-5,
                                               double tol = 1e-4);

namespace detail {

// Region coefficients: g(r1, r2) = nu1*e^{c(r1+r2)} + (nu2-nu1)*e^{c r2} - nu2
// is the least total power for the pair, with nu_j = sigma2/s_j and
// c = ln2/kappa.
struct RegionCoef {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double dnu = 0.0;  // nu2 - nu1 > 0
  double c = 0.0;    // ln2 / kappa
};

RegionCoef coef(const ChannelParams& ch);

// Non-throwing power map; returns +inf when the exponentials overflow.
double g_power(const RegionCoef& k, double r1, double r2);

// Private-stream power for the stronger user at rate r1.
double p1_of_r1(const RegionCoef& k, double r1);

// h2 as a function of total power and the stronger rate; -inf when the
// power cannot even carry r1.
double h2_rate(const RegionCoef& k, double power, double r1);

// h1 as a function of total power and the weaker rate; -inf when the
// power cannot even carry r2.
double h1_rate(const RegionCoef& k, double power, double r2);

}  // namespace detail

}  // namespace bcsched
