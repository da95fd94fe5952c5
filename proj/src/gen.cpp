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

#include "bcsched/gen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace bcsched {

namespace {

// Uniform doubles from raw mt19937_64 words, so a seed produces the same
// instance on every standard library.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : eng_(seed) {}
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double between(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace

Instance gen_instance(const GenSpec& spec) {
  if (spec.min_events < 1 || spec.max_events < spec.min_events) {
    throw std::invalid_argument("event count range must satisfy 1 <= min <= max");
  }
  if (spec.bits1_max < 0.0 || spec.bits2_max < 0.0) {
    throw std::invalid_argument("bit draw ceilings must be nonnegative");
  }
  if (!(spec.margin_lo > 1.0) || spec.margin_hi < spec.margin_lo) {
    throw std::invalid_argument("harvest margin must satisfy 1 < lo <= hi");
  }
  if (!(spec.gap_lo > 0.0) || spec.gap_hi < spec.gap_lo) {
    throw std::invalid_argument("event spacing must satisfy 0 < lo <= hi");
  }
  spec.channel.validate();

  Draw rng(spec.seed);
  const int span = spec.max_events - spec.min_events + 1;
  int n = spec.min_events + static_cast<int>(rng.unit() * span);
  n = std::min(n, spec.max_events);

  Instance inst;
  inst.channel = spec.channel;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    ArrivalEvent e;
    e.t = t;
    e.bits1 = rng.between(0.0, spec.bits1_max);
    e.bits2 = rng.between(0.0, spec.bits2_max);
    inst.events.push_back(e);
    t += rng.between(spec.gap_lo, spec.gap_hi);
  }
  if (spec.weaker_up_front || spec.data_up_front) {
    for (int i = 1; i < n; ++i) {
      inst.events[0].bits2 += inst.events[i].bits2;
      inst.events[i].bits2 = 0.0;
    }
  }
  if (spec.data_up_front) {
    for (int i = 1; i < n; ++i) {
      inst.events[0].bits1 += inst.events[i].bits1;
      inst.events[i].bits1 = 0.0;
    }
  }

  double B1 = 0.0, B2 = 0.0;
  for (const ArrivalEvent& e : inst.events) {
    B1 += e.bits1;
    B2 += e.bits2;
  }
  const ChannelParams& ch = inst.channel;
  const double bound =
      ch.sigma2 * std::log(2.0) / ch.kappa * (B1 / ch.s1 + B2 / ch.s2);
  const double total = std::max(1e-3, bound) *
                       rng.between(spec.margin_lo, spec.margin_hi);
  std::vector<double> w;
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    w.push_back(rng.between(0.1, 1.0));
    wsum += w.back();
  }
  for (int i = 0; i < n; ++i) inst.events[i].energy = total * w[i] / wsum;
  inst.window = inst.events.back().t;
  return inst;
}

}  // namespace bcsched
