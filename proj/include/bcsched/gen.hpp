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

#include <cstdint>

#include "bcsched/model.hpp"

namespace bcsched {

// Deterministic random instances.  The harvest is scaled a safe margin
// above the vanishing-power cost of the drawn bit demand, so every
// generated instance admits a finite completion time.
struct GenSpec {
  std::uint64_t seed = 1;
  int min_events = 1;
  int max_events = 3;
  // Move all weaker-user bits to t = 0 (the regime the structural
  // guarantees cover), or all bits of both users.
  bool weaker_up_front = false;
  bool data_up_front = false;
  double bits1_max = 2.0;  // per-event draw ceiling
  double bits2_max = 1.0;
  double margin_lo = 1.4;  // harvest over the vanishing-power cost
  double margin_hi = 3.5;
  double gap_lo = 0.4;  // spacing between consecutive events
  double gap_hi = 2.0;
  ChannelParams channel;
};

Instance gen_instance(const GenSpec& spec);

}  // namespace bcsched
