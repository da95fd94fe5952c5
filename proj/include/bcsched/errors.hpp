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

#include <stdexcept>
#include <string>

namespace bcsched {

// Requested rate pair lies outside the region for the given power.
class InfeasibleRateError : public std::domain_error {
 public:
  explicit InfeasibleRateError(const std::string& what) : std::domain_error(what) {}
};

// Inputs would overflow the exponential rate/power maps (r/kappa too large).
class RangeError : public std::range_error {
 public:
  explicit RangeError(const std::string& what) : std::range_error(what) {}
};

// A two-epoch subproblem admits no feasible allocation.
class PairInfeasibleError : public std::runtime_error {
 public:
  explicit PairInfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// The instance's bit demand exceeds what its harvest can ever deliver.
class InfeasibleInstanceError : public std::runtime_error {
 public:
  explicit InfeasibleInstanceError(const std::string& what)
      : std::runtime_error(what) {}
};

// An iterative routine exceeded its iteration budget without meeting its
// convergence criterion.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// The instance has more arrival epochs than the exhaustive reference
// solver is prepared to enumerate.
class OracleSizeError : public std::runtime_error {
 public:
  explicit OracleSizeError(const std::string& what) : std::runtime_error(what) {}
};

// Input document does not satisfy the instance or schedule schema.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bcsched
