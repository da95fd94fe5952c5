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

#include <string>

#include <doctest.h>

#include "bcsched/duopt.hpp"
#include "bcsched/errors.hpp"
#include "bcsched/gen.hpp"
#include "bcsched/io.hpp"

using namespace bcsched;

TEST_CASE("instance documents round-trip bit-exactly") {
  for (std::uint64_t seed : {7u, 8u, 9u}) {
    GenSpec spec;
    spec.seed = seed;
    spec.min_events = 2;
    spec.max_events = 4;
    const Instance a = gen_instance(spec);
    const Instance b = parse_instance(serialize_instance(a));
    CHECK(b.channel.s1 == a.channel.s1);
    CHECK(b.channel.s2 == a.channel.s2);
    CHECK(b.channel.sigma2 == a.channel.sigma2);
    CHECK(b.channel.kappa == a.channel.kappa);
    CHECK(b.window == a.window);
    REQUIRE(b.events.size() == a.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      CHECK(b.events[i].t == a.events[i].t);
      CHECK(b.events[i].energy == a.events[i].energy);
      CHECK(b.events[i].bits1 == a.events[i].bits1);
      CHECK(b.events[i].bits2 == a.events[i].bits2);
    }
  }
}

TEST_CASE("omitted event amounts default to zero") {
  const std::string doc = R"({
    "channel": {"s1": 2.0, "s2": 1.0, "sigma2": 1.0, "kappa": 1.0},
    "window": 0.0,
    "events": [{"t": 0.0, "energy": 1.5}]
  })";
  const Instance inst = parse_instance(doc);
  REQUIRE(inst.events.size() == 1);
  CHECK(inst.events[0].energy == 1.5);
  CHECK(inst.events[0].bits1 == 0.0);
  CHECK(inst.events[0].bits2 == 0.0);
}

TEST_CASE("coincident event instants merge on parse") {
  const std::string doc = R"({
    "channel": {"s1": 2.0, "s2": 1.0, "sigma2": 1.0, "kappa": 1.0},
    "window": 1.0,
    "events": [{"t": 0.0, "energy": 1.0, "bits1": 0.5},
               {"t": 1.0, "energy": 0.5},
               {"t": 1.0, "bits1": 0.25}]
  })";
  const Instance inst = parse_instance(doc);
  REQUIRE(inst.events.size() == 2);
  CHECK(inst.events[1].energy == 0.5);
  CHECK(inst.events[1].bits1 == 0.25);
}

TEST_CASE("schema violations are rejected") {
  CHECK_THROWS_AS(parse_instance("not json"), ParseError);
  CHECK_THROWS_AS(parse_instance("[]"), ParseError);
  CHECK_THROWS_AS(parse_instance(R"({"window": 0, "events": []})"), ParseError);
  CHECK_THROWS_AS(
      parse_instance(
          R"({"channel": {"s1": 2, "s2": 1, "sigma2": 1}, "window": 0, "events": []})"),
      ParseError);
  CHECK_THROWS_AS(
      parse_instance(
          R"({"channel": {"s1": 2, "s2": 1, "sigma2": 1, "kappa": "x"}, "window": 0, "events": []})"),
      ParseError);
  // event beyond the observation window
  CHECK_THROWS_AS(
      parse_instance(
          R"({"channel": {"s1": 2, "s2": 1, "sigma2": 1, "kappa": 1}, "window": 1.0,
              "events": [{"t": 2.0, "energy": 1.0}]})"),
      ParseError);
  // negative amounts
  CHECK_THROWS_AS(
      parse_instance(
          R"({"channel": {"s1": 2, "s2": 1, "sigma2": 1, "kappa": 1}, "window": 0,
              "events": [{"t": 0.0, "energy": -1.0}]})"),
      ParseError);
}

TEST_CASE("schedule documents round-trip through the solver output") {
  GenSpec spec;
  spec.seed = 21;
  spec.min_events = 2;
  spec.max_events = 3;
  spec.weaker_up_front = true;
  const Instance inst = gen_instance(spec);
  const Schedule sched = solve(inst).schedule;
  const Schedule back = parse_schedule(serialize_schedule(sched));
  REQUIRE(back.epochs.size() == sched.epochs.size());
  REQUIRE(back.grid.starts.size() == sched.grid.starts.size());
  for (std::size_t i = 0; i < sched.epochs.size(); ++i) {
    CHECK(back.grid.starts[i] == sched.grid.starts[i]);
    CHECK(back.grid.lengths[i] == sched.grid.lengths[i]);
    CHECK(back.epochs[i].power == sched.epochs[i].power);
    CHECK(back.epochs[i].r1 == sched.epochs[i].r1);
    CHECK(back.epochs[i].r2 == sched.epochs[i].r2);
    CHECK(back.epochs[i].active == sched.epochs[i].active);
  }
  CHECK(completion_time(back) == completion_time(sched));
}

TEST_CASE("plot table lists breakpoints in order") {
  GenSpec spec;
  spec.seed = 22;
  spec.min_events = 2;
  spec.max_events = 3;
  const Instance inst = gen_instance(spec);
  const Schedule sched = solve(inst).schedule;
  const std::string csv = plot_table(inst.channel, sched);
  CHECK(csv.rfind("t,P_total,P_strong,r1,r2\n", 0) == 0);
  double prev_t = -1.0;
  std::size_t pos = csv.find('\n') + 1;
  int rows = 0;
  std::string last_line;
  while (pos < csv.size()) {
    const std::size_t end = csv.find('\n', pos);
    const std::string line = csv.substr(pos, end - pos);
    const double t = std::stod(line.substr(0, line.find(',')));
    CHECK(t >= prev_t);
    prev_t = t;
    last_line = line;
    ++rows;
    pos = end + 1;
  }
  CHECK(rows >= 2);
  // the final breakpoint switches everything off
  CHECK(last_line.substr(last_line.find(',')) == ",0.0,0.0,0.0,0.0");
}

TEST_CASE("trace serialization carries the sweep history") {
  GenSpec spec;
  spec.seed = 23;
  spec.min_events = 2;
  spec.max_events = 2;
  const Instance inst = gen_instance(spec);
  const SolveResult res = solve(inst);
  const std::string doc = serialize_trace(res.trace);
  CHECK(doc.find("\"sweeps\"") != std::string::npos);
  CHECK(doc.find("\"completion_times\"") != std::string::npos);
  CHECK(doc.find("\"converged\": true") != std::string::npos);
}
