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

#include "bcsched/io.hpp"

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcsched/channel.hpp"
#include "bcsched/errors.hpp"

namespace bcsched {

namespace {

using ordered_json = nlohmann::ordered_json;

double require_number(const ordered_json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + " must be a number");
  return j.get<double>();
}

double number_or_zero(const ordered_json& obj, const char* key,
                      const std::string& where) {
  if (!obj.contains(key)) return 0.0;
  return require_number(obj.at(key), where + "." + key);
}

ordered_json parse_document(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

// Shortest representation that parses back to the same double; shared by
// the JSON writer, so CSV cells and JSON fields print identically.
std::string num(double x) { return ordered_json(x).dump(); }

}  // namespace

Instance parse_instance(const std::string& text) {
  const ordered_json doc = parse_document(text);
  if (!doc.is_object()) throw ParseError("top level must be an object");
  if (!doc.contains("channel") || !doc.at("channel").is_object()) {
    throw ParseError("missing channel object");
  }
  const ordered_json& chj = doc.at("channel");
  Instance inst;
  for (const char* key : {"s1", "s2", "sigma2", "kappa"}) {
    if (!chj.contains(key)) {
      throw ParseError(std::string("channel.") + key + " is required");
    }
  }
  inst.channel.s1 = require_number(chj.at("s1"), "channel.s1");
  inst.channel.s2 = require_number(chj.at("s2"), "channel.s2");
  inst.channel.sigma2 = require_number(chj.at("sigma2"), "channel.sigma2");
  inst.channel.kappa = require_number(chj.at("kappa"), "channel.kappa");
  if (!doc.contains("window")) throw ParseError("window is required");
  inst.window = require_number(doc.at("window"), "window");
  if (!doc.contains("events") || !doc.at("events").is_array()) {
    throw ParseError("events must be an array");
  }
  for (std::size_t i = 0; i < doc.at("events").size(); ++i) {
    const ordered_json& ev = doc.at("events").at(i);
    const std::string where = "events[" + std::to_string(i) + "]";
    if (!ev.is_object()) throw ParseError(where + " must be an object");
    if (!ev.contains("t")) throw ParseError(where + ".t is required");
    ArrivalEvent e;
    e.t = require_number(ev.at("t"), where + ".t");
    e.energy = number_or_zero(ev, "energy", where);
    e.bits1 = number_or_zero(ev, "bits1", where);
    e.bits2 = number_or_zero(ev, "bits2", where);
    inst.events.push_back(e);
  }
  try {
    inst.events = normalize_events(inst.events);
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  ordered_json doc;
  doc["channel"] = {{"s1", inst.channel.s1},
                    {"s2", inst.channel.s2},
                    {"sigma2", inst.channel.sigma2},
                    {"kappa", inst.channel.kappa}};
  doc["window"] = inst.window;
  doc["events"] = ordered_json::array();
  for (const ArrivalEvent& e : inst.events) {
    doc["events"].push_back({{"t", e.t},
                             {"energy", e.energy},
                             {"bits1", e.bits1},
                             {"bits2", e.bits2}});
  }
  return doc.dump(2) + "\n";
}

Schedule parse_schedule(const std::string& text) {
  const ordered_json doc = parse_document(text);
  if (!doc.is_object()) throw ParseError("top level must be an object");
  if (!doc.contains("grid") || !doc.at("grid").is_object()) {
    throw ParseError("missing grid object");
  }
  const ordered_json& grid = doc.at("grid");
  for (const char* key : {"starts", "lengths"}) {
    if (!grid.contains(key) || !grid.at(key).is_array()) {
      throw ParseError(std::string("grid.") + key + " must be an array");
    }
  }
  Schedule sched;
  for (std::size_t i = 0; i < grid.at("starts").size(); ++i) {
    sched.grid.starts.push_back(
        require_number(grid.at("starts").at(i), "grid.starts entry"));
  }
  for (std::size_t i = 0; i < grid.at("lengths").size(); ++i) {
    sched.grid.lengths.push_back(
        require_number(grid.at("lengths").at(i), "grid.lengths entry"));
  }
  if (sched.grid.starts.size() != sched.grid.lengths.size()) {
    throw ParseError("grid.starts and grid.lengths must have equal length");
  }
  if (!doc.contains("epochs") || !doc.at("epochs").is_array()) {
    throw ParseError("epochs must be an array");
  }
  for (std::size_t i = 0; i < doc.at("epochs").size(); ++i) {
    const ordered_json& ep = doc.at("epochs").at(i);
    const std::string where = "epochs[" + std::to_string(i) + "]";
    if (!ep.is_object()) throw ParseError(where + " must be an object");
    EpochAllocation a;
    a.power = number_or_zero(ep, "power", where);
    a.r1 = number_or_zero(ep, "r1", where);
    a.r2 = number_or_zero(ep, "r2", where);
    a.active = number_or_zero(ep, "active", where);
    sched.epochs.push_back(a);
  }
  if (sched.epochs.size() != sched.grid.starts.size()) {
    throw ParseError("epochs and grid must have equal length");
  }
  if (doc.contains("completion_time")) {
    require_number(doc.at("completion_time"), "completion_time");
  }
  return sched;
}

std::string serialize_schedule(const Schedule& sched) {
  ordered_json doc;
  doc["grid"] = {{"starts", sched.grid.starts},
                 {"lengths", sched.grid.lengths}};
  doc["epochs"] = ordered_json::array();
  for (const EpochAllocation& a : sched.epochs) {
    doc["epochs"].push_back({{"power", a.power},
                             {"r1", a.r1},
                             {"r2", a.r2},
                             {"active", a.active}});
  }
  doc["completion_time"] = completion_time(sched);
  return doc.dump(2) + "\n";
}

std::string serialize_trace(const IterationTrace& trace) {
  ordered_json doc;
  doc["sweeps"] = trace.sweeps;
  doc["converged"] = trace.converged;
  doc["completion_times"] = trace.completion_times;
  doc["flags"] = trace.flags;
  doc["pair_patterns"] = trace.pair_patterns;
  return doc.dump(2) + "\n";
}

std::string serialize_report(const VerificationReport& structure,
                             const FeasibilityReport& feasibility) {
  ordered_json doc;
  doc["feasibility"] = {
      {"feasible", feasibility.feasible},
      {"worst_slack", feasibility.worst_slack},
      {"completion_residual1", feasibility.completion_residual1},
      {"completion_residual2", feasibility.completion_residual2}};
  ordered_json checks = ordered_json::array();
  for (const CheckResult& c : structure.checks) {
    checks.push_back({{"check", c.check},
                      {"applicable", c.applicable},
                      {"pass", c.pass},
                      {"slack", c.slack},
                      {"detail", c.detail}});
  }
  doc["structure"] = {{"clean", structure.clean()},
                      {"checks", checks},
                      {"power_rises", structure.power_rises.size()},
                      {"rate_rises", structure.rate_rises.size()}};
  return doc.dump(2) + "\n";
}

std::string plot_table(const ChannelParams& ch, const Schedule& sched) {
  std::string out = "t,P_total,P_strong,r1,r2\n";
  double curP = 0.0, curPs = 0.0, cur1 = 0.0, cur2 = 0.0;
  bool any = false;
  auto push = [&](double t, double P, double Ps, double r1, double r2) {
    if (any && P == curP && Ps == curPs && r1 == cur1 && r2 == cur2) return;
    out += num(t) + "," + num(P) + "," + num(Ps) + "," + num(r1) + "," +
           num(r2) + "\n";
    curP = P;
    curPs = Ps;
    cur1 = r1;
    cur2 = r2;
    any = true;
  };
  for (std::size_t i = 0; i < sched.epochs.size(); ++i) {
    const EpochAllocation& a = sched.epochs[i];
    const bool on = a.active > 0.0 && (a.power > 0.0 || a.r1 > 0.0 || a.r2 > 0.0);
    if (on) {
      const double ps = min_power(ch, a.r1, a.r2).split.p1;
      push(sched.grid.start(i), a.power, ps, a.r1, a.r2);
      if (a.active < sched.grid.lengths[i]) {
        push(sched.grid.start(i) + a.active, 0.0, 0.0, 0.0, 0.0);
      }
    } else {
      push(sched.grid.start(i), 0.0, 0.0, 0.0, 0.0);
    }
  }
  push(completion_time(sched), 0.0, 0.0, 0.0, 0.0);
  return out;
}

}  // namespace bcsched
