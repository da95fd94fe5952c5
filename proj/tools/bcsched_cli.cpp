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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcsched/duopt.hpp"
#include "bcsched/errors.hpp"
#include "bcsched/gen.hpp"
#include "bcsched/io.hpp"
#include "bcsched/oracle.hpp"
#include "bcsched/structure.hpp"

namespace {

using bcsched::ParseError;
using ordered_json = nlohmann::ordered_json;

int log_level() {
  const char* raw = std::getenv("BCH_LOG");
  return raw ? std::atoi(raw) : 0;
}

void note(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "bcsched: " << msg << "\n";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Result documents printed to stdout; files always stay stamp-free so
// identical runs stay byte-identical unless asked otherwise.
void emit(const ordered_json& doc, const std::string& format, bool stamp) {
  ordered_json out = doc;
  if (stamp) out["generated_at"] = utc_now();
  if (format == "csv") {
    std::string head, row;
    for (auto it = out.begin(); it != out.end(); ++it) {
      if (!head.empty()) {
        head += ",";
        row += ",";
      }
      head += it.key();
      row += it.value().is_string() ? it.value().get<std::string>()
                                    : it.value().dump();
    }
    std::cout << head << "\n" << row << "\n";
  } else {
    std::cout << out.dump(2) << "\n";
  }
}

struct SolveFlags {
  std::string in, out, trace, plot;
  double epsilon = 0.0;
  int max_iters = 200;
};

int run_solve(const SolveFlags& f, const std::string& format, bool stamp) {
  const bcsched::Instance inst = bcsched::parse_instance(slurp(f.in));
  note(1, "parsed " + std::to_string(inst.events.size()) + " events");
  bcsched::SolverConfig cfg;
  if (f.epsilon > 0.0) cfg.epsilon = f.epsilon;
  cfg.max_iterations = f.max_iters;
  const bcsched::SolveResult res = bcsched::solve(inst, cfg);
  const double T = bcsched::completion_time(res.schedule);
  note(1, "solved in " + std::to_string(res.trace.sweeps) + " sweeps");
  if (!f.out.empty()) spill(f.out, bcsched::serialize_schedule(res.schedule));
  if (!f.trace.empty()) spill(f.trace, bcsched::serialize_trace(res.trace));
  if (!f.plot.empty()) {
    spill(f.plot, bcsched::plot_table(inst.channel, res.schedule));
  }
  emit({{"completion_time", T},
        {"sweeps", res.trace.sweeps},
        {"converged", res.trace.converged}},
       format, stamp);
  return res.trace.converged ? 0 : 4;
}

struct VerifyFlags {
  std::string in, sched;
  double tol = 0.0;  // 0 keeps the library defaults
};

int run_verify(const VerifyFlags& f, const std::string& format, bool stamp) {
  const bcsched::Instance inst = bcsched::parse_instance(slurp(f.in));
  if (!bcsched::asymptotic_feasible(inst)) {
    note(1, "instance demand is not coverable at any power");
  }
  const bcsched::Schedule sched = bcsched::parse_schedule(slurp(f.sched));
  bcsched::FeasibilityReport feas;
  bcsched::VerificationReport rep;
  try {
    feas = f.tol > 0.0 ? bcsched::check_feasibility(inst, sched, f.tol, f.tol)
                       : bcsched::check_feasibility(inst, sched);
    rep = f.tol > 0.0 ? bcsched::verify_structure(inst, sched, f.tol)
                      : bcsched::verify_structure(inst, sched);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  if (format == "csv") {
    std::string out = "check,applicable,pass,slack\n";
    out += "feasible," + std::string(feas.feasible ? "true,true," : "true,false,") +
           ordered_json(feas.worst_slack).dump() + "\n";
    for (const bcsched::CheckResult& c : rep.checks) {
      out += c.check + "," + (c.applicable ? "true" : "false") + "," +
             (c.pass ? "true" : "false") + "," + ordered_json(c.slack).dump() +
             "\n";
    }
    std::cout << out;
  } else {
    ordered_json doc = ordered_json::parse(bcsched::serialize_report(rep, feas));
    if (stamp) doc["generated_at"] = utc_now();
    std::cout << doc.dump(2) << "\n";
  }
  return feas.feasible && rep.clean() ? 0 : 1;
}

struct OracleFlags {
  std::string in, compare;
  double tol = 1e-2;
  double grid = 1.0 / 64.0;
  int rounds = 4;
  double time_tol = 0.0;
};

int run_oracle(const OracleFlags& f, const std::string& format, bool stamp) {
  const bcsched::Instance inst = bcsched::parse_instance(slurp(f.in));
  bcsched::OracleConfig cfg;
  cfg.grid_resolution = f.grid;
  cfg.refinement_rounds = f.rounds;
  cfg.T_tolerance = f.time_tol;
  const double T_oracle = bcsched::oracle_min_time(inst, cfg);
  if (f.compare.empty()) {
    emit({{"T_oracle", T_oracle}}, format, stamp);
    return 0;
  }
  const bcsched::Schedule sched = bcsched::parse_schedule(slurp(f.compare));
  const double T_sched = bcsched::completion_time(sched);
  const double delta =
      std::abs(T_sched - T_oracle) / std::max(T_oracle, 1e-300);
  const bool pass = delta <= f.tol;
  emit({{"T_oracle", T_oracle},
        {"T_schedule", T_sched},
        {"delta_rel", delta},
        {"pass", pass}},
       format, stamp);
  return pass ? 0 : 1;
}

struct SweepFlags {
  std::string dir;
  int jobs = 1;
  double epsilon = 0.0;
  int max_iters = 200;
};

int run_sweep(const SweepFlags& f, const std::string& format, bool stamp) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(f.dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() < 5 || name.substr(name.size() - 5) != ".json") continue;
    if (name.size() >= 11 &&
        name.substr(name.size() - 11) == ".sched.json") {
      continue;  // earlier sweep output, not an instance
    }
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  struct Row {
    std::string file, status;
    double T = 0.0;
    int sweeps = 0;
  };
  std::vector<Row> rows(files.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      Row& row = rows[i];
      row.file = files[i].filename().string();
      try {
        const bcsched::Instance inst =
            bcsched::parse_instance(slurp(files[i].string()));
        bcsched::SolverConfig cfg;
        if (f.epsilon > 0.0) cfg.epsilon = f.epsilon;
        cfg.max_iterations = f.max_iters;
        const bcsched::SolveResult res = bcsched::solve(inst, cfg);
        fs::path out = files[i];
        out.replace_extension();  // drop .json
        out += ".sched.json";
        spill(out.string(), bcsched::serialize_schedule(res.schedule));
        row.T = bcsched::completion_time(res.schedule);
        row.sweeps = res.trace.sweeps;
        row.status = res.trace.converged ? "ok" : "nonconverged";
      } catch (const ParseError&) {
        row.status = "parse";
      } catch (const bcsched::InfeasibleInstanceError&) {
        row.status = "infeasible";
      } catch (const std::exception&) {
        row.status = "error";
      }
      note(2, row.file + " -> " + row.status);
    }
  };
  const int jobs = std::max(1, f.jobs);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  bool all_ok = true;
  if (format == "csv") {
    std::cout << "file,status,completion_time,sweeps\n";
    for (const Row& row : rows) {
      std::cout << row.file << "," << row.status << ","
                << ordered_json(row.T).dump() << "," << row.sweeps << "\n";
      all_ok = all_ok && row.status == "ok";
    }
  } else {
    ordered_json doc;
    doc["runs"] = ordered_json::array();
    for (const Row& row : rows) {
      doc["runs"].push_back({{"file", row.file},
                             {"status", row.status},
                             {"completion_time", row.T},
                             {"sweeps", row.sweeps}});
      all_ok = all_ok && row.status == "ok";
    }
    if (stamp) doc["generated_at"] = utc_now();
    std::cout << doc.dump(2) << "\n";
  }
  return all_ok ? 0 : 1;
}

struct GenFlags {
  bcsched::GenSpec spec;
  std::string out;
};

int run_gen(const GenFlags& f) {
  const bcsched::Instance inst = bcsched::gen_instance(f.spec);
  const std::string doc = bcsched::serialize_instance(inst);
  if (f.out.empty()) {
    std::cout << doc;
  } else {
    spill(f.out, doc);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-user broadcast-channel transmission scheduler"};
  app.require_subcommand(1);
  std::string format = "json";
  bool stamp = false;
  app.add_option("--format", format, "stdout payload format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--stamp", stamp, "add a generation timestamp to stdout payloads");

  SolveFlags sf;
  CLI::App* solve = app.add_subcommand("solve", "compute a minimum-time schedule");
  solve->add_option("--in", sf.in, "instance document")->required();
  solve->add_option("--out", sf.out, "write the schedule document here");
  solve->add_option("--trace", sf.trace, "write the iteration trace here");
  solve->add_option("--plot", sf.plot, "write the breakpoint table here");
  solve->add_option("--epsilon", sf.epsilon, "sweep improvement threshold");
  solve->add_option("--max-iters", sf.max_iters, "sweep budget");

  VerifyFlags vf;
  CLI::App* verify = app.add_subcommand("verify", "check a schedule against its instance");
  verify->add_option("--in", vf.in, "instance document")->required();
  verify->add_option("--sched", vf.sched, "schedule document")->required();
  verify->add_option("--tol", vf.tol, "override the check tolerances");

  OracleFlags of;
  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive reference completion time");
  oracle->add_option("--in", of.in, "instance document")->required();
  oracle->add_option("--compare", of.compare, "schedule document to compare against");
  oracle->add_option("--tol", of.tol, "relative tolerance for the comparison verdict");
  oracle->add_option("--grid-resolution", of.grid, "initial grid step fraction");
  oracle->add_option("--rounds", of.rounds, "grid refinement rounds");
  oracle->add_option("--time-tol", of.time_tol, "bisection stopping width in seconds");

  SweepFlags wf;
  CLI::App* sweep = app.add_subcommand("sweep", "solve every instance in a directory");
  sweep->add_option("--dir", wf.dir, "directory of instance documents")->required();
  sweep->add_option("--jobs", wf.jobs, "worker threads");
  sweep->add_option("--epsilon", wf.epsilon, "sweep improvement threshold");
  sweep->add_option("--max-iters", wf.max_iters, "sweep budget");

  GenFlags gf;
  CLI::App* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--seed", gf.spec.seed, "generator seed");
  gen->add_option("--min-events", gf.spec.min_events, "fewest arrival events");
  gen->add_option("--max-events", gf.spec.max_events, "most arrival events");
  gen->add_flag("--wufbc", gf.spec.weaker_up_front,
                "move all weaker-user bits to t = 0");
  gen->add_flag("--flow", gf.spec.data_up_front, "move all bits to t = 0");
  gen->add_option("--bits1-max", gf.spec.bits1_max, "stronger-user per-event draw cap");
  gen->add_option("--bits2-max", gf.spec.bits2_max, "weaker-user per-event draw cap");
  gen->add_option("--margin-lo", gf.spec.margin_lo, "harvest margin lower bound");
  gen->add_option("--margin-hi", gf.spec.margin_hi, "harvest margin upper bound");
  gen->add_option("--gap-lo", gf.spec.gap_lo, "event spacing lower bound");
  gen->add_option("--gap-hi", gf.spec.gap_hi, "event spacing upper bound");
  gen->add_option("--s1", gf.spec.channel.s1, "stronger-user gain");
  gen->add_option("--s2", gf.spec.channel.s2, "weaker-user gain");
  gen->add_option("--sigma2", gf.spec.channel.sigma2, "noise variance");
  gen->add_option("--kappa", gf.spec.channel.kappa, "rate scale");
  gen->add_option("--out", gf.out, "write the instance here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(sf, format, stamp);
    if (verify->parsed()) return run_verify(vf, format, stamp);
    if (oracle->parsed()) return run_oracle(of, format, stamp);
    if (sweep->parsed()) return run_sweep(wf, format, stamp);
    if (gen->parsed()) return run_gen(gf);
  } catch (const ParseError& e) {
    std::cerr << "bcsched: " << e.what() << "\n";
    return 2;
  } catch (const bcsched::InfeasibleInstanceError& e) {
    std::cerr << "bcsched: " << e.what() << "\n";
    return 3;
  } catch (const bcsched::ConvergenceError& e) {
    std::cerr << "bcsched: " << e.what() << "\n";
    return 4;
  } catch (const bcsched::OracleSizeError& e) {
    std::cerr << "bcsched: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "bcsched: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
