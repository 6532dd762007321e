// stabsim: run, replay, tabulate and explore the self-stabilizing BFS
// algorithms.
//
// Exit codes
//   run:      0 terminal and legitimate, 1 scenario expectation missed,
//             2 step budget exhausted, 3 schedule violation,
//             4 terminal but not legitimate
//   replay:   0 reproduced, 1 diverged, 3 schedule violation
//   explore:  0 all checks passed, 1 a check failed, 2 state cap exceeded
//   any:      64 usage error, 65 malformed input, 66 unreadable file

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "stabsim/io.hpp"
#include "stabsim/stabsim.hpp"

namespace {

using namespace stabsim;
using stabsim::io::json;

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;

struct UsageError : Error {
  using Error::Error;
};
struct InputError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json read_json_file(const std::string& path) {
  const auto text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw UsageError("seed must be a non-negative integer");
  return v;
}

struct Common {
  std::string graph = "";
  std::string graph_file;
  std::string algo = "HC";
  std::optional<std::uint32_t> D;
  std::string tie = "smallest-id";
  std::string priority = "HC2-first";
  std::string mutant = "none";
  std::optional<std::uint64_t> seed;

  std::uint64_t seed_value() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("STABSIM_SEED")) return parse_seed(env);
    return 0;
  }

  bool has_graph() const { return !graph.empty() || !graph_file.empty(); }

  Graph load_graph(std::uint64_t seed_for_random) const {
    if (!graph.empty() && !graph_file.empty()) throw UsageError("--graph and --graph-file are exclusive");
    if (!graph_file.empty()) {
      std::ifstream in(graph_file);
      if (!in) throw InputError("cannot open " + graph_file);
      try {
        return parse_graph(in);
      } catch (const ParseError& e) {
        throw ParseError(graph_file + ": " + e.what(), e.line());
      }
    }
    if (graph.empty()) throw UsageError("a graph is required (--graph or --graph-file)");
    return io::graph_from_builder(graph, seed_for_random);
  }

  std::string graph_name() const { return graph_file.empty() ? graph : graph_file; }

  AlgorithmSpec make_spec(const Graph& g) const {
    AlgorithmSpec s;
    auto v = parse_variant(algo);
    if (!v) throw UsageError("unknown algorithm " + algo);
    s.variant = *v;
    if (D && !s.bounded()) throw UsageError("--D applies to B, HC and FHC only");
    if (D && *D == 0) throw UsageError("D must be at least 1");
    s.D = s.bounded() ? D.value_or(g.diameter()) : 0;
    auto t = parse_tie_policy(tie);
    if (!t) throw UsageError("unknown tie policy " + tie);
    s.tie_policy = *t;
    auto p = parse_priority_policy(priority);
    if (!p) throw UsageError("unknown priority policy " + priority);
    s.priority_policy = *p;
    auto m = parse_mutation(mutant);
    if (!m) throw UsageError("unknown mutant " + mutant);
    s.mutation = *m;
    try {
      s.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return s;
  }
};

void add_common(CLI::App* cmd, Common& c, bool with_algo = true) {
  cmd->add_option("--graph", c.graph, "Graph builder, e.g. line:5, lollipop:4, gk:2, random:n=8,p=0.3");
  cmd->add_option("--graph-file", c.graph_file, "Graph in edge-list text format");
  if (with_algo) {
    cmd->add_option("--algo", c.algo, "U, B, HC or FHC")->capture_default_str();
    cmd->add_option("--D", c.D, "Distance bound for B/HC/FHC (default: graph diameter)");
    cmd->add_option("--tie", c.tie, "smallest-id or keep-current")->capture_default_str();
    cmd->add_option("--priority", c.priority, "HC1-first, HC2-first or daemon-decides")->capture_default_str();
    cmd->add_option("--mutant", c.mutant, "none, drop-b3 or saturating-b (B only)")->capture_default_str();
  }
  cmd->add_option_function<std::string>("--seed", [&c](const std::string& s) { c.seed = parse_seed(s); },
                                        "Seed for all randomness (fallback: STABSIM_SEED)");
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  Common common;
  std::string daemon = "sync";
  double prob = 0.5;
  std::optional<std::size_t> budget;
  std::uint32_t d_cap = 0;
  std::string init_file;
  std::string schedule_file;
  std::string scenario;
  std::string trace_path;
  std::string summary_path;
  std::size_t repetitions = 1;
  std::size_t jobs = 1;
};

DaemonStrategy make_daemon(const std::string& name, std::uint64_t seed, double prob) {
  if (name == "sync") return Synchronous{};
  if (name == "central") return CentralRandom{seed};
  if (name == "distributed") return DistributedRandom{seed, prob};
  if (name == "central-min") return CentralOrdered{false};
  if (name == "central-max") return CentralOrdered{true};
  if (name == "sync-hc1") return Priority{Synchronous{}, RulePreference::HC1First};
  if (name == "central-max-hc1") return Priority{CentralOrdered{true}, RulePreference::HC1First};
  throw UsageError("unknown daemon " + name);
}

/// U has no finite state space to derive a budget from.
constexpr std::size_t kDefaultUnboundedBudget = 1'000'000;

struct RunResult {
  std::string row;
  int code = 0;
  std::string note;
  std::string trace_text;
};

int outcome_code(const ExecutionTrace& t, const Graph& g) {
  switch (t.outcome) {
    case Outcome::Terminal: return is_legitimate(g, t.final_config) ? 0 : 4;
    case Outcome::StepBudgetExceeded: return 2;
    case Outcome::ScheduleViolation: return 3;
    case Outcome::ScheduleExhausted: return 2;
  }
  return 1;
}

std::string outcome_label(const ExecutionTrace& t, const Graph& g) {
  if (t.outcome == Outcome::Terminal && !is_legitimate(g, t.final_config)) return "terminal-illegitimate";
  return std::string(to_string(t.outcome));
}

RunResult run_once(const RunArgs& a, std::size_t rep) {
  const std::uint64_t seed = a.common.seed_value() + rep;
  RunResult r;
  if (!a.scenario.empty()) {
    const auto s = scenario_by_name(a.scenario);
    auto played = play_scenario(s, a.budget.value_or(1'000'000), !a.trace_path.empty());
    const auto& t = played.trace;
    r.code = outcome_code(t, s.graph);
    if (r.code == 0 && !played.ok()) r.code = 1;
    if (!played.ok()) r.note = s.name + ": " + played.failure;
    r.row = io::summary_row({s.name, s.spec, 0, t.step_count, t.round_count, outcome_label(t, s.graph)});
    if (!a.trace_path.empty()) {
      std::ostringstream o;
      io::write_trace_jsonl(o, t, s.spec, s.graph);
      r.trace_text = o.str();
    }
    return r;
  }

  const Graph g = a.common.load_graph(mix_seed(seed, 0x6a));
  const auto spec = a.common.make_spec(g);
  Configuration init;
  if (!a.init_file.empty()) {
    init = io::config_from_json(read_json_file(a.init_file), spec, g);
  } else {
    const std::uint32_t cap = a.d_cap ? a.d_cap : 3 * g.diameter();
    init = random_configuration(spec, g, seed, cap);
  }
  DaemonStrategy strategy;
  if (!a.schedule_file.empty()) {
    std::optional<BaseSelection> tail;
    strategy = Scripted{io::schedule_from_json(read_json_file(a.schedule_file), g), tail};
  } else {
    strategy = make_daemon(a.daemon, seed, a.prob);
  }
  std::size_t budget;
  if (a.budget) {
    budget = *a.budget;
  } else if (auto b = default_step_budget(spec, g)) {
    budget = *b;
  } else if (!spec.bounded()) {
    budget = kDefaultUnboundedBudget;
  } else {
    throw UsageError("no default step budget for this instance; pass --budget");
  }
  RunOptions opts;
  opts.step_budget = budget;
  opts.record_trace = !a.trace_path.empty();
  ExecutionTrace t;
  try {
    t = run(spec, g, init, strategy, opts);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  r.code = outcome_code(t, g);
  if (r.code == 3) r.note = t.violation_reason;
  if (r.code == 4) r.note = "terminal configuration is not legitimate";
  r.row = io::summary_row({a.common.graph_name(), spec, seed, t.step_count, t.round_count, outcome_label(t, g)});
  if (!a.trace_path.empty()) {
    std::ostringstream o;
    io::write_trace_jsonl(o, t, spec, g);
    r.trace_text = o.str();
  }
  return r;
}

std::string trace_path_for(const std::string& base, std::size_t rep, std::size_t reps) {
  if (reps == 1) return base;
  return base + "." + std::to_string(rep);
}

int cmd_run(const RunArgs& a) {
  if (a.scenario.empty() && !a.common.has_graph()) throw UsageError("run needs --graph, --graph-file or --scenario");
  if (!a.scenario.empty() && a.common.has_graph()) throw UsageError("--scenario fixes its own graph");
  if (a.repetitions == 0) throw UsageError("--repetitions must be positive");
  if (!(a.prob > 0.0 && a.prob <= 1.0)) throw UsageError("--prob must lie in (0,1]");

  std::vector<RunResult> results(a.repetitions);
  std::vector<std::string> errors(a.repetitions);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < a.repetitions;) {
      try {
        results[i] = run_once(a, i);
      } catch (const UsageError& e) {
        errors[i] = std::string("U") + e.what();
      } catch (const ParseError& e) {
        errors[i] = std::string("P") + e.what();
      } catch (const InputError& e) {
        errors[i] = std::string("I") + e.what();
      } catch (const GraphError& e) {
        errors[i] = std::string("P") + e.what();
      } catch (const Error& e) {
        errors[i] = std::string("U") + e.what();
      } catch (const std::exception& e) {
        errors[i] = std::string("P") + e.what();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(a.jobs, a.repetitions));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e.empty()) continue;
    if (e[0] == 'U') throw UsageError(e.substr(1));
    if (e[0] == 'I') throw InputError(e.substr(1));
    throw ParseError(e.substr(1), 0);
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!a.summary_path.empty()) {
    bool fresh = true;
    {
      std::ifstream probe(a.summary_path);
      fresh = !probe || probe.peek() == std::ifstream::traits_type::eof();
    }
    file = open_out(a.summary_path, std::ios::app);
    out = &file;
    if (fresh) *out << io::kSummaryHeader << '\n';
  } else {
    *out << io::kSummaryHeader << '\n';
  }
  int worst = 0;
  auto rank = [](int code) {
    switch (code) {
      case 4: return 5;
      case 3: return 4;
      case 1: return 3;
      case 2: return 2;
      default: return 0;
    }
  };
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    *out << r.row << '\n';
    if (!r.note.empty()) std::cerr << "run " << i << ": " << r.note << '\n';
    if (rank(r.code) > rank(worst)) worst = r.code;
    if (!a.trace_path.empty()) {
      auto tf = open_out(trace_path_for(a.trace_path, i, a.repetitions));
      tf << r.trace_text;
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayArgs {
  std::string bundle;
  std::string trace;
  std::string scenario;
  std::size_t tail_budget = 1'000'000;
};

int cmd_replay(const ReplayArgs& a) {
  const int sources = !a.bundle.empty() + !a.trace.empty() + !a.scenario.empty();
  if (sources != 1) throw UsageError("replay needs exactly one of --bundle, --trace or --scenario");
  if (!a.trace.empty()) {
    std::ifstream in(a.trace);
    if (!in) throw InputError("cannot open " + a.trace);
    io::TraceFile tf = io::read_trace_jsonl(in);
    RunOptions opts;
    opts.step_budget = tf.moves.size();
    const auto t = run(tf.spec, tf.graph, tf.initial, Scripted{tf.moves, std::nullopt}, opts);
    const bool expect_exhausted = tf.outcome == Outcome::StepBudgetExceeded;
    std::string why;
    if (t.step_count != tf.steps) why = "step count " + std::to_string(t.step_count) + " != " + std::to_string(tf.steps);
    else if (!(t.final_config == tf.final_config)) why = "final configuration differs";
    else if (t.round_boundaries != tf.round_boundaries || t.round_count != tf.rounds) why = "round accounting differs";
    else if (t.outcome != tf.outcome && !(expect_exhausted && t.outcome == Outcome::StepBudgetExceeded))
      why = "outcome " + std::string(to_string(t.outcome)) + " != " + std::string(to_string(tf.outcome));
    if (t.outcome == Outcome::ScheduleViolation && tf.outcome != Outcome::ScheduleViolation) {
      std::cerr << "replay: schedule violation at step " << t.step_count << ": " << t.violation_reason << '\n';
      return 3;
    }
    if (!why.empty()) {
      std::cerr << "replay: diverged: " << why << '\n';
      return 1;
    }
    std::cerr << "replay: reproduced " << t.step_count << " steps, " << t.round_count << " rounds\n";
    return 0;
  }
  const Scenario s = a.bundle.empty() ? scenario_by_name(a.scenario) : io::scenario_from_json(read_json_file(a.bundle));
  const auto played = play_scenario(s, a.tail_budget, false);
  std::cout << io::kSummaryHeader << '\n'
            << io::summary_row({s.name, s.spec, 0, played.trace.step_count, played.trace.round_count,
                                outcome_label(played.trace, s.graph)})
            << '\n';
  if (played.trace.outcome == Outcome::ScheduleViolation) {
    std::cerr << "replay: schedule violation: " << played.trace.violation_reason << '\n';
    return 3;
  }
  if (!played.ok()) {
    std::cerr << "replay: " << played.failure << '\n';
    return 1;
  }
  std::cerr << "replay: " << s.name << " matches its expectation (" << played.prefix_steps << " scripted steps, "
            << played.trace.round_count << " rounds)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// table

struct TableArgs {
  std::string which = "rounds";
  std::uint32_t from = 0;
  std::uint32_t to = 0;
};

int cmd_table(const TableArgs& a) {
  if (a.which == "rounds") {
    const std::uint32_t lo = a.from ? a.from : 2, hi = a.to ? a.to : 10;
    if (lo < 2 || hi < lo || hi > 200) throw UsageError("rounds table needs 2 <= from <= to <= 200");
    std::cout << "diameter,U,B,FHC,HC-slow\n";
    for (std::uint32_t d = lo; d <= hi; ++d) {
      auto rounds = [](const Scenario& s) {
        const auto r = play_scenario(s, 1'000'000, false);
        if (!r.ok()) throw Error(s.name + ": " + r.failure);
        return std::to_string(r.trace.round_count);
      };
      std::cout << d << ',' << rounds(scenario_sync_u_line(d)) << ',' << rounds(scenario_sync_b_lollipop(d, d)) << ','
                << rounds(scenario_sync_fhc_lollipop(d)) << ','
                << (d % 2 == 0 ? rounds(scenario_hc_slow(d / 2)) : std::string()) << '\n';
    }
    return 0;
  }
  if (a.which == "steps") {
    const std::uint32_t lo = a.from ? a.from : 1, hi = a.to ? a.to : 8;
    if (lo < 1 || hi < lo || hi > 14) throw UsageError("steps table needs 1 <= from <= to <= 14");
    std::cout << "k,measured,bound\n";
    for (std::uint32_t k = lo; k <= hi; ++k)
      std::cout << k << ',' << exponential_plan(k, 2 * k + 3).schedule.size() << ',' << exponential_lower_bound(k)
                << '\n';
    return 0;
  }
  throw UsageError("table must be rounds or steps");
}

// ---------------------------------------------------------------------------
// explore

struct ExploreArgs {
  Common common;
  bool all = false;
  std::uint64_t cap = kDefaultExploreCap;
};

/// Sinks are compared with legitimate configurations only when D >= diameter.
bool explore_ok(const ExploreReport& r, const AlgorithmSpec& spec, const Graph& g) {
  const bool sinks_required = spec.D >= g.diameter();
  return r.acyclic && r.longest_path && *r.longest_path <= r.bound && (!sinks_required || r.sinks_match);
}

int cmd_explore(const ExploreArgs& a) {
  try {
    if (a.all) {
      if (a.common.has_graph()) throw UsageError("--all enumerates its own graphs");
      bool ok = true;
      for (std::size_t n = 2; n <= 4; ++n)
        for (const auto& g : all_connected_graphs(n))
          for (Variant v : {Variant::B, Variant::HC, Variant::FHC})
            for (std::uint32_t D = g.diameter(); D <= g.diameter() + 2; ++D) {
              AlgorithmSpec spec{v, D};
              const auto rep = explore(spec, g, a.cap);
              const bool good = explore_ok(rep, spec, g);
              ok &= good;
              auto j = io::explore_to_json(rep);
              j["graph"] = io::graph_to_json(g);
              j["spec"] = io::spec_to_json(spec);
              j["ok"] = good;
              std::cout << j.dump() << '\n';
            }
      return ok ? 0 : 1;
    }
    const Graph g = a.common.load_graph(a.common.seed_value());
    const auto spec = a.common.make_spec(g);
    const auto rep = explore(spec, g, a.cap);
    auto j = io::explore_to_json(rep);
    const bool good = explore_ok(rep, spec, g);
    j["ok"] = good;
    std::cout << j.dump() << '\n';
    if (!rep.acyclic) std::cerr << "explore: cycle of length " << rep.cycle.size() << " found\n";
    if (!rep.sinks_match) std::cerr << "explore: sinks differ from legitimate configurations\n";
    return good ? 0 : 1;
  } catch (const CapExceeded& e) {
    std::cerr << "explore: " << e.what() << '\n';
    return 2;
  }
}

// ---------------------------------------------------------------------------
// scenario-dump

int cmd_dump(const std::string& name, const std::string& out_path) {
  const auto s = scenario_by_name(name);
  const auto text = io::scenario_to_json(s).dump() + "\n";
  if (out_path.empty()) std::cout << text;
  else open_out(out_path) << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and checker for self-stabilizing BFS spanning-tree algorithms"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Execute one or more runs and print CSV summary rows");
  add_common(run_cmd, run_args.common);
  run_cmd->add_option("--daemon", run_args.daemon,
                      "sync, central, distributed, central-min, central-max, sync-hc1, central-max-hc1")
      ->capture_default_str();
  run_cmd->add_option("--prob", run_args.prob, "Activation probability of the distributed daemon")->capture_default_str();
  run_cmd->add_option("--budget", run_args.budget, "Step budget (default: state-space bound; 1000000 for U)");
  run_cmd->add_option("--d-cap", run_args.d_cap, "Largest random initial d for U (default: 3 x diameter)");
  run_cmd->add_option("--init", run_args.init_file, "Initial configuration JSON");
  run_cmd->add_option("--schedule", run_args.schedule_file, "Scripted schedule JSON");
  run_cmd->add_option("--scenario", run_args.scenario, "Built-in scenario, e.g. hc-slow:k=3");
  run_cmd->add_option("--trace", run_args.trace_path, "Write a JSONL trace");
  run_cmd->add_option("--summary", run_args.summary_path, "Append CSV summary rows to this file");
  run_cmd->add_option("--repetitions", run_args.repetitions, "Number of runs; run r uses seed + r")->capture_default_str();
  run_cmd->add_option("--jobs", run_args.jobs, "Worker threads")->capture_default_str();

  ReplayArgs replay_args;
  auto* replay_cmd = app.add_subcommand("replay", "Re-execute a scenario bundle, a trace or a built-in scenario");
  replay_cmd->add_option("--bundle", replay_args.bundle, "Scenario bundle JSON");
  replay_cmd->add_option("--trace", replay_args.trace, "JSONL trace written by run --trace");
  replay_cmd->add_option("--scenario", replay_args.scenario, "Built-in scenario name");
  replay_cmd->add_option("--tail-budget", replay_args.tail_budget, "Step budget after the script")->capture_default_str();

  TableArgs table_args;
  auto* table_cmd = app.add_subcommand("table", "Print the round or step table as CSV");
  table_cmd->add_option("which", table_args.which, "rounds or steps")->required();
  table_cmd->add_option("--from", table_args.from, "First diameter (rounds) or k (steps)");
  table_cmd->add_option("--to", table_args.to, "Last diameter (rounds) or k (steps)");

  ExploreArgs explore_args;
  auto* explore_cmd = app.add_subcommand("explore", "Exhaustively check a bounded variant on a small graph");
  add_common(explore_cmd, explore_args.common);
  explore_cmd->add_flag("--all", explore_args.all, "Sweep every connected graph with 2..4 nodes");
  explore_cmd->add_option("--cap", explore_args.cap, "Largest state space to enumerate")->capture_default_str();

  std::string dump_name, dump_out;
  auto* dump_cmd = app.add_subcommand("scenario-dump", "Write a built-in scenario as a JSON bundle");
  dump_cmd->add_option("name", dump_name, "Scenario, e.g. exponential:k=3")->required();
  dump_cmd->add_option("--out", dump_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_args);
    if (*replay_cmd) return cmd_replay(replay_args);
    if (*table_cmd) return cmd_table(table_args);
    if (*explore_cmd) return cmd_explore(explore_args);
    if (*dump_cmd) return cmd_dump(dump_name, dump_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoInput;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitData;
  } catch (const GraphError& e) {
    std::cerr << "graph error: " << e.what() << '\n';
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
