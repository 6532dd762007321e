#pragma once

// JSON, JSONL and CSV formats. Requires nlohmann/json (json.hpp).

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabsim/algorithm.hpp"
#include "stabsim/daemon.hpp"
#include "stabsim/engine.hpp"
#include "stabsim/error.hpp"
#include "stabsim/explorer.hpp"
#include "stabsim/graph.hpp"
#include "stabsim/scenarios.hpp"

namespace stabsim::io {

using json = nlohmann::json;

namespace detail {

template <class T, class Parse>
T parse_enum(const json& j, std::string_view what, Parse parse) {
  if (!j.is_string()) throw ParseError(std::string(what) + " must be a string", 0);
  auto v = parse(j.get<std::string>());
  if (!v) throw ParseError("unknown " + std::string(what) + " '" + j.get<std::string>() + "'", 0);
  return *v;
}

inline NodeId resolve_node(const json& j, const Graph& g) {
  if (j.is_number_unsigned()) {
    const auto id = j.get<std::uint64_t>();
    if (id >= g.node_count()) throw ParseError("node id " + std::to_string(id) + " out of range", 0);
    return static_cast<NodeId>(id);
  }
  if (j.is_string()) {
    if (auto id = g.find(j.get<std::string>())) return *id;
    throw ParseError("unknown node label '" + j.get<std::string>() + "'", 0);
  }
  throw ParseError("node reference must be an id or a label", 0);
}

}  // namespace detail

// --- graph -----------------------------------------------------------------

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (auto [u, v] : g.edges()) edges.push_back({u, v});
  json j{{"nodes", g.node_count()}, {"edges", std::move(edges)}};
  bool labelled = false;
  for (const auto& l : g.labels()) labelled |= !l.empty();
  if (labelled) j["labels"] = g.labels();
  return j;
}

inline Graph graph_from_json(const json& j) {
  try {
    const auto n = j.at("nodes").get<std::size_t>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
    std::vector<std::string> labels;
    if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    return Graph::from_edges(n, edges, std::move(labels));
  } catch (const json::exception& e) {
    throw ParseError(std::string("graph: ") + e.what(), 0);
  }
}

/// Builder mini-syntax: "line:5", "line:L=5", "lollipop:diam=4", "gk:k=2",
/// "hc-slow", "random:n=8,p=0.3". Any builder accepts "leaves=m" to attach
/// m extra leaves to the root. Random graphs draw from `seed`.
inline Graph graph_from_builder(std::string_view text, std::uint64_t seed = 0) {
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  std::string_view args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  static const std::map<std::string_view, std::string_view> primary{
      {"line", "L"}, {"lollipop", "diam"}, {"gk", "k"}, {"random", "n"}};
  if (!primary.contains(name) && name != "hc-slow")
    throw ParseError("unknown graph builder '" + std::string(name) + "'", 0);
  std::string rewritten;
  if (!args.empty() && args.substr(0, args.find(',')).find('=') == std::string_view::npos) {
    auto it = primary.find(name);
    if (it == primary.end()) throw ParseError("builder '" + std::string(name) + "' takes no positional argument", 0);
    rewritten = std::string(it->second) + "=" + std::string(args);
    args = rewritten;
  }
  auto kv = stabsim::detail::parse_kv(args, text);
  auto take = [&](std::string_view key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto v = it->second;
    kv.erase(it);
    return v;
  };
  auto need_u32 = [&](std::string_view key) {
    auto v = take(key);
    if (!v) throw ParseError("builder '" + std::string(name) + "' needs " + std::string(key), 0);
    return stabsim::detail::to_u32(*v, key);
  };
  const auto leaves = take("leaves");
  Graph g = [&] {
    if (name == "line") return build_line(need_u32("L"));
    if (name == "lollipop") return build_lollipop(need_u32("diam"));
    if (name == "gk") return build_gk(need_u32("k"));
    if (name == "hc-slow") return build_hc_slow_graph();
    if (name == "random") {
      const auto n = need_u32("n");
      double p = 0.3;
      if (auto ps = take("p")) {
        try {
          std::size_t used = 0;
          p = std::stod(*ps, &used);
          if (used != ps->size()) throw std::invalid_argument("p");
        } catch (const std::exception&) {
          throw ParseError("builder parameter p is not a number", 0);
        }
        if (!(p >= 0.0 && p <= 1.0)) throw ParseError("builder parameter p must lie in [0,1]", 0);
      }
      if (n < 2) throw ParseError("random graph needs n >= 2", 0);
      Rng rng(mix_seed(seed, 0x67a9));
      return random_connected_graph(n, p, rng);
    }
    throw ParseError("unknown graph builder '" + std::string(name) + "'", 0);
  }();
  if (!kv.empty()) throw ParseError("unknown parameter '" + kv.begin()->first + "' for builder " + std::string(name), 0);
  if (leaves) g = add_root_leaves(g, stabsim::detail::to_u32(*leaves, "leaves"));
  return g;
}

// --- algorithm spec --------------------------------------------------------

inline json spec_to_json(const AlgorithmSpec& s) {
  json j{{"variant", to_string(s.variant)}};
  if (s.bounded()) j["D"] = s.D;
  j["tie"] = to_string(s.tie_policy);
  j["priority"] = to_string(s.priority_policy);
  j["mutation"] = to_string(s.mutation);
  return j;
}

inline AlgorithmSpec spec_from_json(const json& j) {
  AlgorithmSpec s;
  try {
    s.variant = detail::parse_enum<Variant>(j.at("variant"), "variant", parse_variant);
    if (s.bounded()) s.D = j.at("D").get<std::uint32_t>();
    if (j.contains("tie")) s.tie_policy = detail::parse_enum<TiePolicy>(j["tie"], "tie policy", parse_tie_policy);
    if (j.contains("priority"))
      s.priority_policy = detail::parse_enum<PriorityPolicy>(j["priority"], "priority policy", parse_priority_policy);
    if (j.contains("mutation")) s.mutation = detail::parse_enum<Mutation>(j["mutation"], "mutation", parse_mutation);
  } catch (const json::exception& e) {
    throw ParseError(std::string("algorithm: ") + e.what(), 0);
  }
  s.validate();
  return s;
}

// --- configuration ---------------------------------------------------------

inline json config_to_json(const Configuration& c) {
  json d = json::array(), par = json::array();
  for (NodeId p = 0; p < c.size(); ++p) {
    d.push_back(c.d(p));
    if (c.par(p) == kNoParent) par.push_back(nullptr);
    else par.push_back(c.par(p));
  }
  return {{"d", std::move(d)}, {"par", std::move(par)}};
}

/// Parents may be given as ids or labels; the result is checked against
/// `spec` and `g`.
inline Configuration config_from_json(const json& j, const AlgorithmSpec& spec, const Graph& g) {
  Configuration c(g.node_count());
  try {
    const auto& d = j.at("d");
    const auto& par = j.at("par");
    if (d.size() != g.node_count() || par.size() != g.node_count())
      throw ParseError("configuration arrays must have one entry per node", 0);
    for (NodeId p = 0; p < g.node_count(); ++p)
      c.set(p, d.at(p).get<std::uint32_t>(), par.at(p).is_null() ? kNoParent : detail::resolve_node(par.at(p), g));
  } catch (const json::exception& e) {
    throw ParseError(std::string("configuration: ") + e.what(), 0);
  }
  if (auto why = check_configuration(spec, g, c); !why.empty()) throw ParseError("configuration: " + why, 0);
  return c;
}

// --- moves and schedules ---------------------------------------------------

inline json move_to_json(const Move& m) { return {{"p", m.process}, {"rule", to_string(m.rule)}}; }

inline json moves_to_json(std::span<const Move> ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(move_to_json(m));
  return a;
}

inline json schedule_to_json(const Schedule& s) {
  json a = json::array();
  for (const auto& step : s) a.push_back(moves_to_json(step));
  return a;
}

inline MoveSet moves_from_json(const json& j, const Graph& g) {
  if (!j.is_array()) throw ParseError("a step must be a list of moves", 0);
  MoveSet out;
  for (const auto& m : j) {
    if (!m.is_object() || !m.contains("p") || !m.contains("rule"))
      throw ParseError("a move needs fields \"p\" and \"rule\"", 0);
    out.push_back({detail::resolve_node(m["p"], g), detail::parse_enum<RuleId>(m["rule"], "rule", parse_rule)});
  }
  return out;
}

inline Schedule schedule_from_json(const json& j, const Graph& g) {
  if (!j.is_array()) throw ParseError("a schedule must be a list of steps", 0);
  Schedule s;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      s.push_back(moves_from_json(j[i], g));
    } catch (const ParseError& e) {
      throw ParseError("step " + std::to_string(i) + ": " + e.what(), 0);
    }
  }
  return s;
}

// --- expectations and scenario bundles -------------------------------------

inline json expectation_to_json(const Expectation& e) {
  auto count = [](const std::optional<CountExpectation>& c) -> json {
    if (!c) return nullptr;
    return {{"value", c->value}, {"exact", c->exact}};
  };
  return {{"rounds", count(e.rounds)},
          {"steps", count(e.steps)},
          {"scope", e.scope == CountScope::Prefix ? "prefix" : "full"}};
}

inline Expectation expectation_from_json(const json& j) {
  Expectation e;
  auto count = [](const json& c) -> std::optional<CountExpectation> {
    if (c.is_null()) return std::nullopt;
    return CountExpectation{c.at("value").get<std::size_t>(), c.value("exact", true)};
  };
  if (j.contains("rounds")) e.rounds = count(j["rounds"]);
  if (j.contains("steps")) e.steps = count(j["steps"]);
  const auto scope = j.value("scope", std::string("full"));
  if (scope == "prefix") e.scope = CountScope::Prefix;
  else if (scope != "full") throw ParseError("unknown count scope '" + scope + "'", 0);
  return e;
}

/// Bundles store either a schedule (with an optional "tail" of "sync") or,
/// for unscripted scenarios, "daemon": "sync".
inline json scenario_to_json(const Scenario& s) {
  json j{{"name", s.name},
         {"graph", graph_to_json(s.graph)},
         {"spec", spec_to_json(s.spec)},
         {"init", config_to_json(s.init)},
         {"expected", expectation_to_json(s.expected)}};
  if (auto* sc = std::get_if<Scripted>(&s.strategy)) {
    j["schedule"] = schedule_to_json(sc->schedule);
    if (sc->cycle_to) j["cycle_to"] = sc->cycle_to;
    if (sc->then && std::holds_alternative<Synchronous>(*sc->then)) j["tail"] = "sync";
    else if (sc->then) throw Error("only synchronous tails can be serialized");
    else j["tail"] = nullptr;
  } else if (std::holds_alternative<Synchronous>(s.strategy)) {
    j["daemon"] = "sync";
  } else {
    throw Error("only scripted or synchronous scenarios can be serialized");
  }
  return j;
}

inline Scenario scenario_from_json(const json& j) {
  try {
    Graph g = graph_from_json(j.at("graph"));
    const auto spec = spec_from_json(j.at("spec"));
    auto init = config_from_json(j.at("init"), spec, g);
    DaemonStrategy strategy = Synchronous{};
    if (j.contains("schedule")) {
      Scripted sc{schedule_from_json(j["schedule"], g), std::nullopt, j.value("cycle_to", std::size_t{0})};
      if (j.contains("tail") && !j["tail"].is_null()) {
        if (j["tail"] != "sync") throw ParseError("unsupported tail strategy", 0);
        sc.then = Synchronous{};
      }
      strategy = std::move(sc);
    } else if (j.value("daemon", std::string("sync")) != "sync") {
      throw ParseError("unsupported daemon in scenario bundle", 0);
    }
    Expectation ex = j.contains("expected") ? expectation_from_json(j["expected"]) : Expectation{};
    return {j.value("name", std::string("bundle")), spec, std::move(g), std::move(init), std::move(strategy), ex};
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario bundle: ") + e.what(), 0);
  }
}

// --- traces ----------------------------------------------------------------

/// One JSON object per line: a header, one record per step, a footer.
inline void write_trace_jsonl(std::ostream& out, const ExecutionTrace& t, const AlgorithmSpec& spec, const Graph& g) {
  out << json{{"type", "header"}, {"graph", graph_to_json(g)}, {"spec", spec_to_json(spec)},
              {"initial", config_to_json(t.initial)}}
             .dump()
      << '\n';
  if (t.recorded) {
    std::vector<Move> ms;
    for (std::size_t i = 0; i < t.step_count; ++i) {
      ms.clear();
      for (const auto& a : t.step_moves(i)) ms.push_back(a.move);
      out << json{{"i", i}, {"moves", moves_to_json(ms)}, {"round", t.round_of_step(i)}}.dump() << '\n';
    }
  }
  json footer{{"type", "footer"},
              {"final", config_to_json(t.final_config)},
              {"steps", t.step_count},
              {"rounds", t.round_count},
              {"round_boundaries", t.round_boundaries},
              {"outcome", to_string(t.outcome)}};
  if (t.outcome == Outcome::ScheduleViolation) footer["violation"] = t.violation_reason;
  out << footer.dump() << '\n';
}

struct TraceFile {
  Graph graph;
  AlgorithmSpec spec;
  Configuration initial;
  Schedule moves;
  Configuration final_config;
  std::size_t steps = 0;
  std::size_t rounds = 0;
  std::vector<std::size_t> round_boundaries;
  Outcome outcome = Outcome::Terminal;
};

inline TraceFile read_trace_jsonl(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<TraceFile> tf;
  bool footer = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(e.what(), lineno);
    }
    try {
      const auto type = j.value("type", std::string("step"));
      if (type == "header") {
        if (tf) throw ParseError("second header", lineno);
        Graph g = graph_from_json(j.at("graph"));
        auto spec = spec_from_json(j.at("spec"));
        auto init = config_from_json(j.at("initial"), spec, g);
        tf.emplace(TraceFile{std::move(g), spec, std::move(init), {}, {}, 0, 0, {}, Outcome::Terminal});
      } else if (type == "footer") {
        if (!tf) throw ParseError("footer before header", lineno);
        tf->final_config = config_from_json(j.at("final"), tf->spec, tf->graph);
        tf->steps = j.at("steps").get<std::size_t>();
        tf->rounds = j.at("rounds").get<std::size_t>();
        tf->round_boundaries = j.at("round_boundaries").get<std::vector<std::size_t>>();
        auto o = parse_outcome(j.at("outcome").get<std::string>());
        if (!o) throw ParseError("unknown outcome", lineno);
        tf->outcome = *o;
        footer = true;
      } else {
        if (!tf || footer) throw ParseError("step record outside header/footer", lineno);
        if (j.at("i").get<std::size_t>() != tf->moves.size()) throw ParseError("step index out of sequence", lineno);
        tf->moves.push_back(moves_from_json(j.at("moves"), tf->graph));
      }
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.what(), lineno);
    } catch (const json::exception& e) {
      throw ParseError(e.what(), lineno);
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!tf) throw ParseError("trace has no header", 0);
  if (!footer) throw ParseError("trace has no footer", 0);
  return std::move(*tf);
}

// --- CSV summary -----------------------------------------------------------

inline constexpr std::string_view kSummaryHeader = "graph,variant,D,seed,steps,rounds,outcome";

struct SummaryRow {
  std::string graph;
  AlgorithmSpec spec;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  std::size_t rounds = 0;
  std::string outcome;
};

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string summary_row(const SummaryRow& r) {
  std::ostringstream o;
  o << csv_field(r.graph) << ',' << to_string(r.spec.variant) << ',';
  if (r.spec.bounded()) o << r.spec.D;
  o << ',' << r.seed << ',' << r.steps << ',' << r.rounds << ',' << r.outcome;
  return o.str();
}

// --- explore report --------------------------------------------------------

inline json explore_to_json(const ExploreReport& r) {
  json j{{"config_count", r.config_count},
         {"sink_count", r.sink_count},
         {"legitimate_count", r.legitimate_count},
         {"acyclic", r.acyclic},
         {"longest_path", r.longest_path ? json(*r.longest_path) : json(nullptr)},
         {"bound", r.bound},
         {"sinks_match", r.sinks_match}};
  if (!r.cycle.empty()) {
    json c = json::array();
    for (const auto& conf : r.cycle) c.push_back(config_to_json(conf));
    j["cycle"] = std::move(c);
  }
  if (r.sinks.terminal_not_legitimate) j["terminal_not_legitimate"] = config_to_json(*r.sinks.terminal_not_legitimate);
  if (r.sinks.legitimate_not_terminal) j["legitimate_not_terminal"] = config_to_json(*r.sinks.legitimate_not_terminal);
  return j;
}

}  // namespace stabsim::io
