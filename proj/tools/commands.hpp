#pragma once

// Command-line front end. run_cli is the whole program minus main so tests
// can drive it in-process.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pto/baseline.hpp"
#include "pto/compare.hpp"
#include "pto/io.hpp"
#include "pto/planner.hpp"
#include "pto/simulate.hpp"
#include "pto/svg.hpp"

namespace pto::cli {

enum ExitCode : int { kOk = 0, kPlanningFailure = 1, kUsageError = 2 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PlanningFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void write_error(std::ostream& err, int code, const std::string& what) {
  nlohmann::json e{{"format", kDocumentFormat}, {"type", "error"}, {"exit_code", code}, {"message", what}};
  err << e.dump() << '\n';
}

/// Loads a scenario and applies `name=value` prior overrides.
inline Scenario load_with_priors(const std::string& path, const std::vector<std::string>& priors) {
  Scenario sc = load_scenario(path);
  for (const std::string& p : priors) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--prior expects name=value, got '" + p + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(p.substr(eq + 1), &used);
      if (used != p.size() - eq - 1) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw UsageError("--prior value is not a number in '" + p + "'");
    }
    set_factor_prior(sc, p.substr(0, eq), v);
  }
  if (sc.mode == ScenarioMode::ExclusiveLocations) {
    double total = 0.0;
    for (const UncertainFactor& f : sc.factors) total += f.prior;
    if (std::abs(total - 1.0) > 1e-6) throw UsageError("location weights must sum to 1 after --prior overrides");
  }
  return sc;
}

inline std::string read_hash(const nlohmann::json& doc) { return doc.value("scenario_hash", std::string{}); }

struct PlanOptions {
  std::string scenario;
  std::vector<std::string> priors;
  std::uint64_t seed = 0;
  std::size_t min_iters = 0;
  std::size_t max_iters = 50000;
  std::optional<double> steer_eta;
  std::optional<double> gamma;
  double goal_bias = 0.05;
  std::size_t refine_iters = kDefaultRefineIterations;
  std::size_t rrt_iters = 1000;
  std::string algo = "pto";
  std::string out;
  std::string metrics;
  std::string svg;
  std::string dump_graph;
  bool no_timings = false;
};

inline void add_planner_flags(CLI::App* c, PlanOptions& o) {
  c->add_option("--min-iters", o.min_iters, "Minimum random-graph iterations");
  c->add_option("--max-iters", o.max_iters, "Maximum random-graph iterations");
  c->add_option("--steer-eta", o.steer_eta, "Steering step length (m)");
  c->add_option("--gamma", o.gamma, "Adaptive radius constant");
  c->add_option("--goal-bias", o.goal_bias, "Probability of sampling inside a goal region");
  c->add_option("--refine-iters", o.refine_iters, "Shortcut iterations per path piece");
  c->add_option("--rrt-iters", o.rrt_iters, "RRT* iterations per baseline piece");
  c->add_option("--prior", o.priors, "Factor prior override name=value (repeatable)");
}

inline PlannerParams planner_params(const PlanOptions& o) {
  PlannerParams p;
  p.rrg.min_iterations = o.min_iters;
  p.rrg.max_iterations = o.max_iters;
  p.rrg.steer_eta = o.steer_eta;
  p.rrg.gamma = o.gamma;
  p.rrg.goal_bias = o.goal_bias;
  p.rrg.seed = o.seed;
  p.refine_iterations = o.refine_iters;
  return p;
}

inline BaselineParams baseline_params(const PlanOptions& o) {
  BaselineParams p;
  p.rrt.iterations = o.rrt_iters;
  p.rrt.steer_eta = o.steer_eta;
  p.rrt.gamma = o.gamma;
  p.rrt.goal_bias = o.goal_bias;
  p.rrt.seed = o.seed;
  return p;
}

inline nlohmann::json params_json(const PlanOptions& o) {
  nlohmann::json j;
  j["algo"] = o.algo;
  j["min_iterations"] = o.min_iters;
  j["max_iterations"] = o.max_iters;
  j["steer_eta"] = o.steer_eta ? nlohmann::json(*o.steer_eta) : nlohmann::json(nullptr);
  j["gamma"] = o.gamma ? nlohmann::json(*o.gamma) : nlohmann::json(nullptr);
  j["goal_bias"] = o.goal_bias;
  if (o.algo == "pto") {
    j["refine_iterations"] = o.refine_iters;
  } else {
    j["rrt_iterations"] = o.rrt_iters;
  }
  return j;
}

inline int cmd_plan(const PlanOptions& o, std::ostream& out) {
  const Scenario sc = load_with_priors(o.scenario, o.priors);
  Provenance prov{scenario_hash(sc), o.seed, params_json(o)};
  PathTree tree;
  nlohmann::json metrics;
  PlanResult pr;
  if (o.algo == "pto") {
    pr = plan(sc, planner_params(o));
    if (!o.dump_graph.empty()) write_text_file(o.dump_graph, graph_to_json(pr.graph, prov.scenario_hash).dump() + "\n");
    metrics = metrics_to_json(pr.metrics, prov, !o.no_timings);
    if (!pr.success) {
      metrics["error"] = pr.error;
      if (!pr.coverage.complete()) metrics["missing_worlds"] = pr.coverage.missing();
      if (!o.metrics.empty()) write_text_file(o.metrics, metrics.dump() + "\n");
      throw PlanningFailure(pr.error);
    }
    tree = pr.tree;
  } else {
    if (sc.mode != ScenarioMode::ExclusiveLocations)
      throw UsageError("--algo bnb-rrtstar requires an exclusive_locations scenario");
    const BaselineResult br = bnb_tamp_plan(sc, baseline_params(o));
    metrics = {{"format", kDocumentFormat},
               {"type", "metrics"},
               {"algorithm", "bnb-rrtstar"},
               {"scenario_hash", prov.scenario_hash},
               {"seed", o.seed},
               {"search_nodes", br.search_nodes},
               {"pruned", br.pruned},
               {"pieces_planned", br.pieces_planned},
               {"rrt_iterations", o.rrt_iters},
               {"collision_checks", br.collision_checks},
               {"cost", br.tree.expected_cost}};
    if (!br.success) {
      if (!o.metrics.empty()) write_text_file(o.metrics, metrics.dump() + "\n");
      throw PlanningFailure("baseline found no complete visit order");
    }
    tree = br.tree;
  }
  const std::string doc = path_tree_to_json(tree, prov).dump(1) + "\n";
  if (!o.out.empty()) {
    write_text_file(o.out, doc);
  } else {
    out << doc;
  }
  if (!o.metrics.empty()) write_text_file(o.metrics, metrics.dump() + "\n");
  if (!o.svg.empty()) write_text_file(o.svg, render_svg(sc, &tree, nullptr));
  return kOk;
}

struct SimulateOptions {
  std::string tree;
  std::string scenario;
  std::vector<std::string> priors;
  std::string world = "all";
  std::string out;
};

inline int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const Scenario sc = load_with_priors(o.scenario, o.priors);
  const nlohmann::json doc = read_json_file(o.tree);
  const PathTree tree = path_tree_from_json(doc);
  if (read_hash(doc) != scenario_hash(sc))
    throw UsageError("tree was planned for a different scenario (hash " + read_hash(doc) + ", scenario " +
                     scenario_hash(sc) + ")");
  std::vector<std::size_t> worlds;
  if (o.world != "all") {
    std::size_t s = 0;
    try {
      std::size_t used = 0;
      s = std::stoul(o.world, &used);
      if (used != o.world.size()) throw std::invalid_argument(o.world);
    } catch (const std::exception&) {
      throw UsageError("--world expects a hypothesis index or 'all'");
    }
    if (s >= sc.hypothesis_count()) throw UsageError("--world index out of range");
    worlds.push_back(s);
  }
  const SimulationReport rep = simulate(tree, sc, worlds);
  std::ostringstream lines;
  bool violation = false;
  for (const WorldExecution& ex : rep.worlds) {
    nlohmann::json r{{"format", kDocumentFormat}, {"type", "execution"},     {"world", ex.world},
                     {"prior", ex.prior},         {"cost", ex.cost},         {"reached_goal", ex.reached_goal},
                     {"safe", ex.safe},           {"branchings", ex.branchings}};
    if (ex.violation) {
      r["violation"] = *ex.violation;
      violation = true;
    }
    lines << r.dump() << '\n';
  }
  if (o.world == "all") {
    nlohmann::json s{{"format", kDocumentFormat},
                     {"type", "summary"},
                     {"weighted_cost", rep.weighted_cost},
                     {"expected_cost", tree.expected_cost},
                     {"difference", rep.weighted_cost - tree.expected_cost},
                     {"all_reached", rep.all_reached},
                     {"all_safe", rep.all_safe}};
    lines << s.dump() << '\n';
  }
  if (!o.out.empty()) {
    write_text_file(o.out, lines.str());
  } else {
    out << lines.str();
  }
  if (violation) throw PlanningFailure("tree violates its invariants in some world");
  return rep.all_reached && rep.all_safe ? kOk : kPlanningFailure;
}

struct CompareOptions {
  PlanOptions plan;
  std::vector<std::string> scenarios;
  std::vector<std::string> algos{"pto", "bnb-rrtstar"};
  std::size_t seeds = 20;
  std::string out;
  std::string svg;
};

inline int cmd_compare(const CompareOptions& o, std::ostream& out) {
  std::vector<Scenario> scs;
  for (const std::string& p : o.scenarios) {
    scs.push_back(load_with_priors(p, o.plan.priors));
    if (scs.back().mode != ScenarioMode::ExclusiveLocations)
      throw UsageError("compare needs exclusive_locations scenarios: '" + p + "'");
    if (scs.back().name.empty()) scs.back().name = p;
  }
  std::vector<Algorithm> algos;
  for (const std::string& a : o.algos) {
    if (a == "pto") {
      algos.push_back(Algorithm::Pto);
    } else if (a == "bnb-rrtstar") {
      algos.push_back(Algorithm::BnbRrtStar);
    } else {
      throw UsageError("unknown algorithm '" + a + "'");
    }
  }
  CompareParams cp;
  cp.planner = planner_params(o.plan);
  cp.baseline = baseline_params(o.plan);
  cp.seeds.clear();
  for (std::size_t i = 0; i < o.seeds; ++i) cp.seeds.push_back(o.plan.seed + i);
  const std::vector<CompareCell> cells = run_compare(scs, algos, cp);

  std::ostringstream records;
  out << std::left << std::setw(24) << "scenario" << std::setw(6) << "|H|" << std::setw(14) << "algorithm"
      << std::right << std::setw(12) << "mean_cost" << std::setw(10) << "stddev" << std::setw(16) << "checks"
      << std::setw(12) << "time_ms" << std::setw(6) << "fail" << '\n';
  for (const CompareCell& c : cells) {
    out << std::left << std::setw(24) << c.scenario << std::setw(6) << c.hypotheses << std::setw(14)
        << to_string(c.algorithm) << std::right << std::fixed << std::setprecision(3) << std::setw(12) << c.mean_cost
        << std::setw(10) << c.stddev_cost << std::setprecision(0) << std::setw(16) << c.mean_collision_checks
        << std::setprecision(1) << std::setw(12) << c.mean_time_ms << std::setw(6) << c.failures << '\n';
    out.unsetf(std::ios::fixed);
    nlohmann::json runs = nlohmann::json::array();
    for (const RunRecord& r : c.runs) {
      nlohmann::json rj{{"seed", r.seed}, {"success", r.success}, {"cost", r.cost}, {"collision_checks", r.collision_checks}};
      if (!r.success) rj["error"] = r.error;
      runs.push_back(rj);
    }
    nlohmann::json rec{{"format", kDocumentFormat},
                       {"type", "comparison"},
                       {"scenario", c.scenario},
                       {"hypotheses", c.hypotheses},
                       {"algorithm", to_string(c.algorithm)},
                       {"seeds", o.seeds},
                       {"mean_cost", c.mean_cost},
                       {"stddev_cost", c.stddev_cost},
                       {"mean_collision_checks", c.mean_collision_checks},
                       {"mean_time_ms", c.mean_time_ms},
                       {"failures", c.failures},
                       {"runs", runs}};
    records << rec.dump() << '\n';
  }
  if (!o.out.empty()) write_text_file(o.out, records.str());
  if (!o.svg.empty()) {
    std::vector<std::string> groups;
    for (const Scenario& sc : scs) groups.push_back(sc.name);
    std::vector<BarSeries> series;
    for (std::size_t a = 0; a < algos.size(); ++a) {
      BarSeries s{to_string(algos[a]), {}, {}};
      for (std::size_t k = 0; k < scs.size(); ++k) {
        const CompareCell& c = cells[k * algos.size() + a];
        s.values.push_back(c.mean_cost);
        s.errors.push_back(c.stddev_cost);
      }
      series.push_back(std::move(s));
    }
    write_text_file(o.svg, render_bar_chart("mean path-tree cost", groups, series));
  }
  for (const CompareCell& c : cells)
    if (c.failures == c.runs.size()) return kPlanningFailure;
  return kOk;
}

struct RenderOptions {
  std::string scenario;
  std::vector<std::string> priors;
  std::string tree;
  std::string graph;
  std::string svg;
};

inline int cmd_render(const RenderOptions& o, std::ostream& out) {
  const Scenario sc = load_with_priors(o.scenario, o.priors);
  std::optional<PathTree> tree;
  std::optional<RRGraph> graph;
  if (!o.tree.empty()) {
    const nlohmann::json doc = read_json_file(o.tree);
    tree = path_tree_from_json(doc);
    if (read_hash(doc) != scenario_hash(sc)) throw UsageError("tree was planned for a different scenario");
  }
  if (!o.graph.empty()) graph = graph_from_json(read_json_file(o.graph));
  const std::string svg = render_svg(sc, tree ? &*tree : nullptr, graph ? &*graph : nullptr);
  if (!o.svg.empty()) {
    write_text_file(o.svg, svg);
  } else {
    out << svg;
  }
  return kOk;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contingency path-tree planning under discrete partial observability", "pto"};
  app.require_subcommand(1);

  PlanOptions plan_o;
  CLI::App* plan_c = app.add_subcommand("plan", "Plan a path-tree for a scenario");
  plan_c->add_option("--scenario", plan_o.scenario, "Scenario document")->required();
  plan_c->add_option("--seed", plan_o.seed, "Random seed");
  add_planner_flags(plan_c, plan_o);
  plan_c->add_option("--algo", plan_o.algo, "Planner")->check(CLI::IsMember({"pto", "bnb-rrtstar"}));
  plan_c->add_option("--out", plan_o.out, "Path-tree output (stdout if omitted)");
  plan_c->add_option("--metrics", plan_o.metrics, "Metrics record output");
  plan_c->add_option("--svg", plan_o.svg, "SVG rendering output");
  plan_c->add_option("--dump-graph", plan_o.dump_graph, "Random-graph dump output");
  plan_c->add_flag("--no-timings", plan_o.no_timings, "Leave wall times out of the metrics record");

  SimulateOptions sim_o;
  CLI::App* sim_c = app.add_subcommand("simulate", "Execute a path-tree in ground-truth worlds");
  sim_c->add_option("--tree", sim_o.tree, "Path-tree document")->required();
  sim_c->add_option("--scenario", sim_o.scenario, "Scenario document")->required();
  sim_c->add_option("--prior", sim_o.priors, "Factor prior override name=value (repeatable)");
  sim_c->add_option("--world", sim_o.world, "Hypothesis index or 'all'");
  sim_c->add_option("--out", sim_o.out, "Report output (stdout if omitted)");

  CompareOptions cmp_o;
  CLI::App* cmp_c = app.add_subcommand("compare", "Compare planners over scenarios and seeds");
  cmp_c->add_option("--scenario", cmp_o.scenarios, "Scenario documents (repeatable)")->required();
  cmp_c->add_option("--algo", cmp_o.algos, "Planners (repeatable)");
  cmp_c->add_option("--seeds", cmp_o.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  cmp_c->add_option("--seed", cmp_o.plan.seed, "First seed");
  add_planner_flags(cmp_c, cmp_o.plan);
  cmp_c->add_option("--out", cmp_o.out, "Comparison records output");
  cmp_c->add_option("--svg", cmp_o.svg, "Bar chart output");

  RenderOptions ren_o;
  CLI::App* ren_c = app.add_subcommand("render", "Render a scenario with a tree or graph as SVG");
  ren_c->add_option("--scenario", ren_o.scenario, "Scenario document")->required();
  ren_c->add_option("--prior", ren_o.priors, "Factor prior override name=value (repeatable)");
  ren_c->add_option("--tree", ren_o.tree, "Path-tree document");
  ren_c->add_option("--graph", ren_o.graph, "Random-graph dump");
  ren_c->add_option("--svg", ren_o.svg, "SVG output (stdout if omitted)");

  std::vector<const char*> argv{"pto"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    write_error(err, kUsageError, e.what());
    return kUsageError;
  }

  try {
    if (plan_c->parsed()) return cmd_plan(plan_o, out);
    if (sim_c->parsed()) return cmd_simulate(sim_o, out);
    if (cmp_c->parsed()) return cmd_compare(cmp_o, out);
    if (ren_c->parsed()) return cmd_render(ren_o, out);
  } catch (const PlanningFailure& e) {
    write_error(err, kPlanningFailure, e.what());
    return kPlanningFailure;
  } catch (const PlanningError& e) {
    write_error(err, kPlanningFailure, e.what());
    return kPlanningFailure;
  } catch (const ScenarioError& e) {
    write_error(err, kUsageError, e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    write_error(err, kUsageError, e.what());
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace pto::cli
