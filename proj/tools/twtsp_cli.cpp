// Command-line front end: gen, oracle, offline, simulate, bench, validate.
//
// Exit codes: 0 success, 2 validation or input failure, 3 state budget
// exceeded, 1 anything unexpected.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "twtsp/twtsp.hpp"

using namespace twtsp;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string format = "json";
  std::uint64_t state_budget = kDefaultStateBudget;
};

ParamMap parse_params(const std::string& text) {
  ParamMap out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(Errc::ParseError, "parameter '" + item + "' lacks '='");
    try {
      out[item.substr(0, eq)] = std::stoll(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, "parameter '" + item + "' is not an integer");
    }
  }
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

Instance load_instance(const std::string& path) {
  return parse_guard(path, [&] { return instance_from_json(read_json_file(path)); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-window TSP with predictions: generators, solvers and experiments"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--state-budget", g.state_budget, "Oracle state budget")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  std::string kind, params, perturb, out_inst, out_pred, out_match;
  bool conforming = false;
  gen->add_option("--kind", kind, "random, many, chain, chain0, uniform, line-service, line0")->required();
  gen->add_option("--params", params, "Generator parameters k=v,...");
  gen->add_option("--perturb", perturb, "Prediction targets for random: lambda=,tau=,rho_num=,rho_den=");
  gen->add_flag("--conforming", conforming, "Require targets within the guarantee's assumptions");
  gen->add_option("--out-instance", out_inst, "Instance file")->required();
  gen->add_option("--out-predictions", out_pred, "Prediction file");
  gen->add_option("--out-matching", out_match, "Matching file");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact optimum of a small instance");
  std::string inst_path, out_path;
  std::optional<Time> service;
  std::optional<Vertex> root;
  std::optional<std::uint64_t> budget;
  oracle->add_option("--instance", inst_path)->required();
  oracle->add_option("--service", service);
  oracle->add_option("--root", root);
  oracle->add_option("--budget", budget);
  oracle->add_option("--out", out_path);

  // offline
  auto* offline = app.add_subcommand("offline", "Offline approximation walk");
  bool exact_or = false, greedy_or = false;
  offline->add_option("--instance", inst_path)->required();
  offline->add_option("--service", service);
  auto* ex = offline->add_flag("--exact-orienteering", exact_or);
  offline->add_flag("--greedy-orienteering", greedy_or)->excludes(ex);
  offline->add_option("--out", out_path);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run the online algorithm against predictions");
  std::string pred_path, match_path, eps_text = "all", mode_text = "one2one";
  std::optional<Time> lambda;
  bool guess = false;
  sim->add_option("--instance", inst_path)->required();
  sim->add_option("--predictions", pred_path)->required();
  sim->add_option("--matching", match_path);
  auto* lam = sim->add_option("--lambda", lambda);
  sim->add_flag("--guess-lambda", guess)->excludes(lam);
  sim->add_option("--epsilon", eps_text)->check(CLI::IsMember({"-1", "0", "1", "all"}));
  sim->add_option("--mode", mode_text)->check(CLI::IsMember({"one2one", "many2one"}));
  sim->add_option("--out", out_path);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment suite");
  std::string suite_path, out_dir;
  unsigned workers = 1;
  bench_cmd->add_option("--suite", suite_path)->required();
  bench_cmd->add_option("--out-dir", out_dir)->required();
  bench_cmd->add_option("--workers", workers)->capture_default_str();

  // validate
  auto* val = app.add_subcommand("validate", "Check an instance and optionally a walk");
  std::string walk_path;
  val->add_option("--instance", inst_path)->required();
  val->add_option("--walk", walk_path);
  val->add_option("--service", service);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const auto p = parse_params(params);
      std::optional<Instance> pred;
      std::optional<Matching> m;
      Instance inst;
      if (kind == "random") {
        inst = gen_random(RandomParams::from(p), g.seed);
        if (!perturb.empty()) {
          const auto t = parse_params(perturb);
          PerturbTargets tg{param(t, "lambda", 0), param(t, "tau", 0),
                            Rational(param(t, "rho_num", 1), param(t, "rho_den", 1))};
          auto ps = perturb_predictions(inst, tg, g.seed ^ 0x5bd1e995ULL, conforming);
          pred = std::move(ps.predictions);
          m = std::move(ps.matching);
        }
      } else if (kind == "many") {
        ManyToOneParams mp;
        mp.graph = RandomParams::from(p);
        mp.predictions = static_cast<int>(param(p, "predictions", mp.predictions));
        mp.max_preimages = static_cast<int>(param(p, "max_preimages", mp.max_preimages));
        mp.radius = param(p, "radius", mp.radius);
        mp.tau = param(p, "tau", mp.tau);
        auto r = gen_many_to_one(mp, g.seed);
        inst = std::move(r.instance);
        pred = std::move(r.predictions);
        m = std::move(r.matching);
      } else if (auto k = parse_lb_kind(kind)) {
        auto r = gen_lb(*k, p, g.seed);
        inst = std::move(r.instance);
        pred = std::move(r.predictions);
        m = std::move(r.matching);
      } else {
        throw Error(Errc::InvalidParams, "unknown kind '" + kind + "'");
      }
      emit(out_inst, to_json(inst).dump(2) + "\n");
      if (!out_pred.empty()) {
        if (!pred) throw Error(Errc::InvalidParams, "kind '" + kind + "' has no predictions here");
        emit(out_pred, to_json(*pred).dump(2) + "\n");
      }
      if (!out_match.empty()) {
        if (!m) throw Error(Errc::InvalidParams, "kind '" + kind + "' has no matching here");
        emit(out_match, to_json(*m).dump(2) + "\n");
      }
      return 0;
    }

    if (oracle->parsed()) {
      Instance inst = load_instance(inst_path);
      if (service) inst.service = *service;
      if (root) inst.root = *root;
      require_valid(inst);
      const auto res = opt_twtsp(inst, budget.value_or(g.state_budget));
      if (g.format == "csv") emit(out_path, "value,explored_states\n" + std::to_string(res.value) + "," +
                                                std::to_string(res.explored_states) + "\n");
      else
        emit(out_path, json{{"value", res.value}, {"walk", to_json(*res.walk)}, {"explored_states", res.explored_states}}
                           .dump(2) + "\n");
      return 0;
    }

    if (offline->parsed()) {
      Instance inst = load_instance(inst_path);
      if (service) inst.service = *service;
      OfflineConfig cfg;
      cfg.solver = greedy_or ? OrienteeringSolver::Greedy : OrienteeringSolver::Exact;
      const auto w = offline_solve(inst, cfg);
      const auto rew = reward(w, inst);
      if (g.format == "csv") emit(out_path, "reward\n" + std::to_string(rew) + "\n");
      else emit(out_path, json{{"reward", rew}, {"walk", to_json(w)}}.dump(2) + "\n");
      return 0;
    }

    if (sim->parsed()) {
      const Instance inst = load_instance(inst_path);
      const Instance pred = load_instance(pred_path);
      std::optional<Matching> m;
      if (!match_path.empty()) m = parse_guard(match_path, [&] { return matching_from_json(read_json_file(match_path)); });
      if (!lambda && !guess) throw Error(Errc::InvalidParams, "give --lambda or --guess-lambda");
      SimulationConfig cfg;
      cfg.mode = mode_text == "many2one" ? OnlineMode::ManyToOne : OnlineMode::OneToOne;
      cfg.state_budget = g.state_budget;
      const auto rep = simulate(inst, pred, m, guess ? std::nullopt : lambda, g.seed, cfg);
      json out = to_json(rep);
      if (eps_text != "all") {
        const int eps = std::stoi(eps_text);
        const auto& run = rep.runs.at(eps);
        json log = json::array();
        for (const auto& d : run.detour_log)
          log.push_back({{"pred_index", d.pred_index}, {"time", d.time}, {"chosen", d.chosen}, {"length", d.length}});
        out = {{"epsilon", eps},
               {"reward", run.covered.reward},
               {"covered", to_json(run.covered)},
               {"walk", to_json(run.walk)},
               {"detour_log", log},
               {"s_prime", rep.s_prime},
               {"offline_value", rep.offline_value}};
      }
      if (g.format == "csv") {
        std::ostringstream os;
        os << "epsilon,reward\n";
        for (const auto& [e, r] : rep.per_epsilon_rewards)
          if (eps_text == "all" || std::to_string(e) == eps_text) os << e << ',' << r << '\n';
        emit(out_path, os.str());
      } else {
        emit(out_path, out.dump(2) + "\n");
      }
      return 0;
    }

    if (bench_cmd->parsed()) {
      const auto suite = read_json_file(suite_path);
      SimulationConfig cfg;
      cfg.state_budget = g.state_budget;
      const auto res = bench(suite, workers, cfg);
      std::filesystem::create_directories(out_dir);
      const std::filesystem::path dir(out_dir);
      write_text_file((dir / "bench.csv").string(), res.csv);
      for (const auto& [name, text] : res.dat_files) write_text_file((dir / name).string(), text);
      write_text_file((dir / "suite.json").string(), suite.dump(2) + "\n");
      std::cout << res.csv;
      return 0;
    }

    if (val->parsed()) {
      Instance inst = load_instance(inst_path);
      if (service) inst.service = *service;
      json report;
      const auto issues = validate_instance(inst);
      report["instance_issues"] = issues;
      // informational: some constructions are deliberately not reachable from their root
      if (inst.root) report["rooted_reachable"] = inst.rooted_reachable();
      bool ok = issues.empty();
      if (!walk_path.empty()) {
        const auto w = parse_guard(walk_path, [&] {
          auto j = read_json_file(walk_path);
          return walk_from_json(j.contains("walk") ? j.at("walk") : j);
        });
        json viol = json::array();
        for (const auto& v : validate_walk(w, inst.graph))
          viol.push_back({{"action", v.action_index}, {"time", v.time}, {"kind", v.kind}});
        report["walk_violations"] = viol;
        ok = ok && viol.empty();
        if (viol.empty()) report["coverage"] = to_json(coverage(w, inst));
      }
      report["ok"] = ok;
      std::cout << report.dump(2) << "\n";
      return ok ? 0 : 2;
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
