// Command-line front end: verification runs, distance tables, the box-model
// search, game simulations and bound tables, with reproducible JSON/CSV
// reports.
//
// Exit codes: 0 = all checks pass, 1 = a mathematical check failed,
// 2 = input or usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ontic/game.hpp"
#include "ontic/independence.hpp"
#include "ontic/model_io.hpp"
#include "ontic/models.hpp"
#include "ontic/toymodel.hpp"
#include "ontic/version.hpp"

namespace {

using ontic::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string command;
  std::string model_path;
  std::uint64_t seed = 0;
  long long trials = 0;
  double tol = 0.0;
  std::string out_path;
  std::string format = "json";
};

Json config_echo(const RunConfig& c) {
  return Json{{"command", c.command}, {"model", c.model_path}, {"seed", c.seed},
              {"trials", c.trials},   {"tol", c.tol},          {"out", c.out_path},
              {"format", c.format}};
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

// Comment preamble so CSV reports carry the version and config echo too.
std::string csv_preamble(const RunConfig& c) {
  std::ostringstream s;
  s << "# ontic " << ontic::version << '\n';
  s << "# command=" << c.command << " model=" << c.model_path << " seed=" << c.seed
    << " trials=" << c.trials << " tol=" << fmt(c.tol) << '\n';
  return s.str();
}

void emit(const RunConfig& config, const std::string& text) {
  if (config.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(config.out_path);
  if (!out) throw ontic::error("cannot write output file '" + config.out_path + "'");
  out << text;
}

Json envelope(const RunConfig& config) {
  return Json{{"tool", "ontic"},
              {"version", ontic::version},
              {"config", config_echo(config)}};
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const RunConfig& config) {
  auto model = ontic::io::load_model(config.model_path);
  Json checks = Json::array();
  std::ostringstream csv;
  csv << "check,applicable,pass,detail\n";
  bool all_pass = true;

  auto record = [&](const std::string& name, bool applicable, bool pass, bool gating,
                    const std::string& detail, Json data) {
    if (gating && applicable) all_pass = all_pass && pass;
    Json j{{"name", name},
           {"applicable", applicable},
           {"pass", pass},
           {"gating", gating},
           {"data", std::move(data)}};
    if (!detail.empty()) j["detail"] = detail;
    checks.push_back(std::move(j));
    csv << name << ',' << (applicable ? "yes" : "no") << ',' << (pass ? "pass" : "fail")
        << ',' << detail << '\n';
  };

  record("validity", true, true, true, "construction invariants hold", Json::object());

  if (model.quantum_target) {
    auto r = ontic::quantum_consistency(model, config.tol);
    record("quantum_consistency", true, r.pass, true,
           "max deviation " + fmt(r.max_deviation), ontic::io::to_json(r));
  } else {
    record("quantum_consistency", false, true, true, "no quantum target", Json::object());
  }

  auto puc = ontic::puc_check(model.grid, config.tol);
  record("puc_check", true, puc.holds, true,
         puc.holds ? "worst residual " + fmt(puc.worst_residual)
                   : "violated at atom " + puc.worst_atom_label + " with residual " +
                         fmt(puc.worst_residual),
         ontic::io::to_json(puc));

  bool product_labeled = true;
  for (const auto& label : model.space()->labels())
    product_labeled = product_labeled && ontic::parse_product_label(label).has_value();
  if (product_labeled) {
    auto nca = ontic::nca_check(model.grid, config.tol);
    record("nca_check", true, nca.holds, false, "informational",
           ontic::io::to_json(nca));
  } else {
    record("nca_check", false, true, false, "atoms are not product-labeled",
           Json::object());
  }

  const bool square_2x2 = model.grid.nx() == 2 && model.grid.ny() == 2;
  for (const auto& e : model.experiments) {
    auto table = ontic::preclusion_table(model.grid, e);
    record("preclusion[" + e.name() + "]", true, true, false,
           "epsilon " + fmt(table.epsilon), ontic::io::to_json(table));
    if (!square_2x2) continue;
    auto t1 = ontic::theorem1_check(model.grid, e);
    record("theorem1[" + e.name() + "]", t1.applicable, t1.holds, true, t1.note,
           ontic::io::to_json(t1));
    auto t2 = ontic::theorem2_check(model.grid, e);
    record("theorem2[" + e.name() + "]", t2.applicable, t2.holds, true, t2.note,
           ontic::io::to_json(t2));
  }

  if (config.format == "csv") {
    emit(config, csv_preamble(config) + csv.str());
  } else {
    Json j = envelope(config);
    j["checks"] = std::move(checks);
    j["pass"] = all_pass;
    emit(config, j.dump(2) + "\n");
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// distances

int cmd_distances(const RunConfig& config) {
  auto model = ontic::io::load_model(config.model_path);
  const auto& grid = model.grid;
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "x1,y1,x2,y2,delta,omega,hellinger,fidelity,l2_bound,chain_holds\n";
  const std::size_t cells = grid.nx() * grid.ny();
  for (std::size_t i = 0; i < cells; ++i)
    for (std::size_t j = i + 1; j < cells; ++j) {
      const auto& p = grid.at(i / grid.ny(), i % grid.ny());
      const auto& q = grid.at(j / grid.ny(), j % grid.ny());
      auto chain = ontic::inequality_chain(p, q);
      double h = ontic::hellinger(p, q);
      Json row = ontic::io::to_json(chain);
      row["x1"] = grid.x_label(i / grid.ny());
      row["y1"] = grid.y_label(i % grid.ny());
      row["x2"] = grid.x_label(j / grid.ny());
      row["y2"] = grid.y_label(j % grid.ny());
      rows.push_back(std::move(row));
      csv << grid.x_label(i / grid.ny()) << ',' << grid.y_label(i % grid.ny()) << ','
          << grid.x_label(j / grid.ny()) << ',' << grid.y_label(j % grid.ny()) << ','
          << fmt(chain.delta) << ',' << fmt(chain.omega) << ',' << fmt(h) << ','
          << fmt(chain.fidelity) << ',' << fmt(chain.l2_bound) << ','
          << (chain.holds ? "yes" : "no") << '\n';
    }
  if (config.format == "csv") {
    emit(config, csv_preamble(config) + csv.str());
  } else {
    Json j = envelope(config);
    j["pairs"] = std::move(rows);
    emit(config, j.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// puc-check

int cmd_puc_check(const RunConfig& config) {
  auto model = ontic::io::load_model(config.model_path);
  auto r = ontic::puc_check(model.grid, config.tol);
  if (config.format == "csv") {
    std::ostringstream csv;
    csv << "holds,worst_residual,worst_atom,tol\n"
        << (r.holds ? "yes" : "no") << ',' << fmt(r.worst_residual) << ','
        << r.worst_atom_label << ',' << fmt(r.tol) << '\n';
    emit(config, csv_preamble(config) + csv.str());
  } else {
    Json j = envelope(config);
    j["puc"] = ontic::io::to_json(r);
    emit(config, j.dump(2) + "\n");
  }
  return r.holds ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// theorem-check

int cmd_theorem_check(const RunConfig& config) {
  auto model = ontic::io::load_model(config.model_path);
  if (model.grid.nx() != 2 || model.grid.ny() != 2)
    throw ontic::error("theorem-check: the grid must be 2x2");
  if (model.experiments.empty())
    throw ontic::error("theorem-check: the model declares no experiments");
  Json reports = Json::array();
  std::ostringstream csv;
  csv << "experiment,report,applicable,holds,slack,m,epsilon\n";
  bool all_hold = true;
  for (const auto& e : model.experiments) {
    for (const auto& r : {ontic::theorem1_check(model.grid, e),
                          ontic::theorem2_check(model.grid, e)}) {
      if (r.applicable) all_hold = all_hold && r.holds;
      Json j = ontic::io::to_json(r);
      j["experiment"] = e.name();
      reports.push_back(std::move(j));
      csv << e.name() << ',' << r.name << ',' << (r.applicable ? "yes" : "no") << ','
          << (r.holds ? "yes" : "no") << ',' << fmt(r.slack) << ',' << r.m << ','
          << fmt(r.epsilon) << '\n';
    }
  }
  if (config.format == "csv") {
    emit(config, csv_preamble(config) + csv.str());
  } else {
    Json j = envelope(config);
    j["reports"] = std::move(reports);
    j["pass"] = all_hold;
    emit(config, j.dump(2) + "\n");
  }
  return all_hold ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// toy-search

int cmd_toy_search(const RunConfig& config, const ontic::toy::ToySearchOptions& options,
                   const std::string& out_dir) {
  auto result = ontic::toy::search_toy_models(options);

  Json summary = envelope(config);
  summary["options"] = Json{{"require_nca_violation", options.require_nca_violation},
                            {"require_critical_overlap", options.require_critical_overlap},
                            {"allow_rational_weights", options.allow_rational_weights}};
  summary["per_prep_candidates"] = result.per_prep_candidates;
  summary["count"] = result.models.size();

  Json models = Json::array();
  for (std::size_t i = 0; i < result.models.size(); ++i) {
    const auto& cand = result.models[i];
    Json jm{{"index", i},
            {"uniform", cand.uniform},
            {"supports",
             Json{{"0,0", cand.support[0]},
                  {"0,+", cand.support[1]},
                  {"+,0", cand.support[2]},
                  {"+,+", cand.support[3]}}}};
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      std::ostringstream base;
      base << "toy_model_" << std::setw(3) << std::setfill('0') << i;
      auto model_path = std::filesystem::path(out_dir) / (base.str() + ".json");
      auto render_path = std::filesystem::path(out_dir) / (base.str() + ".txt");
      ontic::io::save_model(ontic::toy::to_model(cand), model_path.string());
      std::ofstream render_out(render_path);
      render_out << ontic::toy::render(cand);
      jm["model_file"] = model_path.string();
      jm["render_file"] = render_path.string();
    }
    models.push_back(std::move(jm));
  }
  summary["models"] = std::move(models);
  emit(config, summary.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// game-sim

int cmd_game(const RunConfig& config, int n, double alpha, double leak) {
  auto model = ontic::game::one_slack_model(n, alpha, leak);
  auto result = ontic::game::simulate_game(model, config.trials, config.seed);
  auto perfect = ontic::game::perfect_case_bounds(n);
  auto eps_bounds = ontic::game::epsilon_case_bounds(n, model.pairwise_epsilon);

  Json j = envelope(config);
  j["model"] = Json{{"family", model.family},
                    {"n", n},
                    {"alpha", alpha},
                    {"leak", leak},
                    {"pairwise_epsilon", model.pairwise_epsilon}};
  j["result"] = Json{{"trials", result.trials},
                     {"referee_correct", result.referee_correct},
                     {"p_correct", result.p_correct},
                     {"standard_error", result.standard_error},
                     {"per_subsystem_correct", result.per_subsystem_correct},
                     {"trials_with_multiple_incorrect", result.trials_with_multiple_incorrect}};
  j["analytic_p_correct"] = 1.0 - (1.0 - alpha) / (2.0 * n);
  j["bounds"] = Json{{"expected_correct_lb", perfect.expected_correct_lb},
                     {"p_correct_lb", perfect.p_correct_lb},
                     {"epsilon_p_multiple_incorrect_ub", eps_bounds.p_multiple_incorrect_ub},
                     {"epsilon_expected_correct_lb", eps_bounds.expected_correct_lb},
                     {"epsilon_p_correct_lb", eps_bounds.p_correct_lb}};
  if (model.pairwise_epsilon > 0.0 && model.pairwise_epsilon < 0.25) {
    auto ext = ontic::game::extendibility_bound(model.pairwise_epsilon);
    j["extendibility"] = Json{{"n_epsilon", ext.n_epsilon},
                              {"exact_bound", ext.exact_bound},
                              {"leading_order_bound", ext.leading_order_bound}};
  }

  if (config.format == "csv") {
    std::ostringstream csv;
    csv << "trials,n,alpha,leak,seed,p_correct,standard_error,"
           "trials_with_multiple_incorrect,analytic_p_correct";
    for (int i = 0; i < n; ++i) csv << ",correct_" << i;
    csv << '\n';
    csv << result.trials << ',' << n << ',' << fmt(alpha) << ',' << fmt(leak) << ','
        << config.seed << ',' << fmt(result.p_correct) << ','
        << fmt(result.standard_error) << ',' << result.trials_with_multiple_incorrect
        << ',' << fmt(1.0 - (1.0 - alpha) / (2.0 * n));
    for (long long c : result.per_subsystem_correct) csv << ',' << c;
    csv << '\n';
    emit(config, csv_preamble(config) + csv.str());
  } else {
    emit(config, j.dump(2) + "\n");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bounds

int cmd_bounds(const RunConfig& config, const std::vector<double>& eps_list) {
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "epsilon,n_epsilon,exact_bound,leading_order_bound,in_domain\n";
  for (double eps : eps_list) {
    if (eps > 0.0 && eps < 0.25) {
      auto b = ontic::game::extendibility_bound(eps);
      rows.push_back(Json{{"epsilon", eps},
                          {"n_epsilon", b.n_epsilon},
                          {"exact_bound", b.exact_bound},
                          {"leading_order_bound", b.leading_order_bound},
                          {"in_domain", true}});
      csv << fmt(eps) << ',' << b.n_epsilon << ',' << fmt(b.exact_bound) << ','
          << fmt(b.leading_order_bound) << ",yes\n";
    } else {
      rows.push_back(Json{{"epsilon", eps}, {"in_domain", false}});
      csv << fmt(eps) << ",,,," << "no\n";
    }
  }
  if (config.format == "csv") {
    emit(config, csv_preamble(config) + csv.str());
  } else {
    Json j = envelope(config);
    j["rows"] = std::move(rows);
    emit(config, j.dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification toolkit for ontological models of quantum preparations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ontic ") + ontic::version);

  RunConfig config;
  config.tol = 1e-9;

  auto add_common = [&](CLI::App* sub, bool with_model) {
    if (with_model)
      sub->add_option("--model", config.model_path, "model file (JSON)")
          ->required()
          ->check(CLI::ExistingFile);
    sub->add_option("--tol", config.tol, "check tolerance");
    sub->add_option("--out", config.out_path, "write the report to this path");
    sub->add_option("--format", config.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* verify = app.add_subcommand("verify", "run all applicable checks on a model file");
  add_common(verify, true);

  auto* distances =
      app.add_subcommand("distances", "distance table over the model's preparations");
  add_common(distances, true);

  auto* puc = app.add_subcommand("puc-check", "preparation uninformativeness check");
  add_common(puc, true);

  auto* theorems =
      app.add_subcommand("theorem-check", "preclusion distinctness bounds on a model file");
  add_common(theorems, true);

  ontic::toy::ToySearchOptions toy_options;
  std::string toy_out_dir;
  auto* toy = app.add_subcommand("toy-search", "reconstruct the box models by search");
  add_common(toy, false);
  toy->add_flag("--require-nca-violation", toy_options.require_nca_violation,
                "keep only models whose P00 overlaps P0+ and P+0");
  toy->add_flag("--require-critical-overlap", toy_options.require_critical_overlap,
                "demand overlap(P00,P++) > 0 (provably unsatisfiable)");
  toy->add_flag("--allow-rational-weights", toy_options.allow_rational_weights,
                "fall back to non-uniform rational weights when needed");
  toy->add_option("--out-dir", toy_out_dir, "write model and render files here");

  int game_n = 5;
  double game_alpha = 0.0;
  double game_leak = 0.0;
  auto* game = app.add_subcommand("game-sim", "simulate the preparation guessing game");
  add_common(game, false);
  game->add_option("--n", game_n, "number of subsystems")->check(CLI::Range(2, 1000000));
  game->add_option("--alpha", game_alpha, "determinism weight in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  game->add_option("--leak", game_leak, "flip-leak weight in [0,1)")
      ->check(CLI::Range(0.0, 0.999999));
  game->add_option("--trials", config.trials, "number of trials")
      ->required()
      ->check(CLI::PositiveNumber);
  game->add_option("--seed", config.seed, "random seed");

  std::vector<double> eps_list;
  auto* bounds = app.add_subcommand("bounds", "extendibility bound table");
  add_common(bounds, false);
  bounds->add_option("--eps", eps_list, "preclusion levels")->required()->expected(-1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto* sub = app.get_subcommands().front();
    config.command = sub->get_name();
    if (sub == verify) return cmd_verify(config);
    if (sub == distances) return cmd_distances(config);
    if (sub == puc) return cmd_puc_check(config);
    if (sub == theorems) return cmd_theorem_check(config);
    if (sub == toy) return cmd_toy_search(config, toy_options, toy_out_dir);
    if (sub == game) return cmd_game(config, game_n, game_alpha, game_leak);
    if (sub == bounds) return cmd_bounds(config, eps_list);
    return kExitUsage;
  } catch (const ontic::error& e) {
    std::cerr << "ontic: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "ontic: " << e.what() << '\n';
    return kExitUsage;
  }
}
