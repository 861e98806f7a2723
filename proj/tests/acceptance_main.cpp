// Acceptance suite: runs each release criterion at its stated tolerance and
// runtime limit and prints one pass/fail line per criterion. Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ontic/game.hpp"
#include "ontic/independence.hpp"
#include "ontic/measures.hpp"
#include "ontic/models.hpp"
#include "ontic/quantum.hpp"
#include "ontic/toymodel.hpp"

using namespace ontic;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Check {
  std::string name;
  double time_limit_s;
  std::function<Outcome()> run;
};

Distribution random_distribution(const OnticSpacePtr& space, std::mt19937_64& rng,
                                 double sparsity) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> dens(space->size(), 0.0);
  double total = 0.0;
  while (total == 0.0) {
    for (std::size_t i = 0; i < dens.size(); ++i) {
      dens[i] = unif(rng) < sparsity ? 0.0 : unif(rng);
      total += dens[i] * space->weight(i);
    }
  }
  for (auto& d : dens) d /= total;
  return Distribution(space, dens);
}

Experiment random_experiment(const OnticSpacePtr& space, std::size_t m,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::string> outcomes;
  for (std::size_t k = 0; k < m; ++k) outcomes.push_back("k" + std::to_string(k));
  std::vector<std::vector<double>> response(space->size(), std::vector<double>(m));
  for (auto& row : response) {
    double total = 0.0;
    for (auto& v : row) total += (v = unif(rng) + 1e-3);
    for (auto& v : row) v /= total;
  }
  return Experiment("rand", std::move(outcomes), std::move(response));
}

// Shared between criteria 2 and 7.
const toy::ToySearchResult& toy_search_result() {
  static const toy::ToySearchResult result =
      toy::search_toy_models({.require_nca_violation = true});
  return result;
}

// 1. Born table: exact zeros where preclusion is asserted, the four derived
//    quadruples to 1e-12.
Outcome criterion_born_table() {
  auto basis = pbr_basis();
  const struct {
    const char* x;
    const char* y;
    std::array<double, 4> expected;
  } rows[] = {
      {"0", "0", {0.0, 0.25, 0.25, 0.5}},
      {"0", "+", {0.25, 0.0, 0.5, 0.25}},
      {"+", "0", {0.25, 0.5, 0.0, 0.25}},
      {"+", "+", {0.5, 0.25, 0.25, 0.0}},
  };
  double worst = 0.0;
  for (const auto& row : rows) {
    auto born = born_row(product_prep(row.x, row.y), basis);
    for (std::size_t k = 0; k < 4; ++k) {
      if (row.expected[k] == 0.0 && born[k] != 0.0)
        return {false, "expected an exact zero entry"};
      worst = std::max(worst, std::abs(born[k] - row.expected[k]));
    }
  }
  std::ostringstream detail;
  detail << "max deviation " << worst;
  return {worst <= 1e-12, detail.str()};
}

// 2. Appendix reconstruction by constraint search, every claim verified.
Outcome criterion_toy_search() {
  const auto& result = toy_search_result();
  if (result.models.empty()) return {false, "search found no model"};
  std::size_t uniform_count = 0;
  for (const auto& cand : result.models) {
    if (!cand.uniform) continue;
    ++uniform_count;
    auto report = toy::verify_appendix_claims(cand);
    if (!report.all_pass) {
      for (const auto& claim : report.claims)
        if (!claim.pass) return {false, "claim failed: " + claim.name};
    }
    if (!(cand.support[0] & cand.support[1]) || !(cand.support[0] & cand.support[2]))
      return {false, "P00 does not overlap both P0+ and P+0"};
    auto grid = toy::to_grid(cand);
    if (total_variation(grid.at("0", "0"), grid.at("+", "+")) != 1.0 ||
        total_variation(grid.at("0", "+"), grid.at("+", "0")) != 1.0)
      return {false, "critical pair distance is not exactly 1"};
    auto puc = puc_check(grid, 0.0);
    if (puc.worst_residual != 0.0) return {false, "PUC residual is not exactly 0"};
  }
  if (uniform_count == 0) return {false, "no uniform-support model"};
  std::ostringstream detail;
  detail << uniform_count << " uniform-support models, all claims verified";
  return {true, detail.str()};
}

// 3. Epsilon-preclusion bound suite: 500 seeded PUC quadruples x random
//    experiments.
Outcome criterion_theorem2_suite() {
  std::mt19937_64 exp_rng(424242);
  double worst_slack = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto grid = generate_puc_quadruple(seed, 8);
    auto e = random_experiment(grid.space(), 2 + seed % 5, exp_rng);
    auto r = theorem2_check(grid, e);
    worst_slack = std::min(worst_slack, r.slack);
    if (!r.applicable || !r.holds) {
      std::ostringstream detail;
      detail << "seed " << seed << " slack " << r.slack;
      return {false, detail.str()};
    }
  }
  std::ostringstream detail;
  detail << "500 cases, worst slack " << worst_slack;
  return {worst_slack >= -1e-9, detail.str()};
}

// 4. PUC <=> posterior factorization over a 5x5 strictly positive prior grid.
Outcome criterion_factorization_suite() {
  const std::vector<double> priors{0.1, 0.3, 0.5, 0.7, 0.9};
  auto max_gap = [&](const PreparationGrid& grid) {
    double worst = 0.0;
    for (double px : priors)
      for (double qy : priors)
        for (std::size_t atom = 0; atom < grid.space()->size(); ++atom) {
          double mix = 0.0;
          for (std::size_t ix = 0; ix < 2; ++ix)
            for (std::size_t iy = 0; iy < 2; ++iy)
              mix += grid.at(ix, iy).density(atom);
          if (mix == 0.0) continue;
          auto r = posterior(grid, {px, 1.0 - px}, {qy, 1.0 - qy}, atom);
          worst = std::max(worst, r.factorization_gap);
        }
    return worst;
  };

  // 150 generated PUC grids and 50 constructed violators.
  double worst_puc_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    auto grid = generate_puc_quadruple(seed, 6);
    double gap = max_gap(grid);
    worst_puc_gap = std::max(worst_puc_gap, gap);
    if (gap > 1e-9) {
      std::ostringstream detail;
      detail << "PUC grid seed " << seed << " gap " << gap;
      return {false, detail.str()};
    }
  }
  std::mt19937_64 rng(515151);
  auto space = make_space(6);
  double best_violation = 0.0;
  for (int i = 0; i < 50; ++i) {
    std::vector<Distribution> dists;
    for (int d = 0; d < 4; ++d) dists.push_back(random_distribution(space, rng, 0.3));
    PreparationGrid grid({"0", "+"}, {"0", "+"}, std::move(dists));
    if (!puc_check(grid, 1e-10).holds)
      best_violation = std::max(best_violation, max_gap(grid));
  }
  std::ostringstream detail;
  detail << "200 grids; worst PUC gap " << worst_puc_gap << ", best violator gap "
         << best_violation;
  return {best_violation > 1e-6, detail.str()};
}

// 5. Game simulation against the analytic value 1 - 1/(2N).
Outcome criterion_game_simulation() {
  auto model = game::one_slack_model(5, 0.0);
  auto result = game::simulate_game(model, 100000, 20250301);
  const double analytic = 0.9;
  const double gap = std::abs(result.p_correct - analytic);
  std::ostringstream detail;
  detail << "estimate " << result.p_correct << " (3 SE = " << 3.0 * result.standard_error
         << ")";
  return {gap <= 3.0 * result.standard_error, detail.str()};
}

// 6. Extendibility bounds at eps = 1e-6 plus monotone convergence over 1e4
//    log-spaced values.
Outcome criterion_extendibility() {
  auto b = game::extendibility_bound(1e-6);
  if (b.n_epsilon != 7) return {false, "N_eps != 7 at eps = 1e-6"};
  const double root = std::sqrt(1e-6);
  if (!(2.0 * 343.0 * root <= 1.0 && 1.0 <= 2.0 * 512.0 * root))
    return {false, "N_eps definition inequalities violated at eps = 1e-6"};
  if (std::abs(b.exact_bound - 0.7929) > 1e-4)
    return {false, "exact bound differs from 0.7929"};
  const double coefficient = std::cbrt(2.0) + std::pow(2.0, -2.0 / 3.0);
  if (std::abs(coefficient - 1.88988) > 1e-5)
    return {false, "leading-order coefficient differs from 1.88988"};

  double prev = -std::numeric_limits<double>::infinity();
  const int samples = 10000;
  for (int i = samples - 1; i >= 0; --i) {
    // Log-spaced over [1e-30, 1e-2], largest first.
    double eps = std::pow(10.0, -30.0 + 28.0 * i / (samples - 1.0));
    auto bi = game::extendibility_bound(eps);
    double r = std::sqrt(eps);
    double n = static_cast<double>(bi.n_epsilon);
    if (2.0 * n * n * n * r > 1.0 || 2.0 * (n + 1.0) * (n + 1.0) * (n + 1.0) * r < 1.0)
      return {false, "definition inequalities violated in the sweep"};
    if (bi.exact_bound < prev) return {false, "exact bound is not monotone"};
    prev = bi.exact_bound;
  }
  // At the small end the bound is within 2 * 1.89e-5 of 1.
  if (!(prev > 1.0 - 4e-5 && prev < 1.0)) return {false, "exact bound does not approach 1"};
  std::ostringstream detail;
  detail << "N_eps = 7, exact " << b.exact_bound << ", coefficient " << coefficient;
  return {true, detail.str()};
}

// 7. Every positive-mass atom of every search result determines a side.
Outcome criterion_determination() {
  const auto& result = toy_search_result();
  if (result.models.empty()) return {false, "search found no model"};
  std::size_t atoms_checked = 0;
  for (const auto& cand : result.models) {
    auto records = determination_map(toy::to_grid(cand));
    for (const auto& rec : records) {
      if (!rec.has_support) continue;
      ++atoms_checked;
      if (!rec.a_determined && !rec.b_determined)
        return {false, "an atom determines neither preparation"};
    }
  }
  std::ostringstream detail;
  detail << atoms_checked << " support atoms across " << result.models.size()
         << " models";
  return {true, detail.str()};
}

// 8. Inequality chain on 1e4 random pairs over spaces of size 2..64.
Outcome criterion_inequality_chain() {
  std::mt19937_64 rng(616161);
  std::uniform_int_distribution<std::size_t> size_dist(2, 64);
  std::uniform_real_distribution<double> wgen(0.2, 3.0);
  for (int i = 0; i < 10000; ++i) {
    std::size_t n = size_dist(rng);
    std::vector<std::string> atoms;
    std::vector<double> weights;
    for (std::size_t a = 0; a < n; ++a) {
      atoms.push_back("a" + std::to_string(a));
      weights.push_back(wgen(rng));
    }
    auto space = make_space(std::move(atoms), std::move(weights));
    auto p = random_distribution(space, rng, 0.25);
    auto q = random_distribution(space, rng, 0.25);
    auto chain = inequality_chain(p, q);
    if (!chain.holds) {
      std::ostringstream detail;
      detail << "pair " << i << " violates the chain";
      return {false, detail.str()};
    }
  }
  return {true, "10000 pairs on spaces of size 2..64"};
}

}  // namespace

int main() {
  const std::vector<Check> checks = {
      {"born_table", 1.0, criterion_born_table},
      {"appendix_reconstruction", 60.0, criterion_toy_search},
      {"theorem2_property_suite", 60.0, criterion_theorem2_suite},
      {"puc_factorization_suite", 30.0, criterion_factorization_suite},
      {"game_simulation", 30.0, criterion_game_simulation},
      {"extendibility_bounds", 10.0, criterion_extendibility},
      {"determination_property", 1.0, criterion_determination},
      {"inequality_chain", 10.0, criterion_inequality_chain},
  };

  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& check = checks[i];
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = elapsed < check.time_limit_s;
    bool pass = outcome.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s  criterion %zu: %-26s  %s  [%.2fs < %.0fs]\n",
                pass ? "PASS" : "FAIL", i + 1, check.name.c_str(),
                outcome.detail.c_str(), elapsed, check.time_limit_s);
  }
  if (failed) std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
