#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ontic/independence.hpp"
#include "ontic/measures.hpp"
#include "ontic/models.hpp"

namespace ontic::game {

/// Ontic state of an N-subsystem model, as a label per subsystem:
/// '0' or '+' when the state pins the preparation down, '?' when it does not.
struct GameAtom {
  std::vector<char> labels;
};

/// N-subsystem ontic model with a generative sampling interface and the
/// per-subsystem mixture densities mu_bar^alpha_x needed by the guessing
/// strategy. pairwise_epsilon is the preclusion level achieved by a 4-outcome
/// experiment on every pair; pair_overlap(a,b) is the exact classical overlap
/// of the (00,++) pair-class mixtures.
struct GameModel {
  int n = 0;
  double pairwise_epsilon = 0.0;
  std::function<GameAtom(const std::vector<char>&, std::mt19937_64&)> sampler;
  std::function<double(int, char, const GameAtom&)> marginal_density;
  std::function<double(int, int)> pair_overlap;
  std::string family;
};

/// The density-comparison strategy: guess '0' when
/// mu_bar^alpha_0 >= mu_bar^alpha_+ (ties guess '0'), else '+'.
inline char strategy_guess(const GameModel& model, const GameAtom& atom, int subsystem) {
  if (subsystem < 0 || subsystem >= model.n)
    throw error("strategy_guess: subsystem index out of range");
  double mu0 = model.marginal_density(subsystem, '0', atom);
  double mup = model.marginal_density(subsystem, '+', atom);
  return mu0 >= mup ? '0' : '+';
}

namespace detail {

inline void validate_one_slack_atom(int n, const GameAtom& atom) {
  if (static_cast<int>(atom.labels.size()) != n)
    throw error("one_slack: atom has wrong subsystem count");
  int slack = 0;
  for (char c : atom.labels) {
    if (c == '?')
      ++slack;
    else if (c != '0' && c != '+')
      throw error("one_slack: atom label must be '0', '+' or '?'");
  }
  if (slack > 1) throw error("one_slack: atom outside model support (two slack positions)");
}

inline char flip(char c) { return c == '0' ? '+' : '0'; }

}  // namespace detail

/// Enumerated pair subsystem view of a one-slack model: the four class
/// mixtures P_bar^{ab}_xy as a 2x2 grid over an explicit atom space, plus the
/// deterministic 4-outcome experiment whose outcome k_xy is precluded by the
/// (x,y) class. Used for exact overlap and preclusion computations.
struct PairSystem {
  OnticSpacePtr space;
  PreparationGrid grid;
  Experiment experiment;
};

inline PairSystem one_slack_pair_system(int n, double alpha, double leak, int a, int b) {
  if (n < 2) throw error("one_slack_pair_system: need at least two subsystems");
  if (n > 16) throw error("one_slack_pair_system: enumeration supported up to n = 16");
  if (a == b || a < 0 || b < 0 || a >= n || b >= n)
    throw error("one_slack_pair_system: invalid pair");

  auto atom_label = [](const std::vector<char>& labels) {
    return std::string(labels.begin(), labels.end());
  };
  // Atom order: all fully labeled states, then slack atoms by position.
  std::map<std::string, std::size_t> index;
  std::vector<std::string> atoms;
  std::vector<char> labels(n, '0');
  const std::uint64_t preps = 1ull << n;
  for (std::uint64_t bits = 0; bits < preps; ++bits) {
    for (int i = 0; i < n; ++i) labels[i] = (bits >> i) & 1 ? '+' : '0';
    atoms.push_back(atom_label(labels));
  }
  for (int pos = 0; pos < n; ++pos)
    for (std::uint64_t bits = 0; bits < preps; ++bits) {
      if ((bits >> pos) & 1) continue;  // slack position carries no bit
      for (int i = 0; i < n; ++i) labels[i] = (bits >> i) & 1 ? '+' : '0';
      labels[pos] = '?';
      atoms.push_back(atom_label(labels));
    }
  for (std::size_t i = 0; i < atoms.size(); ++i) index[atoms[i]] = i;
  auto space = make_space(atoms);

  // Class mixtures: average the sampling distribution over the 2^(n-2)
  // preparations of each (x_a, x_b) class.
  std::array<std::vector<double>, 4> masses;
  for (auto& m : masses) m.assign(space->size(), 0.0);
  auto class_of = [&](const std::vector<char>& prep) {
    return (prep[a] == '+' ? 2 : 0) + (prep[b] == '+' ? 1 : 0);
  };
  const double class_weight = 1.0 / static_cast<double>(preps / 4);
  std::vector<char> prep(n, '0'), atom(n, '0');
  for (std::uint64_t bits = 0; bits < preps; ++bits) {
    for (int i = 0; i < n; ++i) prep[i] = (bits >> i) & 1 ? '+' : '0';
    auto& m = masses[class_of(prep)];
    if (leak > 0.0) {
      for (int i = 0; i < n; ++i) atom[i] = detail::flip(prep[i]);
      m[index.at(atom_label(atom))] += class_weight * leak;
    }
    if (alpha > 0.0) m[index.at(atom_label(prep))] += class_weight * (1.0 - leak) * alpha;
    const double slack_mass = class_weight * (1.0 - leak) * (1.0 - alpha) / n;
    if (slack_mass > 0.0)
      for (int pos = 0; pos < n; ++pos) {
        atom = prep;
        atom[pos] = '?';
        m[index.at(atom_label(atom))] += slack_mass;
      }
  }
  std::vector<Distribution> dists;
  for (auto& m : masses) dists.push_back(Distribution::from_masses(space, m));
  PreparationGrid grid({"0", "+"}, {"0", "+"}, std::move(dists));

  // Outcome k_xy is the one the (x,y) class is meant to preclude. Fully
  // labeled atoms point at the complement of their own pair labels; an atom
  // with its slack at a or b leaves that side's outcome label fixed at '0'.
  auto outcome_id = [](char x, char y) { return (x == '+' ? 2 : 0) + (y == '+' ? 1 : 0); };
  std::vector<std::size_t> outcome_of_atom(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) {
    const std::string& l = atoms[i];
    char la = l[a], lb = l[b];
    std::size_t k;
    if (la == '?')
      k = outcome_id('0', detail::flip(lb));
    else if (lb == '?')
      k = outcome_id(detail::flip(la), '0');
    else
      k = outcome_id(detail::flip(la), detail::flip(lb));
    outcome_of_atom[i] = k;
  }
  Experiment experiment = Experiment::deterministic(
      "pair_preclusion", {"k00", "k0+", "k+0", "k++"}, outcome_of_atom);
  return PairSystem{space, std::move(grid), std::move(experiment)};
}

/// Built-in N-system family in which the ontic state determines every
/// subsystem's preparation except at most one. A preparation yields its fully
/// labeled atom with probability alpha, and otherwise blanks one uniformly
/// chosen position. With leak > 0, the fully labeled atom with all labels
/// flipped is produced with probability leak, giving a strictly positive
/// pairwise preclusion level.
///
/// Sampler draw order: one uniform variate for the branch
/// (flip / exact / slack), then, only on the slack branch, one uniform
/// integer for the blanked position.
inline GameModel one_slack_model(int n, double alpha, double leak = 0.0) {
  if (n < 2) throw error("one_slack_model: need at least two subsystems");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw error("one_slack_model: alpha must lie in [0,1]");
  if (!(leak >= 0.0 && leak < 1.0)) throw error("one_slack_model: leak must lie in [0,1)");

  GameModel model;
  model.n = n;
  model.family = "one_slack";

  model.sampler = [n, alpha, leak](const std::vector<char>& prep, std::mt19937_64& rng) {
    if (static_cast<int>(prep.size()) != n)
      throw error("one_slack sampler: preparation size mismatch");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    GameAtom atom{prep};
    if (u < leak) {
      for (auto& c : atom.labels) c = detail::flip(c);
      return atom;
    }
    if (u < leak + (1.0 - leak) * alpha) return atom;
    std::uniform_int_distribution<int> position(0, n - 1);
    atom.labels[static_cast<std::size_t>(position(rng))] = '?';
    return atom;
  };

  model.marginal_density = [n, alpha, leak](int subsystem, char x, const GameAtom& atom) {
    if (subsystem < 0 || subsystem >= n)
      throw error("one_slack density: subsystem index out of range");
    if (x != '0' && x != '+') throw error("one_slack density: label must be '0' or '+'");
    detail::validate_one_slack_atom(n, atom);
    const char l = atom.labels[static_cast<std::size_t>(subsystem)];
    if (l == '?') return 1.0;  // the slack subsystem is uninformative
    bool has_slack = false;
    for (char c : atom.labels) has_slack = has_slack || c == '?';
    if (has_slack) {
      if ((1.0 - alpha) * (1.0 - leak) == 0.0)
        throw error("one_slack density: atom outside model support");
      return l == x ? 2.0 : 0.0;
    }
    const double total = alpha * (1.0 - leak) + leak;
    if (total == 0.0) throw error("one_slack density: atom outside model support");
    return 2.0 * (l == x ? alpha * (1.0 - leak) : leak) / total;
  };

  if (leak == 0.0) {
    // Each pair's (00,++) and (0+,+0) class mixtures have disjoint supports:
    // any atom determines at least one side of the pair.
    model.pairwise_epsilon = 0.0;
    model.pair_overlap = [](int, int) { return 0.0; };
  } else {
    auto pair = one_slack_pair_system(n, alpha, leak, 0, 1);
    model.pairwise_epsilon = preclusion_table(pair.grid, pair.experiment).epsilon;
    const double omega = overlap(pair.grid.at("0", "0"), pair.grid.at("+", "+"));
    // The family is symmetric under subsystem permutation.
    model.pair_overlap = [omega](int, int) { return omega; };
  }
  return model;
}

struct GameResult {
  long long trials = 0;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<long long> per_subsystem_correct;
  long long referee_correct = 0;
  double p_correct = 0.0;
  double standard_error = 0.0;
  long long trials_with_multiple_incorrect = 0;
};

/// Plays the guessing game: per trial, draw a uniform preparation vector
/// (one fair bit per subsystem, in order), sample an atom, let the referee
/// pick a subsystem uniformly, and score the strategy's guess. All N guesses
/// are evaluated to track multiple-error trials.
inline GameResult simulate_game(const GameModel& model, long long trials, std::uint64_t seed) {
  if (trials < 1) throw error("simulate_game: need at least one trial");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> bit(0, 1);
  std::uniform_int_distribution<int> referee(0, model.n - 1);

  GameResult result;
  result.trials = trials;
  result.n = model.n;
  result.seed = seed;
  result.per_subsystem_correct.assign(static_cast<std::size_t>(model.n), 0);

  std::vector<char> prep(static_cast<std::size_t>(model.n), '0');
  for (long long t = 0; t < trials; ++t) {
    for (auto& c : prep) c = bit(rng) ? '+' : '0';
    GameAtom atom = model.sampler(prep, rng);
    const int picked = referee(rng);
    int incorrect = 0;
    for (int i = 0; i < model.n; ++i) {
      const bool correct = strategy_guess(model, atom, i) == prep[static_cast<std::size_t>(i)];
      if (correct)
        ++result.per_subsystem_correct[static_cast<std::size_t>(i)];
      else
        ++incorrect;
      if (i == picked && correct) ++result.referee_correct;
    }
    if (incorrect > 1) ++result.trials_with_multiple_incorrect;
  }
  result.p_correct =
      static_cast<double>(result.referee_correct) / static_cast<double>(trials);
  result.standard_error =
      std::sqrt(result.p_correct * (1.0 - result.p_correct) / static_cast<double>(trials));
  return result;
}

struct PairIncorrectReport {
  long long trials = 0;
  int subsystem_a = 0;
  int subsystem_b = 0;
  long long both_incorrect = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double omega = 0.0;        // overlap of the pair's 00 and ++ class mixtures
  double epsilon = 0.0;      // pairwise preclusion level
  double omega_bound = 0.0;  // 2 sqrt(epsilon)
  bool estimate_within_omega = false;
  bool omega_within_bound = false;
  bool holds = false;
};

/// Estimates the probability that the strategy guesses both members of a pair
/// incorrectly and checks the chain estimate <= omega + 3 SE, omega <= 2
/// sqrt(epsilon).
inline PairIncorrectReport pair_incorrect_check(const GameModel& model, int a, int b,
                                                long long trials, std::uint64_t seed) {
  if (trials < 1) throw error("pair_incorrect_check: need at least one trial");
  if (a == b || a < 0 || b < 0 || a >= model.n || b >= model.n)
    throw error("pair_incorrect_check: invalid pair");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> bit(0, 1);

  PairIncorrectReport report;
  report.trials = trials;
  report.subsystem_a = a;
  report.subsystem_b = b;

  std::vector<char> prep(static_cast<std::size_t>(model.n), '0');
  for (long long t = 0; t < trials; ++t) {
    for (auto& c : prep) c = bit(rng) ? '+' : '0';
    GameAtom atom = model.sampler(prep, rng);
    const bool wrong_a = strategy_guess(model, atom, a) != prep[static_cast<std::size_t>(a)];
    const bool wrong_b = strategy_guess(model, atom, b) != prep[static_cast<std::size_t>(b)];
    if (wrong_a && wrong_b) ++report.both_incorrect;
  }
  report.estimate =
      static_cast<double>(report.both_incorrect) / static_cast<double>(trials);
  report.standard_error =
      std::sqrt(report.estimate * (1.0 - report.estimate) / static_cast<double>(trials));
  report.omega = model.pair_overlap(a, b);
  report.epsilon = model.pairwise_epsilon;
  report.omega_bound = 2.0 * std::sqrt(report.epsilon);
  report.estimate_within_omega =
      report.estimate <= report.omega + 3.0 * report.standard_error + tolerance::identity;
  report.omega_within_bound = report.omega <= report.omega_bound + tolerance::identity;
  report.holds = report.estimate_within_omega && report.omega_within_bound;
  return report;
}

struct PerfectCaseBounds {
  double expected_correct_lb = 0.0;  // N - 1/2
  double p_correct_lb = 0.0;         // 1 - 1/(2N)
};

inline PerfectCaseBounds perfect_case_bounds(int n) {
  if (n < 1) throw error("perfect_case_bounds: need at least one subsystem");
  return {static_cast<double>(n) - 0.5, 1.0 - 1.0 / (2.0 * static_cast<double>(n))};
}

struct EpsilonCaseBounds {
  double p_multiple_incorrect_ub = 0.0;  // N(N-1) sqrt(eps)
  double expected_correct_lb = 0.0;      // (N-1)(1 - N(N-1) sqrt(eps))
  double p_correct_lb = 0.0;             // 1 - 1/N - (N-1)^2 sqrt(eps)
};

inline EpsilonCaseBounds epsilon_case_bounds(int n, double epsilon) {
  if (n < 2) throw error("epsilon_case_bounds: need at least two subsystems");
  if (!(epsilon >= 0.0)) throw error("epsilon_case_bounds: epsilon must be nonnegative");
  const double nn = static_cast<double>(n);
  const double root = std::sqrt(epsilon);
  EpsilonCaseBounds b;
  b.p_multiple_incorrect_ub = nn * (nn - 1.0) * root;
  b.expected_correct_lb = (nn - 1.0) * (1.0 - nn * (nn - 1.0) * root);
  b.p_correct_lb = 1.0 - 1.0 / nn - (nn - 1.0) * (nn - 1.0) * root;
  return b;
}

struct ExtendibilityBound {
  long long n_epsilon = 0;
  double exact_bound = 0.0;
  double leading_order_bound = 0.0;
};

/// N_epsilon is the largest integer with 2 N^3 sqrt(eps) <= 1 (integer scan,
/// seeded near the cube root). The exact lower bound on the probability of a
/// correct guess is
///   1 - (2^{1/3} / (1 - 2^{1/3} eps^{1/6}) + 2^{-2/3}) eps^{1/6},
/// with leading order 1 - (2^{1/3} + 2^{-2/3}) eps^{1/6}. Defined for
/// 0 < eps < 1/4 (where the denominator stays positive).
inline ExtendibilityBound extendibility_bound(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 0.25))
    throw error("extendibility_bound: epsilon must lie in (0, 1/4)");
  const double root = std::sqrt(epsilon);
  auto fits = [root](long long n) {
    const double nn = static_cast<double>(n);
    return 2.0 * nn * nn * nn * root <= 1.0;
  };
  long long n = std::max<long long>(
      1, static_cast<long long>(std::cbrt(1.0 / (2.0 * root))) - 2);
  while (fits(n + 1)) ++n;
  while (n > 1 && !fits(n)) --n;
  if (!fits(n)) throw error("extendibility_bound: no integer satisfies the definition");

  const double sixth = std::pow(epsilon, 1.0 / 6.0);
  const double c_third = std::cbrt(2.0);
  const double c_minus = std::pow(2.0, -2.0 / 3.0);
  ExtendibilityBound b;
  b.n_epsilon = n;
  b.exact_bound = 1.0 - (c_third / (1.0 - c_third * sixth) + c_minus) * sixth;
  b.leading_order_bound = 1.0 - (c_third + c_minus) * sixth;
  return b;
}

}  // namespace ontic::game
