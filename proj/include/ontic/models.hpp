#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ontic/measures.hpp"
#include "ontic/quantum.hpp"

namespace ontic {

/// Experiment with a finite outcome set: response[atom][k] is the probability
/// of outcome k when the ontic state is that atom. Per-atom responses must sum
/// to one.
class Experiment {
 public:
  Experiment(std::string name, std::vector<std::string> outcomes,
             std::vector<std::vector<double>> response)
      : name_(std::move(name)), outcomes_(std::move(outcomes)), response_(std::move(response)) {
    if (outcomes_.empty()) throw error("Experiment: at least one outcome required");
    for (const auto& row : response_) {
      if (row.size() != outcomes_.size())
        throw error("Experiment '" + name_ + "': response row size must equal outcome count");
      double total = 0.0;
      for (double p : row) {
        if (!(p >= 0.0 && p <= 1.0))
          throw error("Experiment '" + name_ + "': response probabilities must lie in [0,1]");
        total += p;
      }
      if (std::abs(total - 1.0) > tolerance::normalization)
        throw error("Experiment '" + name_ + "': per-atom responses must sum to 1");
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& outcomes() const { return outcomes_; }
  std::size_t outcome_count() const { return outcomes_.size(); }
  std::size_t atom_count() const { return response_.size(); }
  double response(std::size_t atom, std::size_t k) const { return response_.at(atom).at(k); }
  const std::vector<std::vector<double>>& response_table() const { return response_; }

  std::size_t outcome_index(std::string_view label) const {
    for (std::size_t k = 0; k < outcomes_.size(); ++k)
      if (outcomes_[k] == label) return k;
    throw error("Experiment '" + name_ + "': unknown outcome '" + std::string(label) + "'");
  }

  /// Deterministic experiment from an outcome index per atom.
  static Experiment deterministic(std::string name, std::vector<std::string> outcomes,
                                  const std::vector<std::size_t>& outcome_of_atom) {
    std::vector<std::vector<double>> response(outcome_of_atom.size(),
                                              std::vector<double>(outcomes.size(), 0.0));
    for (std::size_t a = 0; a < outcome_of_atom.size(); ++a)
      response[a].at(outcome_of_atom[a]) = 1.0;
    return Experiment(std::move(name), std::move(outcomes), std::move(response));
  }

 private:
  std::string name_;
  std::vector<std::string> outcomes_;
  std::vector<std::vector<double>> response_;
};

/// Family of preparation distributions indexed by a pair of labels
/// (x for the first system, y for the second), all on one ontic space.
/// Distributions are stored x-major.
class PreparationGrid {
 public:
  PreparationGrid(std::vector<std::string> x_labels, std::vector<std::string> y_labels,
                  std::vector<Distribution> dists)
      : x_labels_(std::move(x_labels)), y_labels_(std::move(y_labels)), dists_(std::move(dists)) {
    if (x_labels_.empty() || y_labels_.empty())
      throw error("PreparationGrid: empty label set");
    if (dists_.size() != x_labels_.size() * y_labels_.size())
      throw error("PreparationGrid: need one distribution per (x,y) pair");
    for (const auto& d : dists_)
      if (!same_space(d.space(), dists_.front().space()))
        throw error("PreparationGrid: all distributions must share one ontic space");
  }

  const OnticSpacePtr& space() const { return dists_.front().space(); }
  std::size_t nx() const { return x_labels_.size(); }
  std::size_t ny() const { return y_labels_.size(); }
  const std::vector<std::string>& x_labels() const { return x_labels_; }
  const std::vector<std::string>& y_labels() const { return y_labels_; }
  const std::string& x_label(std::size_t i) const { return x_labels_.at(i); }
  const std::string& y_label(std::size_t j) const { return y_labels_.at(j); }

  std::size_t x_index(std::string_view x) const { return index_in(x_labels_, x, "x"); }
  std::size_t y_index(std::string_view y) const { return index_in(y_labels_, y, "y"); }

  const Distribution& at(std::size_t ix, std::size_t iy) const {
    return dists_.at(ix * ny() + iy);
  }
  const Distribution& at(std::string_view x, std::string_view y) const {
    return at(x_index(x), y_index(y));
  }
  const std::vector<Distribution>& distributions() const { return dists_; }

 private:
  static std::size_t index_in(const std::vector<std::string>& labels, std::string_view v,
                              const char* side) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == v) return i;
    throw error(std::string("PreparationGrid: unknown ") + side + " label '" +
                std::string(v) + "'");
  }

  std::vector<std::string> x_labels_;
  std::vector<std::string> y_labels_;
  std::vector<Distribution> dists_;
};

/// Quantum statistics a model is meant to reproduce: one preparation ket per
/// grid cell (x-major, aligned with the grid) and a measurement basis whose
/// outcomes correspond, in order, to an experiment's outcomes.
struct QuantumTarget {
  std::vector<Ket> preps;
  MeasurementBasis basis;
};

struct OntologicalModel {
  PreparationGrid grid;
  std::vector<Experiment> experiments;
  std::optional<QuantumTarget> quantum_target;

  OntologicalModel(PreparationGrid g, std::vector<Experiment> exps,
                   std::optional<QuantumTarget> target = std::nullopt)
      : grid(std::move(g)), experiments(std::move(exps)), quantum_target(std::move(target)) {
    for (const auto& e : experiments)
      if (e.atom_count() != grid.space()->size())
        throw error("OntologicalModel: experiment '" + e.name() +
                    "' response table does not match the atom count");
    if (quantum_target) {
      if (quantum_target->preps.size() != grid.nx() * grid.ny())
        throw error("OntologicalModel: quantum target needs one ket per preparation");
      for (const auto& k : quantum_target->preps)
        if (k.dim() != quantum_target->basis.dim())
          throw error("OntologicalModel: quantum target dimension mismatch");
    }
  }

  const OnticSpacePtr& space() const { return grid.space(); }

  const Experiment& experiment(std::string_view name) const {
    for (const auto& e : experiments)
      if (e.name() == name) return e;
    throw error("OntologicalModel: unknown experiment '" + std::string(name) + "'");
  }
};

/// Probability of outcome k for preparation (x, y): the expectation of the
/// response function under the preparation distribution.
inline double outcome_probability(const PreparationGrid& grid, std::string_view x,
                                  std::string_view y, const Experiment& e, std::size_t k) {
  if (e.atom_count() != grid.space()->size())
    throw error("outcome_probability: experiment does not match the space");
  if (k >= e.outcome_count()) throw error("outcome_probability: outcome index out of range");
  const Distribution& d = grid.at(x, y);
  double acc = 0.0;
  for (std::size_t a = 0; a < d.size(); ++a) acc += e.response(a, k) * d.mass(a);
  return acc;
}

inline double outcome_probability(const OntologicalModel& model, std::string_view x,
                                  std::string_view y, std::string_view experiment_name,
                                  std::string_view outcome) {
  const Experiment& e = model.experiment(experiment_name);
  return outcome_probability(model.grid, x, y, e, e.outcome_index(outcome));
}

/// Outcome-by-preparation probability matrix with per-outcome preclusion
/// levels. outcome_epsilon[k] is the smallest probability outcome k receives
/// over the grid; epsilon = max_k outcome_epsilon[k] is the smallest value for
/// which every outcome is epsilon-precluded by some preparation.
struct PreclusionTable {
  std::vector<std::string> outcome_labels;
  std::vector<std::pair<std::string, std::string>> preparations;  // x-major
  std::vector<std::vector<double>> probability;                   // [k][prep]
  std::vector<double> outcome_epsilon;
  std::vector<std::size_t> precluding_prep;  // argmin per outcome
  double epsilon = 0.0;
};

inline PreclusionTable preclusion_table(const PreparationGrid& grid, const Experiment& e) {
  PreclusionTable t;
  t.outcome_labels = e.outcomes();
  for (std::size_t ix = 0; ix < grid.nx(); ++ix)
    for (std::size_t iy = 0; iy < grid.ny(); ++iy)
      t.preparations.emplace_back(grid.x_label(ix), grid.y_label(iy));
  t.probability.assign(e.outcome_count(), std::vector<double>(t.preparations.size(), 0.0));
  t.outcome_epsilon.assign(e.outcome_count(), std::numeric_limits<double>::infinity());
  t.precluding_prep.assign(e.outcome_count(), 0);
  for (std::size_t k = 0; k < e.outcome_count(); ++k) {
    std::size_t col = 0;
    for (std::size_t ix = 0; ix < grid.nx(); ++ix)
      for (std::size_t iy = 0; iy < grid.ny(); ++iy, ++col) {
        double p = outcome_probability(grid, grid.x_label(ix), grid.y_label(iy), e, k);
        t.probability[k][col] = p;
        if (p < t.outcome_epsilon[k]) {
          t.outcome_epsilon[k] = p;
          t.precluding_prep[k] = col;
        }
      }
  }
  t.epsilon = *std::max_element(t.outcome_epsilon.begin(), t.outcome_epsilon.end());
  return t;
}

inline PreclusionTable preclusion_table(const OntologicalModel& model, const Experiment& e) {
  return preclusion_table(model.grid, e);
}

struct ConsistencyEntry {
  std::string x, y, outcome;
  double model_probability = 0.0;
  double born_probability = 0.0;
  double deviation = 0.0;
};

struct ConsistencyReport {
  std::vector<ConsistencyEntry> entries;
  double max_deviation = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Compares every experiment whose outcome count matches the target basis
/// against the Born probabilities of the target preparations.
inline ConsistencyReport quantum_consistency(const OntologicalModel& model, double tol) {
  if (!model.quantum_target) throw error("quantum_consistency: model has no quantum target");
  const auto& target = *model.quantum_target;
  ConsistencyReport report;
  report.tol = tol;
  bool compared = false;
  for (const auto& e : model.experiments) {
    if (e.outcome_count() != target.basis.size()) continue;
    compared = true;
    std::size_t prep_index = 0;
    for (std::size_t ix = 0; ix < model.grid.nx(); ++ix)
      for (std::size_t iy = 0; iy < model.grid.ny(); ++iy, ++prep_index) {
        auto born = born_row(target.preps[prep_index], target.basis);
        for (std::size_t k = 0; k < e.outcome_count(); ++k) {
          ConsistencyEntry entry;
          entry.x = model.grid.x_label(ix);
          entry.y = model.grid.y_label(iy);
          entry.outcome = e.outcomes()[k];
          entry.model_probability =
              outcome_probability(model.grid, entry.x, entry.y, e, k);
          entry.born_probability = born[k];
          entry.deviation = std::abs(entry.model_probability - entry.born_probability);
          report.max_deviation = std::max(report.max_deviation, entry.deviation);
          report.entries.push_back(std::move(entry));
        }
      }
  }
  if (!compared)
    throw error("quantum_consistency: no experiment matches the target basis size");
  report.pass = report.max_deviation <= tol;
  return report;
}

inline void require_priors(const std::vector<double>& priors, std::size_t n, const char* side) {
  if (priors.size() != n)
    throw error(std::string("priors for ") + side + ": size must match label count");
  double total = 0.0;
  for (double p : priors) {
    if (!(p > 0.0)) throw error(std::string("priors for ") + side + ": must be strictly positive");
    total += p;
  }
  if (std::abs(total - 1.0) > tolerance::normalization)
    throw error(std::string("priors for ") + side + ": must sum to 1");
}

/// Mixture over independently chosen preparations:
/// sum_{x,y} priors_x[x] priors_y[y] P_xy.
inline Distribution mixture(const PreparationGrid& grid, const std::vector<double>& priors_x,
                            const std::vector<double>& priors_y) {
  require_priors(priors_x, grid.nx(), "x");
  require_priors(priors_y, grid.ny(), "y");
  std::vector<double> dens(grid.space()->size(), 0.0);
  for (std::size_t ix = 0; ix < grid.nx(); ++ix)
    for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
      const double w = priors_x[ix] * priors_y[iy];
      const Distribution& d = grid.at(ix, iy);
      for (std::size_t a = 0; a < dens.size(); ++a) dens[a] += w * d.density(a);
    }
  return Distribution(grid.space(), std::move(dens));
}

}  // namespace ontic
