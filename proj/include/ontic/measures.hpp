#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ontic {

/// Thrown on any precondition or consistency failure inside the library.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

namespace tolerance {
// Construction-time normalization checks accept this much input sloppiness.
inline constexpr double normalization = 1e-9;
// Internal arithmetic identities are asserted much tighter.
inline constexpr double identity = 1e-12;
}  // namespace tolerance

class OnticSpace;
using OnticSpacePtr = std::shared_ptr<const OnticSpace>;

/// Finite space of ontic states: an ordered list of uniquely labeled atoms
/// together with a strictly positive base weight per atom (the dominating
/// measure against which all densities are expressed).
class OnticSpace {
 public:
  OnticSpace(std::vector<std::string> atoms, std::vector<double> base_weights = {})
      : atoms_(std::move(atoms)), weights_(std::move(base_weights)) {
    if (atoms_.empty()) throw error("OnticSpace: at least one atom required");
    if (weights_.empty()) weights_.assign(atoms_.size(), 1.0);
    if (weights_.size() != atoms_.size())
      throw error("OnticSpace: base_weights size does not match atom count");
    for (double w : weights_)
      if (!(w > 0.0) || !std::isfinite(w))
        throw error("OnticSpace: base weights must be strictly positive");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      auto [it, inserted] = index_.emplace(atoms_[i], i);
      if (!inserted) throw error("OnticSpace: duplicate atom label '" + atoms_[i] + "'");
    }
    total_weight_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  }

  std::size_t size() const { return atoms_.size(); }
  const std::string& label(std::size_t i) const { return atoms_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }
  double total_weight() const { return total_weight_; }
  const std::vector<std::string>& labels() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }

  std::optional<std::size_t> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(std::string_view label) const {
    auto i = find(label);
    if (!i) throw error("OnticSpace: unknown atom label '" + std::string(label) + "'");
    return *i;
  }

  friend bool operator==(const OnticSpace& a, const OnticSpace& b) {
    return a.atoms_ == b.atoms_ && a.weights_ == b.weights_;
  }

 private:
  std::vector<std::string> atoms_;
  std::vector<double> weights_;
  std::unordered_map<std::string, std::size_t> index_;
  double total_weight_ = 0.0;
};

inline OnticSpacePtr make_space(std::vector<std::string> atoms,
                                std::vector<double> base_weights = {}) {
  return std::make_shared<const OnticSpace>(std::move(atoms), std::move(base_weights));
}

/// Space with one atom per index 0..n-1, unit weights.
inline OnticSpacePtr make_space(std::size_t n, const std::string& prefix = "a") {
  std::vector<std::string> atoms;
  atoms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) atoms.push_back(prefix + std::to_string(i));
  return make_space(std::move(atoms));
}

inline bool same_space(const OnticSpacePtr& a, const OnticSpacePtr& b) {
  return a == b || (a && b && *a == *b);
}

/// Probability distribution on an OnticSpace, stored as a nonnegative density
/// with respect to the space's base weights: sum over atoms of
/// density * weight must be 1 (within the construction tolerance).
class Distribution {
 public:
  Distribution(OnticSpacePtr space, std::vector<double> density)
      : space_(std::move(space)), density_(std::move(density)) {
    if (!space_) throw error("Distribution: null space");
    if (density_.size() != space_->size())
      throw error("Distribution: density size does not match atom count");
    double total = 0.0;
    for (std::size_t i = 0; i < density_.size(); ++i) {
      double d = density_[i];
      if (!(d >= 0.0) || !std::isfinite(d))
        throw error("Distribution: density must be nonnegative at atom '" +
                    space_->label(i) + "'");
      total += d * space_->weight(i);
    }
    if (std::abs(total - 1.0) > tolerance::normalization) {
      std::ostringstream msg;
      msg << "Distribution: normalization failure, total mass " << total;
      throw error(msg.str());
    }
  }

  const OnticSpacePtr& space() const { return space_; }
  std::size_t size() const { return density_.size(); }
  double density(std::size_t i) const { return density_.at(i); }
  /// Probability mass carried by atom i: density * base weight.
  double mass(std::size_t i) const { return density_.at(i) * space_->weight(i); }
  const std::vector<double>& densities() const { return density_; }

  static Distribution uniform(OnticSpacePtr space) {
    double d = 1.0 / space->total_weight();
    return Distribution(space, std::vector<double>(space->size(), d));
  }

  static Distribution point_mass(OnticSpacePtr space, std::size_t atom) {
    std::vector<double> dens(space->size(), 0.0);
    dens.at(atom) = 1.0 / space->weight(atom);
    return Distribution(std::move(space), std::move(dens));
  }

  /// Build from per-atom probability masses (divides out the base weights).
  static Distribution from_masses(OnticSpacePtr space, const std::vector<double>& masses) {
    if (masses.size() != space->size())
      throw error("Distribution::from_masses: size mismatch");
    std::vector<double> dens(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i) dens[i] = masses[i] / space->weight(i);
    return Distribution(std::move(space), std::move(dens));
  }

 private:
  OnticSpacePtr space_;
  std::vector<double> density_;
};

inline void require_same_space(const Distribution& p, const Distribution& q,
                               const char* who) {
  if (!same_space(p.space(), q.space()))
    throw error(std::string(who) + ": distributions live on distinct ontic spaces");
}

/// Total variation distance: (1/2) sum |p - q| w. Coincides with the
/// sup-over-events definition on finite spaces.
inline double total_variation(const Distribution& p, const Distribution& q) {
  require_same_space(p, q, "total_variation");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    acc += std::abs(p.density(i) - q.density(i)) * p.space()->weight(i);
  return 0.5 * acc;
}

/// Classical overlap: sum min(p, q) w. Satisfies overlap = 1 - total_variation.
inline double overlap(const Distribution& p, const Distribution& q) {
  require_same_space(p, q, "overlap");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    acc += std::min(p.density(i), q.density(i)) * p.space()->weight(i);
  return acc;
}

/// Hellinger distance: sqrt((1/2) sum (sqrt p - sqrt q)^2 w).
inline double hellinger(const Distribution& p, const Distribution& q) {
  require_same_space(p, q, "hellinger");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = std::sqrt(p.density(i)) - std::sqrt(q.density(i));
    acc += d * d * p.space()->weight(i);
  }
  return std::sqrt(0.5 * acc);
}

/// Fidelity (Bhattacharyya coefficient): sum sqrt(p q) w = 1 - hellinger^2.
inline double fidelity(const Distribution& p, const Distribution& q) {
  require_same_space(p, q, "fidelity");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    acc += std::sqrt(p.density(i) * q.density(i)) * p.space()->weight(i);
  return acc;
}

/// Joint report of the distance functionals and the inequality chain
///   overlap <= fidelity <= l2_bound   and   delta >= hellinger^2 >= 1 - l2_bound,
/// where l2_bound = sqrt(sum p q w * Q(Lambda)). The Q(Lambda) factor makes the
/// bound valid for any base measure; it is 1 when the base measure is itself a
/// probability measure.
struct DistanceChainReport {
  double omega = 0.0;
  double fidelity = 0.0;
  double l2_bound = 0.0;
  double delta = 0.0;
  double hellinger_sq = 0.0;
  bool holds = false;
};

inline DistanceChainReport inequality_chain(const Distribution& p, const Distribution& q) {
  require_same_space(p, q, "inequality_chain");
  DistanceChainReport r;
  r.omega = overlap(p, q);
  r.fidelity = fidelity(p, q);
  r.delta = total_variation(p, q);
  double h = hellinger(p, q);
  r.hellinger_sq = h * h;
  double inner = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    inner += p.density(i) * q.density(i) * p.space()->weight(i);
  r.l2_bound = std::sqrt(inner * p.space()->total_weight());
  const double slack = tolerance::identity;
  r.holds = r.omega <= r.fidelity + slack && r.fidelity <= r.l2_bound + slack &&
            r.delta + slack >= r.hellinger_sq &&
            r.hellinger_sq + slack >= 1.0 - r.l2_bound;
  return r;
}

/// Atom label "(u,v)" for product spaces.
inline std::string product_label(const std::string& u, const std::string& v) {
  return "(" + u + "," + v + ")";
}

/// Parses "(u,v)"; returns nothing when the label is not of that shape.
inline std::optional<std::pair<std::string, std::string>> parse_product_label(
    std::string_view label) {
  if (label.size() < 4 || label.front() != '(' || label.back() != ')') return std::nullopt;
  auto body = label.substr(1, label.size() - 2);
  auto comma = body.find(',');
  if (comma == std::string_view::npos) return std::nullopt;
  return std::make_pair(std::string(body.substr(0, comma)),
                        std::string(body.substr(comma + 1)));
}

/// Cartesian product space, atoms ordered with the first factor major.
inline OnticSpacePtr product_space(const OnticSpacePtr& a, const OnticSpacePtr& b) {
  std::vector<std::string> atoms;
  std::vector<double> weights;
  atoms.reserve(a->size() * b->size());
  weights.reserve(a->size() * b->size());
  for (std::size_t i = 0; i < a->size(); ++i)
    for (std::size_t j = 0; j < b->size(); ++j) {
      atoms.push_back(product_label(a->label(i), b->label(j)));
      weights.push_back(a->weight(i) * b->weight(j));
    }
  return make_space(std::move(atoms), std::move(weights));
}

/// Outer product distribution on the given product space (which must have been
/// built from the factors' spaces, in the same order).
inline Distribution outer_product(const Distribution& a, const Distribution& b,
                                  const OnticSpacePtr& product) {
  if (product->size() != a.size() * b.size())
    throw error("outer_product: product space size mismatch");
  std::vector<double> dens;
  dens.reserve(product->size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) dens.push_back(a.density(i) * b.density(j));
  return Distribution(product, std::move(dens));
}

inline Distribution outer_product(const Distribution& a, const Distribution& b) {
  return outer_product(a, b, product_space(a.space(), b.space()));
}

}  // namespace ontic
