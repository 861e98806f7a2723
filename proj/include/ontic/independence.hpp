#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ontic/measures.hpp"
#include "ontic/models.hpp"

namespace ontic {

/// Posterior beliefs about the performed preparations, conditional on the
/// ontic state being a single atom of positive mixture mass:
///   joint(a,b) = p_a q_b mu_ab / mu_bar
///   margA(a)   = p_a sum_y q_y mu_ay / mu_bar
///   margB(b)   = q_b sum_x p_x mu_xb / mu_bar
/// The factorization gap is max |joint - margA margB|; it vanishes exactly
/// when conditioning on the atom is uninformative across the two sides.
struct PosteriorReport {
  std::size_t atom = 0;
  std::string atom_label;
  std::vector<std::vector<double>> joint;  // [ix][iy]
  std::vector<double> marg_a;
  std::vector<double> marg_b;
  double factorization_gap = 0.0;
};

inline PosteriorReport posterior(const PreparationGrid& grid,
                                 const std::vector<double>& priors_x,
                                 const std::vector<double>& priors_y, std::size_t atom) {
  require_priors(priors_x, grid.nx(), "x");
  require_priors(priors_y, grid.ny(), "y");
  if (atom >= grid.space()->size()) throw error("posterior: atom index out of range");
  double mix = 0.0;
  for (std::size_t ix = 0; ix < grid.nx(); ++ix)
    for (std::size_t iy = 0; iy < grid.ny(); ++iy)
      mix += priors_x[ix] * priors_y[iy] * grid.at(ix, iy).density(atom);
  if (!(mix > 0.0))
    throw error("posterior: zero mixture mass at atom '" + grid.space()->label(atom) + "'");

  PosteriorReport r;
  r.atom = atom;
  r.atom_label = grid.space()->label(atom);
  r.joint.assign(grid.nx(), std::vector<double>(grid.ny(), 0.0));
  r.marg_a.assign(grid.nx(), 0.0);
  r.marg_b.assign(grid.ny(), 0.0);
  for (std::size_t ix = 0; ix < grid.nx(); ++ix)
    for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
      double j = priors_x[ix] * priors_y[iy] * grid.at(ix, iy).density(atom) / mix;
      r.joint[ix][iy] = j;
      r.marg_a[ix] += j;
      r.marg_b[iy] += j;
    }
  for (std::size_t ix = 0; ix < grid.nx(); ++ix)
    for (std::size_t iy = 0; iy < grid.ny(); ++iy)
      r.factorization_gap = std::max(
          r.factorization_gap, std::abs(r.joint[ix][iy] - r.marg_a[ix] * r.marg_b[iy]));
  return r;
}

inline PosteriorReport posterior(const PreparationGrid& grid,
                                 const std::vector<double>& priors_x,
                                 const std::vector<double>& priors_y,
                                 std::string_view atom_label) {
  return posterior(grid, priors_x, priors_y, grid.space()->index_of(atom_label));
}

/// Preparation Uninformativeness Condition, checked pointwise at atoms:
/// mu_ab mu_xy = mu_xb mu_ay for all a,x in X and b,y in Y.
struct PucReport {
  bool holds = false;
  double worst_residual = 0.0;
  std::size_t worst_atom = 0;
  std::string worst_atom_label;
  double tol = 0.0;
};

inline PucReport puc_check(const PreparationGrid& grid, double tol = 1e-10) {
  PucReport r;
  r.tol = tol;
  for (std::size_t atom = 0; atom < grid.space()->size(); ++atom) {
    for (std::size_t a = 0; a < grid.nx(); ++a)
      for (std::size_t x = a; x < grid.nx(); ++x)
        for (std::size_t b = 0; b < grid.ny(); ++b)
          for (std::size_t y = b; y < grid.ny(); ++y) {
            double lhs = grid.at(a, b).density(atom) * grid.at(x, y).density(atom);
            double rhs = grid.at(x, b).density(atom) * grid.at(a, y).density(atom);
            double res = std::abs(lhs - rhs);
            if (res > r.worst_residual) {
              r.worst_residual = res;
              r.worst_atom = atom;
            }
          }
  }
  r.worst_atom_label = grid.space()->label(r.worst_atom);
  r.holds = r.worst_residual <= tol;
  return r;
}

/// No Correlation Assumption on a product-labeled space: each preparation's
/// mass function must factorize as the product of its own two marginals.
struct NcaEntry {
  std::string x, y;
  double worst_residual = 0.0;
  std::string worst_atom_label;
};

struct NcaReport {
  bool holds = false;
  double worst_residual = 0.0;
  std::vector<NcaEntry> per_preparation;
  double tol = 0.0;
};

inline NcaReport nca_check(const PreparationGrid& grid, double tol = 1e-10) {
  const auto& space = *grid.space();
  std::vector<std::string> u_labels, v_labels;
  std::vector<std::pair<std::size_t, std::size_t>> cell(space.size());
  auto side_index = [](std::vector<std::string>& labels, const std::string& l) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == l) return i;
    labels.push_back(l);
    return labels.size() - 1;
  };
  for (std::size_t a = 0; a < space.size(); ++a) {
    auto parts = parse_product_label(space.label(a));
    if (!parts)
      throw error("nca_check: atom '" + space.label(a) + "' is not product-labeled");
    cell[a] = {side_index(u_labels, parts->first), side_index(v_labels, parts->second)};
  }

  NcaReport r;
  r.tol = tol;
  for (std::size_t ix = 0; ix < grid.nx(); ++ix)
    for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
      const Distribution& d = grid.at(ix, iy);
      std::vector<double> mu(u_labels.size(), 0.0), mv(v_labels.size(), 0.0);
      for (std::size_t a = 0; a < space.size(); ++a) {
        mu[cell[a].first] += d.mass(a);
        mv[cell[a].second] += d.mass(a);
      }
      NcaEntry entry;
      entry.x = grid.x_label(ix);
      entry.y = grid.y_label(iy);
      for (std::size_t a = 0; a < space.size(); ++a) {
        double res = std::abs(d.mass(a) - mu[cell[a].first] * mv[cell[a].second]);
        if (res > entry.worst_residual) {
          entry.worst_residual = res;
          entry.worst_atom_label = space.label(a);
        }
      }
      r.worst_residual = std::max(r.worst_residual, entry.worst_residual);
      r.per_preparation.push_back(std::move(entry));
    }
  r.holds = r.worst_residual <= tol;
  return r;
}

/// Builds a 2x2 grid from pointwise rank-1 density fields
/// mu_xy = a_x b_y. Such fields satisfy the PUC identically, but per-pair
/// normalization is only compatible with per-label constants when
/// Z00 Z++ = Z0+ Z+0; the caller must supply fields satisfying that
/// compatibility (generate_puc_quadruple repairs it before calling here).
inline PreparationGrid puc_quadruple_from_fields(const OnticSpacePtr& space,
                                                 std::vector<double> a0,
                                                 std::vector<double> a_plus,
                                                 std::vector<double> b0,
                                                 std::vector<double> b_plus) {
  const std::size_t n = space->size();
  if (a0.size() != n || a_plus.size() != n || b0.size() != n || b_plus.size() != n)
    throw error("puc_quadruple_from_fields: field size mismatch");
  auto z = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i] * space->weight(i);
    return acc;
  };
  const double z00 = z(a0, b0), z0p = z(a0, b_plus), zp0 = z(a_plus, b0), zpp = z(a_plus, b_plus);
  if (!(z00 > 0.0) || !(z0p > 0.0) || !(zp0 > 0.0) || !(zpp > 0.0))
    throw error("puc_quadruple_from_fields: degenerate field (zero total mass)");
  if (std::abs(z00 * zpp - z0p * zp0) > 1e-9 * std::max(z00 * zpp, z0p * zp0))
    throw error("puc_quadruple_from_fields: normalizability compatibility violated");

  // Per-label constants c_x d_y = 1/Z_xy (exists by compatibility).
  const double c0 = 1.0 / z00, cp = 1.0 / zp0, d0 = 1.0, dp = z00 / z0p;
  std::vector<double> alpha0(n), alphap(n), beta0(n), betap(n);
  for (std::size_t i = 0; i < n; ++i) {
    alpha0[i] = c0 * a0[i];
    alphap[i] = cp * a_plus[i];
    beta0[i] = d0 * b0[i];
    betap[i] = dp * b_plus[i];
  }
  auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> dens(n);
    for (std::size_t i = 0; i < n; ++i) dens[i] = a[i] * b[i];
    return Distribution(space, std::move(dens));
  };
  std::vector<Distribution> dists;
  dists.push_back(dist(alpha0, beta0));
  dists.push_back(dist(alpha0, betap));
  dists.push_back(dist(alphap, beta0));
  dists.push_back(dist(alphap, betap));
  return PreparationGrid({"0", "+"}, {"0", "+"}, std::move(dists));
}

/// Seeded generator of 2x2 grids satisfying the PUC exactly. Samples sparse
/// nonnegative rank-1 fields, then rescales a_+ on the first half of the atoms
/// (one linear parameter) to restore the normalizability compatibility
/// Z00 Z++ = Z0+ Z+0 broken by random sampling; infeasible samples are
/// rejected and redrawn.
inline PreparationGrid generate_puc_quadruple(std::uint64_t seed, std::size_t n) {
  if (n < 2) throw error("generate_puc_quadruple: need at least two atoms");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const double sparsity = 0.3;
  auto space = make_space(n);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto field = [&] {
      std::vector<double> f(n, 0.0);
      for (auto& v : f)
        if (coin(rng) >= sparsity) v = unif(rng);
      return f;
    };
    std::vector<double> a0 = field(), ap = field(), b0 = field(), bp = field();

    const std::size_t half = n / 2;
    auto z_split = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double in = 0.0, out = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double v = a[i] * b[i] * space->weight(i);
        (i < half ? in : out) += v;
      }
      return std::pair<double, double>{in, out};
    };
    double z00 = 0.0, z0p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z00 += a0[i] * b0[i] * space->weight(i);
      z0p += a0[i] * bp[i] * space->weight(i);
    }
    auto [zpp_in, zpp_out] = z_split(ap, bp);
    auto [zp0_in, zp0_out] = z_split(ap, b0);

    // Z00 (Zpp_out + t Zpp_in) = Z0p (Zp0_out + t Zp0_in), solved for t.
    const double denom = z00 * zpp_in - z0p * zp0_in;
    const double numer = z0p * zp0_out - z00 * zpp_out;
    if (std::abs(denom) < 1e-12) continue;
    const double t = numer / denom;
    if (!(t > 1e-6) || !std::isfinite(t)) continue;
    for (std::size_t i = 0; i < half; ++i) ap[i] *= t;

    try {
      return puc_quadruple_from_fields(space, std::move(a0), std::move(ap), std::move(b0),
                                       std::move(bp));
    } catch (const error&) {
      continue;
    }
  }
  throw error("generate_puc_quadruple: no feasible sample found");
}

/// One line of a verified bound: the claim is lhs >= rhs, slack = lhs - rhs.
struct BoundLine {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

struct BoundReport {
  std::string name;
  bool applicable = true;
  std::string note;
  std::vector<BoundLine> lines;
  double slack = std::numeric_limits<double>::infinity();  // min over lines
  double slack_tol = tolerance::identity;
  bool holds = false;
  std::size_t m = 0;       // outcome count of the experiment involved, if any
  double epsilon = 0.0;    // preclusion level involved, if any
  double limiting_lower_bound = 0.0;  // corollary only

  void add_line(std::string line_name, double lhs, double rhs) {
    BoundLine l{std::move(line_name), lhs, rhs, lhs - rhs};
    slack = std::min(slack, l.slack);
    lines.push_back(std::move(l));
  }
  void finalize() { holds = applicable && slack >= -slack_tol; }
};

namespace detail {
inline std::pair<const Distribution&, const Distribution&> critical_pair(
    const PreparationGrid& grid, bool anti) {
  if (grid.nx() != 2 || grid.ny() != 2)
    throw error("theorem checks: grid must be 2x2");
  if (anti) return {grid.at(0, 1), grid.at(1, 0)};
  return {grid.at(0, 0), grid.at(1, 1)};
}
}  // namespace detail

/// Perfect-preclusion distinctness: under the PUC, an experiment each of whose
/// outcomes is strictly precluded by some preparation forces
/// overlap(P00, P++) = overlap(P0+, P+0) = 0. Reported inapplicable (not
/// failed) when the preconditions do not hold.
inline BoundReport theorem1_check(const PreparationGrid& grid, const Experiment& e) {
  BoundReport r;
  r.name = "perfect_preclusion_distinctness";
  r.slack_tol = tolerance::identity;
  auto table = preclusion_table(grid, e);
  r.m = e.outcome_count();
  r.epsilon = table.epsilon;
  auto puc = puc_check(grid);
  if (table.epsilon > tolerance::identity) {
    r.applicable = false;
    r.note = "experiment does not achieve perfect preclusion";
  } else if (!puc.holds) {
    r.applicable = false;
    r.note = "grid does not satisfy the PUC";
  } else {
    auto [p00, ppp] = detail::critical_pair(grid, false);
    auto [p0p, pp0] = detail::critical_pair(grid, true);
    r.add_line("overlap(P00,P++) == 0", 0.0, overlap(p00, ppp));
    r.add_line("overlap(P0+,P+0) == 0", 0.0, overlap(p0p, pp0));
  }
  r.finalize();
  return r;
}

/// Quantitative distinctness: with an m-outcome experiment achieving
/// epsilon-preclusion and the PUC, delta >= H^2 >= 1 - 2 sqrt(m epsilon) for
/// both critical pairs. Asserted with 1e-9 slack.
inline BoundReport theorem2_check(const PreparationGrid& grid, const Experiment& e) {
  BoundReport r;
  r.name = "epsilon_preclusion_bounds";
  r.slack_tol = 1e-9;
  auto puc = puc_check(grid, 1e-10);
  if (!puc.holds) {
    r.applicable = false;
    r.note = "grid does not satisfy the PUC at 1e-10";
    r.finalize();
    return r;
  }
  auto table = preclusion_table(grid, e);
  r.m = e.outcome_count();
  r.epsilon = table.epsilon;
  const double bound = 1.0 - 2.0 * std::sqrt(static_cast<double>(r.m) * r.epsilon);
  for (bool anti : {false, true}) {
    auto [p, q] = detail::critical_pair(grid, anti);
    const char* tag = anti ? "(P0+,P+0)" : "(P00,P++)";
    double delta = total_variation(p, q);
    double h = hellinger(p, q);
    r.add_line(std::string("delta") + tag + " >= H^2" + tag, delta, h * h);
    r.add_line(std::string("H^2") + tag + " >= 1-2*sqrt(m*eps)", h * h, bound);
  }
  r.finalize();
  return r;
}

/// The preparation-independence route for a pair of subsystem preparation
/// families: the joint grid is the outer product (Cartesian space, factorized
/// distributions). For a 4-outcome experiment with preclusion level epsilon,
///   overlap_A * overlap_B <= 4 epsilon,
/// and when the two subsystem overlaps are equal,
///   delta_A >= 1 - 2 sqrt(epsilon).
/// For an m-outcome experiment the coefficient is m instead of 4.
inline BoundReport pip_bound_check(const Distribution& pa0, const Distribution& pa_plus,
                                   const Distribution& pb0, const Distribution& pb_plus,
                                   const Experiment& joint_experiment) {
  BoundReport r;
  r.name = "preparation_independence_bounds";
  r.slack_tol = tolerance::identity;
  auto prod = product_space(pa0.space(), pb0.space());
  std::vector<Distribution> dists;
  for (const auto* pa : {&pa0, &pa_plus})
    for (const auto* pb : {&pb0, &pb_plus}) dists.push_back(outer_product(*pa, *pb, prod));
  PreparationGrid joint({"0", "+"}, {"0", "+"}, std::move(dists));
  auto table = preclusion_table(joint, joint_experiment);
  r.m = joint_experiment.outcome_count();
  r.epsilon = table.epsilon;
  const double omega_a = overlap(pa0, pa_plus);
  const double omega_b = overlap(pb0, pb_plus);
  r.add_line("m*eps >= overlap_A*overlap_B", static_cast<double>(r.m) * r.epsilon,
             omega_a * omega_b);
  if (std::abs(omega_a - omega_b) <= tolerance::identity) {
    double delta_a = total_variation(pa0, pa_plus);
    r.add_line("delta_A >= 1-sqrt(m*eps)", delta_a,
               1.0 - std::sqrt(static_cast<double>(r.m) * r.epsilon));
  }
  r.finalize();
  return r;
}

/// One element of a family approaching perfect preclusion.
struct CorollaryElement {
  PreparationGrid grid;
  Experiment experiment;
  std::optional<double> epsilon;  // computed from the preclusion table if absent
};

/// For a family of grids with experiments achieving epsilon_i-preclusion and
/// epsilon_i -> 0, the lower bounds 1 - 2 sqrt(m epsilon_i) approach 1, forcing
/// delta(P00,P++) = delta(P0+,P+0) = 1 in the limit. Reports the best lower
/// bound attained over the family.
inline BoundReport corollary_check(const std::vector<CorollaryElement>& elements) {
  BoundReport r;
  r.name = "preclusion_limit_distinctness";
  r.slack_tol = 1e-9;
  if (elements.empty()) throw error("corollary_check: empty family");
  r.limiting_lower_bound = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& el = elements[i];
    auto t2 = theorem2_check(el.grid, el.experiment);
    if (!t2.holds) {
      r.applicable = false;
      r.note = "element " + std::to_string(i) + " fails the epsilon-preclusion bounds";
      break;
    }
    double eps = el.epsilon.value_or(t2.epsilon);
    double m = static_cast<double>(el.experiment.outcome_count());
    double bound = 1.0 - 2.0 * std::sqrt(m * eps);
    auto [p00, ppp] = detail::critical_pair(el.grid, false);
    auto [p0p, pp0] = detail::critical_pair(el.grid, true);
    std::string tag = "[" + std::to_string(i) + "]";
    r.add_line("delta(P00,P++)" + tag + " >= bound", total_variation(p00, ppp), bound);
    r.add_line("delta(P0+,P+0)" + tag + " >= bound", total_variation(p0p, pp0), bound);
    r.limiting_lower_bound = std::max(r.limiting_lower_bound, bound);
  }
  r.finalize();
  return r;
}

/// Per-atom record of which side's preparation the atom pins down: a side is
/// determined when every preparation giving the atom positive mass agrees on
/// that side's label. Atoms carrying no mass determine nothing.
struct DeterminationRecord {
  bool has_support = false;
  bool a_determined = false;
  bool b_determined = false;
  std::optional<std::string> x_label;
  std::optional<std::string> y_label;
};

inline std::vector<DeterminationRecord> determination_map(const PreparationGrid& grid) {
  std::vector<DeterminationRecord> records(grid.space()->size());
  for (std::size_t atom = 0; atom < records.size(); ++atom) {
    auto& rec = records[atom];
    std::optional<std::size_t> x_seen, y_seen;
    bool x_unique = true, y_unique = true;
    for (std::size_t ix = 0; ix < grid.nx(); ++ix)
      for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
        if (!(grid.at(ix, iy).density(atom) > 0.0)) continue;
        rec.has_support = true;
        if (!x_seen)
          x_seen = ix;
        else if (*x_seen != ix)
          x_unique = false;
        if (!y_seen)
          y_seen = iy;
        else if (*y_seen != iy)
          y_unique = false;
      }
    if (rec.has_support) {
      rec.a_determined = x_unique;
      rec.b_determined = y_unique;
      if (x_unique) rec.x_label = grid.x_label(*x_seen);
      if (y_unique) rec.y_label = grid.y_label(*y_seen);
    }
  }
  return records;
}

/// Obstruction witness: when all four preparations of a 2x2 grid share an atom
/// of positive mass, no deterministic experiment can strictly preclude every
/// preparation. Exhausts the possible outcome assignments at the shared atom;
/// whichever outcome the atom is assigned receives positive probability from
/// every preparation.
struct SharedAtomObstruction {
  std::size_t shared_atom = 0;
  std::string shared_atom_label;
  std::vector<double> min_mass_per_outcome;  // over preparations, for each choice
  bool preclusion_impossible = false;
};

inline std::optional<SharedAtomObstruction> shared_support_obstruction(
    const PreparationGrid& grid, std::size_t outcome_count) {
  if (outcome_count == 0) throw error("shared_support_obstruction: need outcomes");
  for (std::size_t atom = 0; atom < grid.space()->size(); ++atom) {
    double min_mass = std::numeric_limits<double>::infinity();
    for (const auto& d : grid.distributions()) min_mass = std::min(min_mass, d.mass(atom));
    if (min_mass > 0.0) {
      SharedAtomObstruction w;
      w.shared_atom = atom;
      w.shared_atom_label = grid.space()->label(atom);
      // Deterministic response: the atom lands in exactly one outcome cell;
      // for each of the outcome_count choices, that outcome keeps at least
      // min_mass probability under every preparation.
      w.min_mass_per_outcome.assign(outcome_count, min_mass);
      w.preclusion_impossible =
          std::all_of(w.min_mass_per_outcome.begin(), w.min_mass_per_outcome.end(),
                      [](double v) { return v > 0.0; });
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace ontic
