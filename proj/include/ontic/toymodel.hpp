#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "ontic/independence.hpp"
#include "ontic/measures.hpp"
#include "ontic/models.hpp"
#include "ontic/quantum.hpp"

namespace ontic::toy {

using Rat = boost::rational<long long>;

// 16 cells, one per pair of ball positions (a, b), a box of A and b box of B,
// boxes numbered 1..4. Cell index = (a-1)*4 + (b-1).
inline constexpr int cell_count = 16;

inline int cell_index(int a, int b) { return (a - 1) * 4 + (b - 1); }
inline int cell_a(int i) { return i / 4 + 1; }
inline int cell_b(int i) { return i % 4 + 1; }

inline OnticSpacePtr box_space() {
  std::vector<std::string> atoms;
  atoms.reserve(cell_count);
  for (int i = 0; i < cell_count; ++i)
    atoms.push_back(product_label(std::to_string(cell_a(i)), std::to_string(cell_b(i))));
  return make_space(std::move(atoms));
}

/// Region index of a cell under the deterministic 4-outcome measurement:
/// xi1 when both balls are in box 3 or 4, xi2 when A is in 3/4 and B in 1/2,
/// xi3 when A is in 1/2 and B in 3/4, xi4 when both are in box 1 or 2.
inline int response_region(int cell) {
  const bool a_high = cell_a(cell) >= 3;
  const bool b_high = cell_b(cell) >= 3;
  if (a_high && b_high) return 0;
  if (a_high) return 1;
  if (b_high) return 2;
  return 3;
}

inline const std::vector<std::string>& outcome_labels() {
  static const std::vector<std::string> labels{"xi1", "xi2", "xi3", "xi4"};
  return labels;
}

inline Experiment response_partition() {
  std::vector<std::size_t> outcome_of_atom(cell_count);
  for (int i = 0; i < cell_count; ++i)
    outcome_of_atom[i] = static_cast<std::size_t>(response_region(i));
  return Experiment::deterministic("box_partition", outcome_labels(), outcome_of_atom);
}

/// Single-system box probabilities: the |0> preparation puts 1/2, 1/4, 1/4 on
/// boxes 1, 2, 3; the |+> preparation puts 1/4, 1/4, 1/2 on boxes 2, 3, 4.
inline std::array<Rat, 4> marginal_targets_exact(std::string_view x) {
  if (x == "0") return {Rat(1, 2), Rat(1, 4), Rat(1, 4), Rat(0)};
  if (x == "+") return {Rat(0), Rat(1, 4), Rat(1, 4), Rat(1, 2)};
  throw error("marginal_targets: unknown preparation label '" + std::string(x) + "'");
}

inline std::array<double, 4> marginal_targets(std::string_view x) {
  auto exact = marginal_targets_exact(x);
  std::array<double, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = boost::rational_cast<double>(exact[i]);
  return out;
}

namespace detail {

// Exact arithmetic in Q[sqrt2]: value = a + b*sqrt2. All amplitudes of the
// states involved are of this form, so the Born probabilities come out as
// exact rationals.
struct RootTwoRat {
  Rat a{0};
  Rat b{0};

  friend RootTwoRat operator+(const RootTwoRat& u, const RootTwoRat& v) {
    return {u.a + v.a, u.b + v.b};
  }
  friend RootTwoRat operator*(const RootTwoRat& u, const RootTwoRat& v) {
    return {u.a * v.a + Rat(2) * u.b * v.b, u.a * v.b + u.b * v.a};
  }
};

using ExactKet = std::array<RootTwoRat, 4>;

inline std::array<RootTwoRat, 2> exact_single(char which) {
  const RootTwoRat zero{Rat(0), Rat(0)};
  const RootTwoRat one{Rat(1), Rat(0)};
  const RootTwoRat r{Rat(0), Rat(1, 2)};        // 1/sqrt2
  const RootTwoRat minus_r{Rat(0), Rat(-1, 2)};
  switch (which) {
    case '0': return {one, zero};
    case '1': return {zero, one};
    case '+': return {r, r};
    case '-': return {r, minus_r};
  }
  throw error("exact_single: unknown state");
}

inline ExactKet exact_tensor(const std::array<RootTwoRat, 2>& u,
                             const std::array<RootTwoRat, 2>& v) {
  return {u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]};
}

inline ExactKet exact_scaled_sum(const ExactKet& u, const ExactKet& v) {
  const RootTwoRat r{Rat(0), Rat(1, 2)};  // 1/sqrt2
  ExactKet out;
  for (int i = 0; i < 4; ++i) out[i] = r * (u[i] + v[i]);
  return out;
}

inline const std::array<ExactKet, 4>& exact_basis() {
  static const std::array<ExactKet, 4> basis = [] {
    auto t = [](char x, char y) { return exact_tensor(exact_single(x), exact_single(y)); };
    return std::array<ExactKet, 4>{
        exact_scaled_sum(t('0', '1'), t('1', '0')),
        exact_scaled_sum(t('0', '-'), t('1', '+')),
        exact_scaled_sum(t('+', '1'), t('-', '0')),
        exact_scaled_sum(t('+', '-'), t('-', '+')),
    };
  }();
  return basis;
}

}  // namespace detail

/// Exact Born probabilities of the 4-outcome measurement for the product
/// preparation |x>|y>, x, y in {0, +}.
inline std::array<Rat, 4> exact_born_row(std::string_view x, std::string_view y) {
  if ((x != "0" && x != "+") || (y != "0" && y != "+"))
    throw error("exact_born_row: labels must be '0' or '+'");
  auto prep = detail::exact_tensor(detail::exact_single(x[0]), detail::exact_single(y[0]));
  std::array<Rat, 4> row;
  for (int k = 0; k < 4; ++k) {
    detail::RootTwoRat ip{Rat(0), Rat(0)};
    for (int i = 0; i < 4; ++i) ip = ip + detail::exact_basis()[k][i] * prep[i];
    detail::RootTwoRat sq = ip * ip;  // amplitudes are real
    if (sq.b != Rat(0)) throw error("exact_born_row: non-rational probability");
    row[k] = sq.a;
  }
  return row;
}

/// A candidate joint model: per preparation (order 00, 0+, +0, ++) a support
/// bitmask over the 16 cells and exact per-cell probability masses.
struct ToyCandidate {
  std::array<std::uint16_t, 4> support{};
  std::array<std::array<Rat, 16>, 4> weight{};
  bool uniform = true;
};

inline const std::array<std::pair<std::string, std::string>, 4>& prep_labels() {
  static const std::array<std::pair<std::string, std::string>, 4> labels{
      std::pair<std::string, std::string>{"0", "0"},
      {"0", "+"},
      {"+", "0"},
      {"+", "+"}};
  return labels;
}

struct ToySearchOptions {
  bool require_nca_violation = false;
  // Demands overlap(P00, P++) > 0 on top of the preclusion constraints; no
  // model can satisfy this (the critical pair must be disjoint), so the
  // search returns empty. Exposed to make that impossibility checkable.
  bool require_critical_overlap = false;
  // Fall back to non-uniform rational cell weights (denominators up to 8)
  // for any preparation with no uniform-over-support solution.
  bool allow_rational_weights = false;
};

namespace detail {

struct CellMasks {
  std::array<std::uint16_t, 4> box_a{};   // cells with A in box a+1
  std::array<std::uint16_t, 4> box_b{};
  std::array<std::uint16_t, 4> region{};
};

inline const CellMasks& cell_masks() {
  static const CellMasks m = [] {
    CellMasks cm;
    for (int i = 0; i < cell_count; ++i) {
      cm.box_a[cell_a(i) - 1] |= static_cast<std::uint16_t>(1u << i);
      cm.box_b[cell_b(i) - 1] |= static_cast<std::uint16_t>(1u << i);
      cm.region[response_region(i)] |= static_cast<std::uint16_t>(1u << i);
    }
    return cm;
  }();
  return m;
}

struct PrepConstraints {
  std::array<Rat, 4> target_a;
  std::array<Rat, 4> target_b;
  std::array<Rat, 4> target_region;
  std::uint16_t allowed = 0;  // cells not excluded by a zero target
};

inline PrepConstraints prep_constraints(const std::string& x, const std::string& y) {
  PrepConstraints c;
  c.target_a = marginal_targets_exact(x);
  c.target_b = marginal_targets_exact(y);
  c.target_region = exact_born_row(x, y);
  c.allowed = 0xFFFF;
  const auto& m = cell_masks();
  for (int i = 0; i < 4; ++i) {
    if (c.target_a[i] == Rat(0)) c.allowed &= static_cast<std::uint16_t>(~m.box_a[i]);
    if (c.target_b[i] == Rat(0)) c.allowed &= static_cast<std::uint16_t>(~m.box_b[i]);
    if (c.target_region[i] == Rat(0)) c.allowed &= static_cast<std::uint16_t>(~m.region[i]);
  }
  return c;
}

// A per-preparation candidate: support plus exact cell masses.
struct PrepCandidate {
  std::uint16_t support = 0;
  std::array<Rat, 16> weight{};
  bool uniform = true;
};

inline bool uniform_mask_matches(std::uint16_t s, const PrepConstraints& c) {
  const int size = std::popcount(s);
  const auto& m = cell_masks();
  auto counts_match = [&](const std::array<std::uint16_t, 4>& masks,
                          const std::array<Rat, 4>& targets) {
    for (int i = 0; i < 4; ++i) {
      // popcount(s & mask)/|S| == target, checked in integers.
      Rat lhs(std::popcount(static_cast<std::uint16_t>(s & masks[i])), size);
      if (lhs != targets[i]) return false;
    }
    return true;
  };
  return counts_match(m.box_a, c.target_a) && counts_match(m.box_b, c.target_b) &&
         counts_match(m.region, c.target_region);
}

inline std::vector<PrepCandidate> uniform_candidates(const PrepConstraints& c) {
  std::vector<PrepCandidate> out;
  for (std::uint32_t s = 1; s < (1u << cell_count); ++s) {
    auto mask = static_cast<std::uint16_t>(s);
    if (mask & ~c.allowed) continue;
    if (!uniform_mask_matches(mask, c)) continue;
    PrepCandidate cand;
    cand.support = mask;
    Rat w(1, std::popcount(mask));
    for (int i = 0; i < cell_count; ++i)
      if (mask & (1u << i)) cand.weight[i] = w;
    out.push_back(std::move(cand));
  }
  return out;
}

// Proper fractions with denominator at most 8, ascending; the value grid for
// free variables in the rational fallback.
inline const std::vector<Rat>& denominator8_grid() {
  static const std::vector<Rat> grid = [] {
    std::vector<Rat> g;
    for (int d = 2; d <= 8; ++d)
      for (int n = 1; n < d; ++n)
        if (std::gcd(n, d) == 1) g.emplace_back(n, d);
    std::sort(g.begin(), g.end());
    return g;
  }();
  return grid;
}

// Exact feasibility for a fixed support: solves the marginal and region
// constraints by rational Gauss-Jordan elimination; underdetermined systems
// are closed by scanning up to three free variables over the denominator-8
// grid. Emits every solution with all cell masses positive and reduced
// denominators at most 8.
inline void rational_solutions_for_support(std::uint16_t support, const PrepConstraints& c,
                                           std::vector<PrepCandidate>& out) {
  std::vector<int> cells;
  for (int i = 0; i < cell_count; ++i)
    if (support & (1u << i)) cells.push_back(i);
  const std::size_t nv = cells.size();
  const auto& m = cell_masks();

  // rows: 4 A-marginals, 4 B-marginals, 4 regions; columns: cells + rhs.
  std::vector<std::vector<Rat>> rows;
  auto add_rows = [&](const std::array<std::uint16_t, 4>& masks,
                      const std::array<Rat, 4>& targets) {
    for (int g = 0; g < 4; ++g) {
      std::vector<Rat> row(nv + 1, Rat(0));
      for (std::size_t j = 0; j < nv; ++j)
        if (masks[g] & (1u << cells[j])) row[j] = Rat(1);
      row[nv] = targets[g];
      rows.push_back(std::move(row));
    }
  };
  add_rows(m.box_a, c.target_a);
  add_rows(m.box_b, c.target_b);
  add_rows(m.region, c.target_region);

  // Gauss-Jordan with column pivoting.
  std::vector<int> pivot_col_of_row;
  std::vector<int> col_state(nv, -1);  // row index owning the column, -1 = free
  std::size_t rank = 0;
  for (std::size_t col = 0; col < nv && rank < rows.size(); ++col) {
    std::size_t pr = rank;
    while (pr < rows.size() && rows[pr][col] == Rat(0)) ++pr;
    if (pr == rows.size()) continue;
    std::swap(rows[rank], rows[pr]);
    Rat inv = Rat(1) / rows[rank][col];
    for (auto& v : rows[rank]) v *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == Rat(0)) continue;
      Rat f = rows[r][col];
      for (std::size_t k2 = 0; k2 <= nv; ++k2) rows[r][k2] -= f * rows[rank][k2];
    }
    col_state[col] = static_cast<int>(rank);
    pivot_col_of_row.push_back(static_cast<int>(col));
    ++rank;
  }
  for (std::size_t r = rank; r < rows.size(); ++r)
    if (rows[r][nv] != Rat(0)) return;  // inconsistent

  std::vector<std::size_t> free_cols;
  for (std::size_t col = 0; col < nv; ++col)
    if (col_state[col] < 0) free_cols.push_back(col);
  if (free_cols.size() > 3) return;  // out of the fallback's reach

  const auto& grid = denominator8_grid();
  std::vector<Rat> assignment(nv, Rat(0));
  auto emit_if_valid = [&] {
    for (std::size_t r = 0; r < rank; ++r) {
      Rat v = rows[r][nv];
      for (std::size_t fc : free_cols) v -= rows[r][fc] * assignment[fc];
      assignment[static_cast<std::size_t>(pivot_col_of_row[r])] = v;
    }
    for (const Rat& v : assignment)
      if (v <= Rat(0) || v.denominator() > 8) return;
    PrepCandidate cand;
    cand.support = support;
    cand.uniform = false;
    for (std::size_t j = 0; j < nv; ++j) cand.weight[cells[j]] = assignment[j];
    out.push_back(std::move(cand));
  };
  auto scan = [&](auto&& self, std::size_t depth) -> void {
    if (depth == free_cols.size()) {
      emit_if_valid();
      return;
    }
    for (const Rat& v : grid) {
      assignment[free_cols[depth]] = v;
      self(self, depth + 1);
    }
  };
  scan(scan, 0);
}

inline std::vector<PrepCandidate> rational_candidates(const PrepConstraints& c) {
  std::vector<PrepCandidate> out;
  for (std::uint32_t s = 1; s < (1u << cell_count); ++s) {
    auto mask = static_cast<std::uint16_t>(s);
    if (mask & ~c.allowed) continue;
    rational_solutions_for_support(mask, c, out);
  }
  return out;
}

}  // namespace detail

/// Non-uniform exact candidates for one preparation (the rational-weight
/// fallback family, exposed for direct verification).
inline std::vector<detail::PrepCandidate> toy_rational_candidates(const std::string& x,
                                                                  const std::string& y) {
  return detail::rational_candidates(detail::prep_constraints(x, y));
}

struct ToySearchResult {
  std::vector<ToyCandidate> models;
  std::array<std::size_t, 4> per_prep_candidates{};
};

/// Exhaustive reconstruction of the box models: per preparation, enumerates
/// supports whose uniform distribution matches both single-system marginals
/// and the exact Born masses of the four response regions; quadruples are then
/// filtered for disjointness of the (00,++) and (0+,+0) supports, which makes
/// the PUC hold identically. With require_nca_violation set, additionally
/// demands overlap(P00,P0+) > 0 and overlap(P00,P+0) > 0. Results are ordered
/// lexicographically by support bitmask.
inline ToySearchResult search_toy_models(const ToySearchOptions& options = {}) {
  ToySearchResult result;
  std::array<std::vector<detail::PrepCandidate>, 4> lists;
  for (int p = 0; p < 4; ++p) {
    auto constraints =
        detail::prep_constraints(prep_labels()[p].first, prep_labels()[p].second);
    lists[p] = detail::uniform_candidates(constraints);
    if (lists[p].empty() && options.allow_rational_weights)
      lists[p] = detail::rational_candidates(constraints);
    result.per_prep_candidates[p] = lists[p].size();
  }

  for (const auto& c00 : lists[0])
    for (const auto& c0p : lists[1])
      for (const auto& cp0 : lists[2])
        for (const auto& cpp : lists[3]) {
          if (c00.support & cpp.support) continue;
          if (c0p.support & cp0.support) continue;
          if (options.require_nca_violation &&
              (!(c00.support & c0p.support) || !(c00.support & cp0.support)))
            continue;
          if (options.require_critical_overlap && !(c00.support & cpp.support)) continue;
          ToyCandidate model;
          model.support = {c00.support, c0p.support, cp0.support, cpp.support};
          model.weight = {c00.weight, c0p.weight, cp0.weight, cpp.weight};
          model.uniform = c00.uniform && c0p.uniform && cp0.uniform && cpp.uniform;
          result.models.push_back(std::move(model));
        }
  return result;
}

inline PreparationGrid to_grid(const ToyCandidate& cand) {
  auto space = box_space();
  std::vector<Distribution> dists;
  for (int p = 0; p < 4; ++p) {
    std::vector<double> dens(cell_count);
    for (int i = 0; i < cell_count; ++i)
      dens[i] = boost::rational_cast<double>(cand.weight[p][i]);
    dists.emplace_back(space, std::move(dens));
  }
  return PreparationGrid({"0", "+"}, {"0", "+"}, std::move(dists));
}

inline OntologicalModel to_model(const ToyCandidate& cand) {
  std::vector<Ket> preps;
  for (const auto& [x, y] : prep_labels()) preps.push_back(product_prep(x, y));
  return OntologicalModel(to_grid(cand), {response_partition()},
                          QuantumTarget{std::move(preps), pbr_basis()});
}

/// Mixes every preparation with the uniform distribution over the cells
/// carrying no mass under any preparation: P'_xy = (1-h) P_xy + h U_free.
/// Leaking only into jointly unused cells preserves the PUC exactly while
/// making the preclusion level strictly positive.
inline OntologicalModel leaky_variant(const ToyCandidate& cand, double h) {
  if (!(h > 0.0) || !(h < 1.0)) throw error("leaky_variant: h must be in (0,1)");
  std::uint16_t used = 0;
  for (auto s : cand.support) used |= s;
  const int free_cells = cell_count - std::popcount(used);
  if (free_cells == 0)
    throw error("leaky_variant: no cell is unused by all four preparations");
  auto space = box_space();
  std::vector<Distribution> dists;
  for (int p = 0; p < 4; ++p) {
    std::vector<double> dens(cell_count);
    for (int i = 0; i < cell_count; ++i) {
      double base = boost::rational_cast<double>(cand.weight[p][i]);
      double leak = (used & (1u << i)) ? 0.0 : 1.0 / free_cells;
      dens[i] = (1.0 - h) * base + h * leak;
    }
    dists.emplace_back(space, std::move(dens));
  }
  return OntologicalModel(PreparationGrid({"0", "+"}, {"0", "+"}, std::move(dists)),
                          {response_partition()});
}

struct AppendixClaim {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AppendixReport {
  std::vector<AppendixClaim> claims;
  bool all_pass = false;
};

/// Re-verifies, in exact arithmetic where the claim is exact, everything the
/// box construction is supposed to deliver: a product-labeled (Cartesian)
/// space, the quantum statistics, the PUC with residual exactly zero, failure
/// of the NCA, ontological distinctness of both critical pairs, and the
/// perfect-preclusion conclusion on the floating-point path.
inline AppendixReport verify_appendix_claims(const ToyCandidate& cand) {
  AppendixReport report;
  auto add = [&](std::string name, bool pass, std::string detail = {}) {
    report.claims.push_back({std::move(name), pass, std::move(detail)});
  };

  auto space = box_space();
  bool cpa = true;
  for (std::size_t i = 0; i < space->size(); ++i)
    if (!parse_product_label(space->label(i))) cpa = false;
  add("cartesian_product_space", cpa);

  bool quantum_ok = true;
  std::string quantum_detail;
  for (int p = 0; p < 4 && quantum_ok; ++p) {
    auto born = exact_born_row(prep_labels()[p].first, prep_labels()[p].second);
    auto marg_a = marginal_targets_exact(prep_labels()[p].first);
    auto marg_b = marginal_targets_exact(prep_labels()[p].second);
    std::array<Rat, 4> region_mass{}, a_mass{}, b_mass{};
    Rat total(0);
    for (int i = 0; i < cell_count; ++i) {
      const Rat& w = cand.weight[p][i];
      region_mass[response_region(i)] += w;
      a_mass[cell_a(i) - 1] += w;
      b_mass[cell_b(i) - 1] += w;
      total += w;
    }
    if (total != Rat(1)) {
      quantum_ok = false;
      quantum_detail = "preparation not normalized";
    }
    for (int k = 0; k < 4; ++k) {
      if (region_mass[k] != born[k]) {
        quantum_ok = false;
        quantum_detail = "region mass differs from the Born probability";
      }
      if (a_mass[k] != marg_a[k] || b_mass[k] != marg_b[k]) {
        quantum_ok = false;
        quantum_detail = "single-system marginal differs from its target";
      }
    }
  }
  add("quantum_consistency", quantum_ok, quantum_detail);

  bool puc = true;
  for (int i = 0; i < cell_count; ++i)
    if (cand.weight[0][i] * cand.weight[3][i] != cand.weight[1][i] * cand.weight[2][i])
      puc = false;
  add("puc_holds", puc);

  bool nca_fails = false;
  for (int p = 0; p < 4 && !nca_fails; ++p) {
    std::array<Rat, 4> a_mass{}, b_mass{};
    for (int i = 0; i < cell_count; ++i) {
      a_mass[cell_a(i) - 1] += cand.weight[p][i];
      b_mass[cell_b(i) - 1] += cand.weight[p][i];
    }
    for (int i = 0; i < cell_count; ++i)
      if (cand.weight[p][i] != a_mass[cell_a(i) - 1] * b_mass[cell_b(i) - 1])
        nca_fails = true;
  }
  add("nca_fails", nca_fails);

  auto rational_delta = [&](int p, int q) {
    Rat acc(0);
    for (int i = 0; i < cell_count; ++i) {
      Rat d = cand.weight[p][i] - cand.weight[q][i];
      acc += d < Rat(0) ? -d : d;
    }
    return acc / Rat(2);
  };
  bool distinct = rational_delta(0, 3) == Rat(1) && rational_delta(1, 2) == Rat(1);
  add("critical_pairs_ontologically_distinct", distinct);

  auto t1 = theorem1_check(to_grid(cand), response_partition());
  add("perfect_preclusion_distinctness", t1.applicable && t1.holds, t1.note);

  report.all_pass = true;
  for (const auto& c : report.claims) report.all_pass = report.all_pass && c.pass;
  return report;
}

/// Text rendering of the support grids and the response regions, in the style
/// of a shaded-cell diagram: A's box position runs horizontally, B's
/// vertically.
inline std::string render(const ToyCandidate& cand) {
  std::ostringstream out;
  static const std::array<const char*, 4> names{"P00", "P0+", "P+0", "P++"};
  for (int p = 0; p < 4; ++p) {
    out << names[p] << ":\n";
    for (int b = 4; b >= 1; --b) {
      out << b << " |";
      for (int a = 1; a <= 4; ++a)
        out << ' ' << ((cand.support[p] >> cell_index(a, b)) & 1 ? '#' : '.');
      out << '\n';
    }
    out << "  +--------\n    1 2 3 4\n";
  }
  out << "response regions:\n";
  for (int b = 4; b >= 1; --b) {
    out << b << " |";
    for (int a = 1; a <= 4; ++a)
      out << " " << outcome_labels()[response_region(cell_index(a, b))].substr(2);
    out << '\n';
  }
  out << "  +--------\n    1 2 3 4\n";
  return out.str();
}

}  // namespace ontic::toy
