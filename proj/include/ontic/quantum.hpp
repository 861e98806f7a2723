#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "ontic/measures.hpp"

namespace ontic {

using Complex = std::complex<double>;

/// Normalized pure state on a small Hilbert space.
struct Ket {
  std::vector<Complex> amplitudes;

  explicit Ket(std::vector<Complex> amps) : amplitudes(std::move(amps)) {
    double norm2 = 0.0;
    for (const auto& a : amplitudes) norm2 += std::norm(a);
    if (std::abs(norm2 - 1.0) > tolerance::identity)
      throw error("Ket: amplitudes are not normalized");
  }

  std::size_t dim() const { return amplitudes.size(); }
};

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) throw error("inner: dimension mismatch");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
  return acc;
}

inline Ket ket_zero() { return Ket({{1.0, 0.0}, {0.0, 0.0}}); }
inline Ket ket_one() { return Ket({{0.0, 0.0}, {1.0, 0.0}}); }
inline Ket ket_plus() {
  const double s = 1.0 / std::sqrt(2.0);
  return Ket({{s, 0.0}, {s, 0.0}});
}
inline Ket ket_minus() {
  const double s = 1.0 / std::sqrt(2.0);
  return Ket({{s, 0.0}, {-s, 0.0}});
}

/// Kronecker product, first factor major (|i>|j> at index i*dim(b)+j).
inline Ket tensor(const Ket& a, const Ket& b) {
  std::vector<Complex> amps;
  amps.reserve(a.dim() * b.dim());
  for (const auto& x : a.amplitudes)
    for (const auto& y : b.amplitudes) amps.push_back(x * y);
  return Ket(std::move(amps));
}

/// Orthonormal basis of a small Hilbert space; orthonormality is checked on
/// construction.
struct MeasurementBasis {
  std::vector<Ket> kets;

  explicit MeasurementBasis(std::vector<Ket> basis_kets) : kets(std::move(basis_kets)) {
    if (kets.empty()) throw error("MeasurementBasis: empty");
    const std::size_t d = kets.front().dim();
    if (kets.size() != d) throw error("MeasurementBasis: need dim kets for a full basis");
    for (std::size_t i = 0; i < kets.size(); ++i) {
      if (kets[i].dim() != d) throw error("MeasurementBasis: mixed dimensions");
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(inner(kets[i], kets[j])) > tolerance::identity)
          throw error("MeasurementBasis: kets are not orthogonal");
    }
  }

  std::size_t dim() const { return kets.front().dim(); }
  std::size_t size() const { return kets.size(); }
};

/// The entangled 4-outcome basis used for the two-system preclusion argument:
///   xi1 = (|0>|1> + |1>|0>)/sqrt2        xi2 = (|0>|-> + |1>|+>)/sqrt2
///   xi3 = (|+>|1> + |->|0>)/sqrt2        xi4 = (|+>|-> + |->|+>)/sqrt2
/// Outcome k is orthogonal to exactly one of the four product preparations.
inline MeasurementBasis pbr_basis() {
  const double s = 1.0 / std::sqrt(2.0);
  auto scaled_sum = [](const Ket& u, const Ket& v, double c) {
    std::vector<Complex> amps(u.dim());
    for (std::size_t i = 0; i < u.dim(); ++i)
      amps[i] = c * (u.amplitudes[i] + v.amplitudes[i]);
    return Ket(std::move(amps));
  };
  Ket xi1 = scaled_sum(tensor(ket_zero(), ket_one()), tensor(ket_one(), ket_zero()), s);
  Ket xi2 = scaled_sum(tensor(ket_zero(), ket_minus()), tensor(ket_one(), ket_plus()), s);
  Ket xi3 = scaled_sum(tensor(ket_plus(), ket_one()), tensor(ket_minus(), ket_zero()), s);
  Ket xi4 = scaled_sum(tensor(ket_plus(), ket_minus()), tensor(ket_minus(), ket_plus()), s);
  return MeasurementBasis({xi1, xi2, xi3, xi4});
}

inline Ket single_prep(std::string_view label) {
  if (label == "0") return ket_zero();
  if (label == "+") return ket_plus();
  throw error("single_prep: unknown preparation label '" + std::string(label) + "'");
}

/// Two-system product preparation |x>|y>, x, y in {0, +}.
inline Ket product_prep(std::string_view x, std::string_view y) {
  return tensor(single_prep(x), single_prep(y));
}

/// Born probabilities |<xi_k|prep>|^2 for each basis outcome.
inline std::vector<double> born_row(const Ket& prep, const MeasurementBasis& basis) {
  if (prep.dim() != basis.dim()) throw error("born_row: dimension mismatch");
  std::vector<double> row;
  row.reserve(basis.size());
  for (const auto& xi : basis.kets) row.push_back(std::norm(inner(xi, prep)));
  return row;
}

struct OverlapCheck {
  bool within_bound = false;
  double magnitude = 0.0;  // |<phi|psi>|
};

/// True when |<phi|psi>| <= 1/sqrt2, the regime in which a 4-outcome
/// preclusion experiment exists for the four product preparations.
inline OverlapCheck pair_overlap_ok(const Ket& psi, const Ket& phi) {
  OverlapCheck c;
  c.magnitude = std::abs(inner(phi, psi));
  c.within_bound = c.magnitude <= 1.0 / std::sqrt(2.0) + tolerance::identity;
  return c;
}

}  // namespace ontic
