#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ontic/quantum.hpp"

using namespace ontic;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("tensor products of computational states", "[quantum]") {
  auto zz = tensor(ket_zero(), ket_zero());
  REQUIRE(zz.dim() == 4);
  CHECK(zz.amplitudes[0] == Complex{1.0, 0.0});
  CHECK(zz.amplitudes[1] == Complex{0.0, 0.0});

  auto zo = tensor(ket_zero(), ket_one());
  CHECK(zo.amplitudes[1] == Complex{1.0, 0.0});
  CHECK(zo.amplitudes[0] == Complex{0.0, 0.0});

  auto pp = tensor(ket_plus(), ket_plus());
  for (const auto& a : pp.amplitudes) CHECK(a.real() == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("the preclusion basis is orthonormal", "[quantum]") {
  auto basis = pbr_basis();
  REQUIRE(basis.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double expected = i == j ? 1.0 : 0.0;
      CHECK(std::abs(inner(basis.kets[i], basis.kets[j])) ==
            Catch::Approx(expected).margin(1e-12));
    }
  // xi1 in the |00>,|01>,|10>,|11> ordering.
  CHECK(basis.kets[0].amplitudes[0].real() == Catch::Approx(0.0).margin(1e-15));
  CHECK(basis.kets[0].amplitudes[1].real() == Catch::Approx(kInvSqrt2).margin(1e-15));
  CHECK(basis.kets[0].amplitudes[2].real() == Catch::Approx(kInvSqrt2).margin(1e-15));
  CHECK(basis.kets[0].amplitudes[3].real() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("product preparations", "[quantum]") {
  auto p00 = product_prep("0", "0");
  CHECK(p00.amplitudes[0].real() == 1.0);

  auto p0p = product_prep("0", "+");
  CHECK(p0p.amplitudes[0].real() == Catch::Approx(kInvSqrt2).margin(1e-15));
  CHECK(p0p.amplitudes[1].real() == Catch::Approx(kInvSqrt2).margin(1e-15));
  CHECK(std::abs(p0p.amplitudes[2]) == 0.0);

  auto ppp = product_prep("+", "+");
  for (const auto& a : ppp.amplitudes) CHECK(a.real() == Catch::Approx(0.5).margin(1e-15));

  CHECK_THROWS_AS(product_prep("1", "0"), error);
}

TEST_CASE("Born rows for the four preparations", "[quantum]") {
  auto basis = pbr_basis();
  struct Row {
    const char* x;
    const char* y;
    std::array<double, 4> expected;
    int zero_at;
  };
  const Row rows[] = {
      {"0", "0", {0.0, 0.25, 0.25, 0.5}, 0},
      {"0", "+", {0.25, 0.0, 0.5, 0.25}, 1},
      {"+", "0", {0.25, 0.5, 0.0, 0.25}, 2},
      {"+", "+", {0.5, 0.25, 0.25, 0.0}, 3},
  };
  for (const auto& row : rows) {
    auto born = born_row(product_prep(row.x, row.y), basis);
    REQUIRE(born.size() == 4);
    // The precluded outcome has probability exactly zero.
    CHECK(born[static_cast<std::size_t>(row.zero_at)] == 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(born[k] == Catch::Approx(row.expected[k]).margin(1e-12));
      CHECK(born[k] >= 0.0);
      total += born[k];
    }
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("each outcome is precluded by exactly one preparation", "[quantum]") {
  auto basis = pbr_basis();
  const char* labels[] = {"0", "+"};
  int zeros_per_row[4] = {0, 0, 0, 0};
  int zeros_per_col[4] = {0, 0, 0, 0};
  int row = 0;
  for (const char* x : labels)
    for (const char* y : labels) {
      auto born = born_row(product_prep(x, y), basis);
      for (int k = 0; k < 4; ++k)
        if (born[static_cast<std::size_t>(k)] <= 1e-12) {
          ++zeros_per_row[row];
          ++zeros_per_col[k];
        }
      ++row;
    }
  for (int i = 0; i < 4; ++i) {
    CHECK(zeros_per_row[i] == 1);
    CHECK(zeros_per_col[i] == 1);
  }
}

TEST_CASE("overlap bound check", "[quantum]") {
  auto c01 = pair_overlap_ok(ket_zero(), ket_one());
  CHECK(c01.within_bound);
  CHECK(c01.magnitude == 0.0);

  auto c0p = pair_overlap_ok(ket_zero(), ket_plus());
  CHECK(c0p.within_bound);
  CHECK(c0p.magnitude == Catch::Approx(kInvSqrt2).margin(1e-15));

  auto c00 = pair_overlap_ok(ket_zero(), ket_zero());
  CHECK_FALSE(c00.within_bound);
  CHECK(c00.magnitude == 1.0);

  CHECK_THROWS_AS(pair_overlap_ok(ket_zero(), product_prep("0", "0")), error);
}

TEST_CASE("ket invariants", "[quantum]") {
  CHECK_THROWS_AS(Ket({{0.5, 0.0}, {0.5, 0.0}}), error);
  CHECK_THROWS_AS(born_row(ket_zero(), pbr_basis()), error);
  CHECK_THROWS_AS(MeasurementBasis({ket_zero(), ket_zero()}), error);
}
