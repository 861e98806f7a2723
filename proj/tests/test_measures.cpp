#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ontic/measures.hpp"

using namespace ontic;

namespace {

Distribution random_distribution(const OnticSpacePtr& space, std::mt19937_64& rng,
                                 double sparsity = 0.0) {
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

}  // namespace

TEST_CASE("distance functionals on hand-evaluated pairs", "[measures]") {
  auto space = make_space({"l", "r"});
  Distribution p(space, {0.5, 0.5});
  Distribution q(space, {1.0, 0.0});
  Distribution r(space, {0.0, 1.0});

  CHECK(total_variation(p, p) == 0.0);
  CHECK(total_variation(q, r) == 1.0);
  CHECK(total_variation(p, q) == Catch::Approx(0.5).margin(1e-15));

  CHECK(overlap(p, p) == Catch::Approx(1.0).margin(1e-15));
  CHECK(overlap(q, r) == 0.0);
  CHECK(overlap(p, q) == Catch::Approx(0.5).margin(1e-15));

  CHECK(hellinger(p, p) == 0.0);
  CHECK(hellinger(q, r) == Catch::Approx(1.0).margin(1e-15));
  CHECK(hellinger(p, q) * hellinger(p, q) ==
        Catch::Approx(1.0 - std::sqrt(0.5)).margin(1e-15));

  CHECK(fidelity(p, p) == Catch::Approx(1.0).margin(1e-15));
  CHECK(fidelity(q, r) == 0.0);
  CHECK(fidelity(p, q) == Catch::Approx(std::sqrt(0.5)).margin(1e-15));
}

TEST_CASE("distinct spaces are rejected", "[measures]") {
  auto s1 = make_space({"a", "b"});
  auto s2 = make_space({"a", "c"});
  Distribution p(s1, {0.5, 0.5});
  Distribution q(s2, {0.5, 0.5});
  CHECK_THROWS_AS(total_variation(p, q), error);
  CHECK_THROWS_AS(overlap(p, q), error);
  CHECK_THROWS_AS(hellinger(p, q), error);
  CHECK_THROWS_AS(fidelity(p, q), error);
  CHECK_THROWS_AS(inequality_chain(p, q), error);

  // Structurally equal spaces are interchangeable.
  auto s1_copy = make_space({"a", "b"});
  Distribution q2(s1_copy, {1.0, 0.0});
  CHECK(total_variation(p, q2) == Catch::Approx(0.5));
}

TEST_CASE("construction invariants", "[measures]") {
  CHECK_THROWS_AS(make_space({"a", "a"}), error);
  CHECK_THROWS_AS(make_space({"a", "b"}, {1.0, 0.0}), error);
  CHECK_THROWS_AS(make_space({"a", "b"}, {1.0, -1.0}), error);

  auto space = make_space({"a", "b"});
  CHECK_THROWS_AS(Distribution(space, {0.5, -0.5}), error);
  CHECK_THROWS_AS(Distribution(space, {0.5, 0.4}), error);
  CHECK_THROWS_AS(Distribution(space, {0.5}), error);
  // Sloppiness below the construction tolerance is accepted.
  CHECK_NOTHROW(Distribution(space, {0.5, 0.5 + 5e-10}));
}

TEST_CASE("inequality chain endpoints", "[measures]") {
  auto space = make_space(4);
  Distribution u(space, std::vector<double>(4, 0.25));
  auto same = inequality_chain(u, u);
  CHECK(same.omega == Catch::Approx(1.0).margin(1e-15));
  CHECK(same.fidelity == Catch::Approx(1.0).margin(1e-15));
  CHECK(same.l2_bound == Catch::Approx(1.0).margin(1e-15));
  CHECK(same.holds);

  auto two = make_space(2);
  Distribution a(two, {1.0, 0.0});
  Distribution b(two, {0.0, 1.0});
  auto disjoint = inequality_chain(a, b);
  CHECK(disjoint.omega == 0.0);
  CHECK(disjoint.fidelity == 0.0);
  CHECK(disjoint.l2_bound == 0.0);
  CHECK(disjoint.delta == 1.0);
  CHECK(disjoint.holds);
}

TEST_CASE("inequality chain holds on random pairs", "[measures]") {
  std::mt19937_64 rng(20240811);
  auto space = make_space(8);
  for (int i = 0; i < 1000; ++i) {
    auto p = random_distribution(space, rng, 0.2);
    auto q = random_distribution(space, rng, 0.2);
    auto chain = inequality_chain(p, q);
    INFO("pair " << i);
    REQUIRE(chain.holds);
  }
}

TEST_CASE("functional identities and symmetry", "[measures]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> wgen(0.2, 3.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t n = 2 + rep % 7;
    std::vector<std::string> atoms;
    std::vector<double> weights;
    for (std::size_t i = 0; i < n; ++i) {
      atoms.push_back("a" + std::to_string(i));
      weights.push_back(wgen(rng));
    }
    auto space = make_space(atoms, weights);
    auto p = random_distribution(space, rng, 0.3);
    auto q = random_distribution(space, rng, 0.3);

    CHECK(overlap(p, q) + total_variation(p, q) == Catch::Approx(1.0).margin(1e-12));
    double h = hellinger(p, q);
    CHECK(fidelity(p, q) == Catch::Approx(1.0 - h * h).margin(1e-12));

    CHECK(total_variation(p, q) == total_variation(q, p));
    CHECK(overlap(p, q) == overlap(q, p));
    CHECK(hellinger(p, q) == hellinger(q, p));
    CHECK(fidelity(p, q) == fidelity(q, p));
  }
}

TEST_CASE("values are invariant under a change of base measure", "[measures]") {
  std::mt19937_64 rng(99);
  auto space = make_space(6);
  auto p = random_distribution(space, rng, 0.2);
  auto q = random_distribution(space, rng, 0.2);

  // Re-express the same probability measures against rescaled base weights.
  std::uniform_real_distribution<double> cgen(0.25, 4.0);
  std::vector<double> new_weights(space->size());
  std::vector<double> scale(space->size());
  for (std::size_t i = 0; i < space->size(); ++i) {
    scale[i] = cgen(rng);
    new_weights[i] = space->weight(i) * scale[i];
  }
  auto rescaled_space = make_space(space->labels(), new_weights);
  auto rescale = [&](const Distribution& d) {
    std::vector<double> dens(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) dens[i] = d.density(i) / scale[i];
    return Distribution(rescaled_space, dens);
  };
  auto p2 = rescale(p), q2 = rescale(q);

  CHECK(total_variation(p2, q2) == Catch::Approx(total_variation(p, q)).margin(1e-12));
  CHECK(overlap(p2, q2) == Catch::Approx(overlap(p, q)).margin(1e-12));
  CHECK(hellinger(p2, q2) == Catch::Approx(hellinger(p, q)).margin(1e-12));
  CHECK(fidelity(p2, q2) == Catch::Approx(fidelity(p, q)).margin(1e-12));
}

TEST_CASE("product spaces and outer products", "[measures]") {
  auto sa = make_space({"u0", "u1"});
  auto sb = make_space({"v0", "v1", "v2"});
  auto prod = product_space(sa, sb);
  REQUIRE(prod->size() == 6);
  CHECK(prod->label(0) == "(u0,v0)");
  CHECK(prod->label(5) == "(u1,v2)");
  auto parts = parse_product_label(prod->label(4));
  REQUIRE(parts);
  CHECK(parts->first == "u1");
  CHECK(parts->second == "v1");
  CHECK_FALSE(parse_product_label("plain"));

  Distribution a(sa, {0.25, 0.75});
  Distribution b(sb, {0.5, 0.5, 0.0});
  auto joint = outer_product(a, b, prod);
  CHECK(joint.density(0) == Catch::Approx(0.125));
  CHECK(joint.density(3) == Catch::Approx(0.375));
  CHECK(joint.density(2) == 0.0);
}
