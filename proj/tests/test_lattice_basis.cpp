#include <doctest.h>

#include <numeric>

#include "emfreeze/lattice_basis.hpp"
#include "emfreeze/sparse_operators.hpp"

using namespace emfreeze;

namespace {

std::size_t binomial(int n, int k) {
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::size_t>(r + 0.5L);
}

}  // namespace

TEST_CASE("geometry indexing is a bijection") {
  const auto geo = LatticeGeometry::rectangle(4, 3);
  CHECK(geo.num_sites() == 12);
  for (int s = 0; s < geo.num_sites(); ++s) {
    const auto [x, y] = geo.coords(s);
    CHECK(geo.site(x, y) == s);
  }
  CHECK(geo.site(1, 2) == 9);
  CHECK_THROWS_AS(geo.site(4, 0), DomainError);
  CHECK_THROWS_AS(LatticeGeometry::chain(1), DomainError);
  CHECK_THROWS_AS(LatticeGeometry::rectangle(12, 11), DomainError);
}

TEST_CASE("basis sizes are binomial and lookups invert enumeration") {
  CHECK(enumerate_basis(LatticeGeometry::chain(2), 1)->states() == std::vector<Bitmask>{0b01, 0b10});
  CHECK(enumerate_basis(LatticeGeometry::chain(16), 8)->dim() == 12870);
  CHECK(enumerate_basis(LatticeGeometry::rectangle(4, 4), 3)->dim() == 560);
  for (int ns : {2, 5, 9, 20, 36}) {
    for (int n : {0, 1, ns / 3, ns / 2, ns - 1, ns}) {
      if (binomial(ns, n) > 200000) continue;
      const BasisPtr b = enumerate_basis(LatticeGeometry::chain(ns), n);
      REQUIRE(b->dim() == binomial(ns, n));
      for (std::size_t k = 0; k < b->dim(); ++k) {
        CHECK(popcount(b->state(k)) == n);
        if (k) CHECK(b->state(k - 1) < b->state(k));
        CHECK(b->index_of(b->state(k)) == k);
        CHECK(b->index_of_sorted(b->state(k)) == k);
      }
    }
  }
  CHECK_THROWS_AS(enumerate_basis(LatticeGeometry::chain(4), 5), DomainError);
  CHECK_THROWS_AS(enumerate_basis(LatticeGeometry::chain(4), -1), DomainError);
}

TEST_CASE("bitmasks above 64 sites") {
  const auto geo = LatticeGeometry::rectangle(10, 10);
  const BasisPtr b = enumerate_basis(geo, 2);
  CHECK(b->dim() == 4950);
  const Bitmask corners = occupation({0, 99});
  CHECK(popcount(corners) == 2);
  CHECK(test_bit(corners, 99));
  CHECK(countr_zero(occupation({70})) == 70);
  CHECK(b->index_of(corners).has_value());
  CHECK(b->state(b->dim() - 1) == occupation({98, 99}));
  CHECK_FALSE(b->index_of(occupation({0, 1, 2})).has_value());
}

TEST_CASE("hamming distance and distribution") {
  CHECK(hamming_distance(0b1010, 0b0101) == 4);
  CHECK(hamming_distance(0b1100, 0b1100) == 0);
  const BasisPtr b = enumerate_basis(LatticeGeometry::chain(4), 2);
  CVector amps = CVector::Constant(static_cast<Eigen::Index>(b->dim()), 1.0);
  const StateVector psi = StateVector::normalized(b, amps);
  const auto dist = hamming_distribution(psi, 0b0101);
  double total = 0.0;
  for (const auto& [d, w] : dist) {
    CHECK(w >= 0.0);
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // d = 0 once, d = 2 four times, d = 4 once among the six states.
  CHECK(dist[0].second == doctest::Approx(1.0 / 6));
  CHECK(dist[2].second == doctest::Approx(4.0 / 6));
  CHECK(dist[4].second == doctest::Approx(1.0 / 6));
}
