#include <doctest.h>

#include <cmath>

#include "emfreeze/emergent.hpp"
#include "emfreeze/linalg.hpp"
#include "emfreeze/models.hpp"
#include "oracles.hpp"

using namespace emfreeze;

namespace {

// H0 - i t H1 - t^2/2 H2 from the oracle commutators.
oracle::Dense oracle_truncation(const oracle::Nested& nc, const oracle::Dense& h0, double t,
                                int order) {
  oracle::Dense m = h0 - oracle::cplx(0.0, t) * nc.h1;
  if (order == 2) m -= 0.5 * t * t * nc.h2;
  return m;
}

}  // namespace

TEST_CASE("chain closed form matches the conjugation definition in every sector") {
  const int length = 6;
  const auto geo = LatticeGeometry::chain(length);
  for (int n : {1, 3}) {
    const BasisPtr basis = enumerate_basis(geo, n);
    const oracle::Dense hf = oracle::dense_operator(build_hf_chain(length), *basis);
    const oracle::Dense h0 = oracle::dense_operator(build_h0_chain(length), *basis);
    for (double t : {0.0, 0.4, 1.7, 3.0}) {
      const oracle::Dense u = oracle::expm_minus_i(hf, t);
      const oracle::Dense ref = u * h0 * u.adjoint();
      const oracle::Dense got = realize(exact_1d(length, t), basis).to_dense();
      CHECK(oracle::max_abs(got - ref) < 1e-11);
    }
  }
}

TEST_CASE("2D nearest-neighbour closed form agrees with the single-particle conjugation") {
  const auto geo = LatticeGeometry::rectangle(4, 3);
  const BasisPtr basis = enumerate_basis(geo, 1);
  const oracle::Dense hf = oracle::dense_operator(build_hf_rect_nn(4, 3), *basis);
  const oracle::Dense h0 = oracle::dense_operator(build_h0_rect(4, 3), *basis);
  for (double t : {0.3, 1.1, 2.5}) {
    const oracle::Dense u = oracle::expm_minus_i(hf, t);
    const oracle::Dense ref = u * h0 * u.adjoint();
    const Exact2dNN exact = exact_2d_nn(4, 3, t);
    CHECK(oracle::max_abs(exact.dense - ref) < 1e-11);
    CHECK(oracle::max_abs(realize(exact.hopping, basis).to_dense() - ref) < 1e-11);
  }
}

TEST_CASE("two-spin interacting closed form agrees with the conjugation definition") {
  for (auto [lx, ly] : {std::pair{4, 4}, std::pair{3, 5}}) {
    const CMatrix hf = build_two_spin_hf(lx, ly, true);
    const auto geo = LatticeGeometry::rectangle(lx, ly);
    const BasisPtr basis = enumerate_basis(geo, 1);
    const oracle::Dense h0 = oracle::dense_operator(build_h0_rect(lx, ly), *basis);
    for (double t : {0.2, 1.3, 4.0}) {
      const oracle::Dense u = oracle::expm_minus_i(hf, t);
      CHECK(oracle::max_abs(exact_2d_twospin_nnn(lx, ly, t) - u * h0 * u.adjoint()) < 1e-10);
    }
  }
}

TEST_CASE("unitary_exact matches the Pade exponential and is isospectral") {
  const auto geo = LatticeGeometry::rectangle(3, 3);
  const BasisPtr basis = enumerate_basis(geo, 2);
  const SparseHermitian hf = realize(build_hf_rect_nnn(3, 3, 0.4), basis);
  const SparseHermitian h0 = realize(build_h0_rect(3, 3), basis);
  const UnitaryConjugator conj(hf.to_dense(), h0.to_dense());
  const RVector ref_spec = linalg::eigvalsh(h0.to_dense());
  for (double t : {0.0, 0.7, 9.0}) {
    const oracle::Dense u = oracle::expm_minus_i(hf.to_dense(), t);
    const CMatrix m = conj.at(t);
    CHECK(oracle::max_abs(m - u * h0.to_dense() * u.adjoint()) < 1e-10);
    CHECK((linalg::eigvalsh(m) - ref_spec).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(oracle::max_abs(unitary_exact(hf, h0, t) - m) < 1e-12);
  }
}

TEST_CASE("unitary_exact refuses dimensions above the dense cap") {
  const BasisPtr basis = enumerate_basis(LatticeGeometry::chain(8), 4);
  const SparseHermitian hf = realize(build_hf_chain(8), basis);
  const SparseHermitian h0 = realize(build_h0_chain(8), basis);
  CHECK_THROWS_AS(unitary_exact(hf, h0, 1.0, 10), CapacityError);
}

TEST_CASE("numeric truncations equal oracle nested commutators") {
  const auto geo = LatticeGeometry::rectangle(3, 3);
  const BasisPtr basis = enumerate_basis(geo, 2);
  const TermSpec hf = build_hf_rect_nnn(3, 3, 0.6);
  const TermSpec h0 = build_h0_rect(3, 3);
  const oracle::Nested nc = oracle::nested_commutators(hf, h0, *basis);
  const oracle::Dense h0d = oracle::dense_operator(h0, *basis);
  const CommutatorSeries series(realize(hf, basis), realize(h0, basis));
  for (int order : {1, 2}) {
    for (double t : {0.1, 0.8}) {
      const oracle::Dense ref = oracle_truncation(nc, h0d, t, order);
      CHECK(oracle::max_abs(series.at(t, order).to_dense() - ref) < 1e-11);
      const CVector v = CVector::LinSpaced(static_cast<Eigen::Index>(basis->dim()), 0.0, 1.0);
      CHECK((series.apply(t, order, v) - ref * v).norm() < 1e-10);
    }
  }
}

TEST_CASE("closed-form truncations equal oracle nested commutators") {
  struct Case {
    int lx, ly, n;
  };
  for (const Case c : {Case{4, 4, 2}, Case{4, 4, 3}, Case{3, 5, 2}}) {
    CAPTURE(c.lx);
    CAPTURE(c.ly);
    CAPTURE(c.n);
    const BasisPtr basis = enumerate_basis(LatticeGeometry::rectangle(c.lx, c.ly), c.n);
    const TermSpec h0 = build_h0_rect(c.lx, c.ly);
    const oracle::Dense h0d = oracle::dense_operator(h0, *basis);
    const oracle::Nested nn = oracle::nested_commutators(build_hf_rect_nn(c.lx, c.ly), h0, *basis);
    const double t = 0.37;
    for (int order : {1, 2}) {
      CAPTURE(order);
      const CMatrix got = realize(trunc_appendix_nn(c.lx, c.ly, t, order), basis).to_dense();
      CHECK(oracle::max_abs(got - oracle_truncation(nn, h0d, t, order)) < 1e-10);
    }
    const double jx = 0.6;
    const oracle::Nested nnn =
        oracle::nested_commutators(build_hf_rect_nnn(c.lx, c.ly, jx), h0, *basis);
    const CMatrix got = realize(trunc_appendix_nnn(c.lx, c.ly, jx, t), basis).to_dense();
    CHECK(oracle::max_abs(got - oracle_truncation(nnn, h0d, t, 1)) < 1e-10);
  }
}

TEST_CASE("spin-promoted operator is the single-particle exact form in one-particle sectors") {
  const BasisPtr basis = enumerate_basis(LatticeGeometry::rectangle(4, 4), 1);
  const double t = 0.9;
  CHECK(oracle::max_abs(spin_promoted(4, 4, t, basis).to_dense() - exact_2d_nn(4, 4, t).dense) <
        1e-12);
}

TEST_CASE("emergent tags round-trip through their names") {
  for (EmergentTag tag :
       {EmergentTag::Exact1D, EmergentTag::Exact2D_NN, EmergentTag::Exact2D_TwoSpinNNN,
        EmergentTag::UnitaryExact, EmergentTag::Trunc1, EmergentTag::Trunc2,
        EmergentTag::Trunc1_Appendix, EmergentTag::Trunc2_Appendix,
        EmergentTag::Trunc1_NNN_Appendix, EmergentTag::SpinPromoted, EmergentTag::OAT}) {
    CHECK(parse_emergent_tag(to_string(tag)) == tag);
  }
  CHECK_FALSE(parse_emergent_tag("Trunc3").has_value());
}

TEST_CASE("single-excitation closed forms reject many-particle bases") {
  const BasisPtr basis = enumerate_basis(LatticeGeometry::rectangle(3, 3), 2);
  EmergentVariant v{EmergentTag::Exact2D_NN, 1.0};
  CHECK_THROWS_AS(build_emergent(v, basis), DomainError);
}
