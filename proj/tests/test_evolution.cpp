#include <doctest.h>

#include "emfreeze/emergent.hpp"
#include "emfreeze/evolution.hpp"
#include "emfreeze/models.hpp"
#include "emfreeze/observables.hpp"
#include "oracles.hpp"

using namespace emfreeze;

TEST_CASE("dense propagation matches the Pade exponential") {
  const BasisPtr b = enumerate_basis(LatticeGeometry::chain(6), 3);
  const SparseHermitian hf = realize(build_hf_chain(6), b);
  const StateVector psi0 = StateVector::product(b, density_wave(6));
  const Propagator p = Propagator::dense(hf);
  for (double t : {0.3, 1.0, 7.5}) {
    const CVector ref = oracle::expm_minus_i(hf.to_dense(), t) * psi0.amplitudes();
    CHECK((p.propagate(psi0.amplitudes(), t) - ref).norm() < 1e-11);
  }
}

TEST_CASE("Krylov and dense agree on 6x6 with two particles") {
  const BasisPtr b = enumerate_basis(LatticeGeometry::rectangle(6, 6), 2);
  const SparseHermitian hf = realize(build_hf_rect_nnn(6, 6, 0.3), b);
  const StateVector psi0 = StateVector::product(b, two_corners(b->geometry()));
  const std::vector<double> times{0.1, 0.9, 2.5, 6.0};
  const auto dense = Propagator::dense(hf).propagate_series(psi0, times);
  const auto krylov = Propagator::krylov(hf).propagate_series(psi0, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(std::abs(dense[k].amplitudes().dot(krylov[k].amplitudes())) > 1 - 1e-8);
    CHECK(std::abs(krylov[k].amplitudes().norm() - 1.0) < 1e-9);
  }
  CHECK(Propagator::automatic(hf).method() == Propagator::Method::DenseEigen);
  CHECK(Propagator::automatic(hf, 100).method() == Propagator::Method::KrylovExpm);
}

TEST_CASE("energy is conserved along the generator") {
  const BasisPtr b = enumerate_basis(LatticeGeometry::chain(12), 6);
  const SparseHermitian hf = realize(build_hf_chain(12), b);
  CVector mix = StateVector::product(b, density_wave(12)).amplitudes() +
                0.5 * StateVector::product(b, domain_wall(12)).amplitudes();
  const StateVector psi0 = StateVector::normalized(b, mix);
  const double e0 = expectation(hf, psi0);
  for (const auto& psi : Propagator::krylov(hf).propagate_series(psi0, {0.5, 2.0, 9.0})) {
    CHECK(std::abs(expectation(hf, psi) - e0) < 1e-9);
  }
}

TEST_CASE("chain dynamics has period 2pi and flips at pi") {
  const BasisPtr b = enumerate_basis(LatticeGeometry::chain(8), 4);
  const SparseHermitian hf = realize(build_hf_chain(8), b);
  const StateVector psi0 = StateVector::product(b, density_wave(8));
  for (const auto& p : {Propagator::dense(hf), Propagator::krylov(hf)}) {
    const auto s = p.propagate_series(psi0, {kPi, 2 * kPi});
    CHECK(fidelity(s[0], StateVector::product(b, occupation({1, 3, 5, 7}))) > 1 - 1e-8);
    CHECK(hamming_distribution(s[0], density_wave(8))[8].second > 1 - 1e-8);
    CHECK(std::abs(psi0.amplitudes().dot(s[1].amplitudes())) > 1 - 1e-8);
  }
}

TEST_CASE("freeze under exact variants keeps the state") {
  const BasisPtr b = enumerate_basis(LatticeGeometry::chain(8), 4);
  const SparseHermitian hf = realize(build_hf_chain(8), b);
  const StateVector psi0 = StateVector::product(b, density_wave(8));
  for (EmergentTag tag : {EmergentTag::Exact1D, EmergentTag::UnitaryExact}) {
    const double tf = 1.234;
    const FreezeTrajectory tr = run_freeze(psi0, {hf, EmergentVariant{tag, tf}, tf, {1.0, 5.0, 10.0, 50.0}});
    for (const StateVector& s : tr.post) {
      CHECK(std::abs(tr.at_freeze.amplitudes().dot(s.amplitudes())) > 1 - 1e-9);
    }
  }
  CHECK_THROWS_AS(run_freeze(psi0, {hf, EmergentVariant{EmergentTag::Exact1D, 1.0}, 2.0, {1.0}}),
                  DomainError);
  CHECK_THROWS_AS(Propagator::dense(hf).propagate_series(psi0, {1.0, 0.5}), DomainError);
}

TEST_CASE("two-spin interacting recurrence follows the parity rule") {
  // odd x odd returns at 2pi, otherwise at 4pi
  for (auto [lx, ly, period] : {std::tuple{5, 5, 2 * kPi}, std::tuple{3, 5, 2 * kPi},
                                std::tuple{4, 4, 4 * kPi}, std::tuple{4, 3, 4 * kPi}}) {
    const auto geo = LatticeGeometry::rectangle(lx, ly);
    const BasisPtr b = enumerate_basis(geo, 1);
    const StateVector psi0 = StateVector::product(b, single_corner(geo));
    const Propagator p = Propagator::dense(build_two_spin_hf(lx, ly, true));
    CHECK(std::abs(psi0.amplitudes().dot(p.propagate(psi0, period).amplitudes())) > 1 - 1e-8);
  }
}

TEST_CASE("Bloch trajectory starts at the maximal corner spin") {
  const auto geo = LatticeGeometry::rectangle(4, 3);
  const BasisPtr b = enumerate_basis(geo, 1);
  const StateVector psi0 = StateVector::product(b, single_corner(geo));
  const auto traj = bloch_trajectory({psi0}, 4, 3);
  CHECK(traj[0][2] == doctest::Approx(1.5));
  CHECK(traj[0][5] == doctest::Approx(1.0));
  CHECK(traj[0][0] == doctest::Approx(0.0));
  const SparseHermitian hf = realize(build_hf_rect_nn(4, 3), b);
  const auto flip = bloch_trajectory({Propagator::dense(hf).propagate(psi0, kPi)}, 4, 3);
  CHECK(flip[0][2] == doctest::Approx(-1.5));
  CHECK(flip[0][5] == doctest::Approx(-1.0));
  CHECK_THROWS_AS(bloch_trajectory({psi0}, 3, 4), DomainError);
}
