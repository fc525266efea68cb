#include "emfreeze/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <Eigen/SVD>

namespace emfreeze {

namespace {

// Packs the bits of `state` at the listed sites into a dense integer.
Bitmask compress(Bitmask state, const std::vector<int>& sites) {
  Bitmask out = 0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    if (test_bit(state, sites[k])) out |= Bitmask{1} << k;
  }
  return out;
}

double binary_entropy_term(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

void require_same_basis(const StateVector& a, const StateVector& b) {
  if (!(*a.basis() == *b.basis())) throw BasisMismatch("states live in different bases");
}

}  // namespace

Bipartition::Bipartition(LatticeGeometry geometry, std::vector<int> subset_a)
    : geometry_(geometry), a_(std::move(subset_a)) {
  std::sort(a_.begin(), a_.end());
  if (std::adjacent_find(a_.begin(), a_.end()) != a_.end()) {
    throw DomainError("bipartition lists a site twice");
  }
  const int n = geometry_.num_sites();
  if (a_.empty() || static_cast<int>(a_.size()) >= n) {
    throw DomainError("subset A must be a non-empty proper subset");
  }
  if (a_.front() < 0 || a_.back() >= n) throw DomainError("bipartition site out of range");
  for (int s = 0, k = 0; s < n; ++s) {
    if (k < static_cast<int>(a_.size()) && a_[k] == s) {
      ++k;
    } else {
      b_.push_back(s);
    }
  }
}

Bipartition Bipartition::half_chain(const LatticeGeometry& geometry) {
  if (geometry.kind() != LatticeGeometry::Kind::chain) throw DomainError("half_chain needs a chain");
  std::vector<int> a((geometry.num_sites() + 1) / 2);
  std::iota(a.begin(), a.end(), 0);
  return Bipartition(geometry, std::move(a));
}

Bipartition Bipartition::bottom_half(const LatticeGeometry& geometry) {
  if (geometry.kind() != LatticeGeometry::Kind::rectangle) {
    throw DomainError("bottom_half needs a rectangle");
  }
  std::vector<int> a;
  for (int y = 0; y < (geometry.ly() + 1) / 2; ++y) {
    for (int x = 0; x < geometry.lx(); ++x) a.push_back(geometry.site(x, y));
  }
  return Bipartition(geometry, std::move(a));
}

Bipartition Bipartition::half(const LatticeGeometry& geometry) {
  return geometry.kind() == LatticeGeometry::Kind::chain ? half_chain(geometry)
                                                         : bottom_half(geometry);
}

std::vector<double> schmidt_spectrum(const StateVector& psi, const Bipartition& part,
                                     double cutoff) {
  const FockBasis& basis = *psi.basis();
  if (!(basis.geometry() == part.geometry())) {
    throw BasisMismatch("bipartition geometry differs from the state's lattice");
  }

  // One amplitude block per particle number in A; rows are A configurations,
  // columns B configurations.
  struct Block {
    std::unordered_map<Bitmask, Eigen::Index, BitmaskHash> rows, cols;
    std::vector<std::tuple<Eigen::Index, Eigen::Index, cplx>> entries;
  };
  std::map<int, Block> blocks;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const cplx amp = psi[k];
    if (amp == cplx{}) continue;
    const Bitmask a = compress(basis.state(k), part.a());
    const Bitmask b = compress(basis.state(k), part.b());
    Block& blk = blocks[popcount(a)];
    const auto r = blk.rows.try_emplace(a, static_cast<Eigen::Index>(blk.rows.size())).first->second;
    const auto c = blk.cols.try_emplace(b, static_cast<Eigen::Index>(blk.cols.size())).first->second;
    blk.entries.emplace_back(r, c, amp);
  }

  std::vector<double> out;
  for (const auto& [n_a, blk] : blocks) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(blk.rows.size()),
                              static_cast<Eigen::Index>(blk.cols.size()));
    for (const auto& [r, c, amp] : blk.entries) m(r, c) = amp;
    const Eigen::BDCSVD<CMatrix> svd(m);
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
      const double sv = svd.singularValues()(k);
      if (sv > cutoff) out.push_back(sv);
    }
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double entropy_schmidt(const StateVector& psi, const Bipartition& part) {
  double s = 0.0;
  for (double lambda : schmidt_spectrum(psi, part, 0.0)) s += binary_entropy_term(lambda * lambda);
  return s;
}

double entropy_freefermion_1d(const CMatrix& orbitals, const Bipartition& part) {
  const LatticeGeometry& geo = part.geometry();
  if (geo.kind() != LatticeGeometry::Kind::chain) {
    throw DomainError("free-fermion entropy is only defined here for chains");
  }
  if (orbitals.rows() != geo.num_sites()) throw BasisMismatch("orbital length differs from L");
  const CMatrix gram = orbitals.adjoint() * orbitals;
  if ((gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericalError("orbitals are not orthonormal");
  }
  const std::vector<int>& a = part.a();
  if (a.back() - a.front() + 1 != static_cast<int>(a.size())) {
    throw DomainError("free-fermion entropy needs a contiguous block");
  }

  const CMatrix phi_a = orbitals.middleRows(a.front(), static_cast<Eigen::Index>(a.size()));
  const CMatrix corr = phi_a * phi_a.adjoint();
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(corr, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    const double nu = std::clamp(eig.eigenvalues()(k), 0.0, 1.0);
    s += binary_entropy_term(nu) + binary_entropy_term(1.0 - nu);
  }
  return s;
}

CMatrix single_particle_matrix(const TermSpec& spec, int num_sites) {
  CMatrix h = CMatrix::Zero(num_sites, num_sites);
  auto check = [num_sites](int s) {
    if (s < 0 || s >= num_sites) throw DomainError("site index out of range");
  };
  for (const Term& term : spec.terms) {
    if (const auto* hop = std::get_if<Hop>(&term)) {
      check(hop->i);
      check(hop->j);
      h(hop->i, hop->j) += hop->amp;
      h(hop->j, hop->i) += std::conj(hop->amp);
    } else if (const auto* den = std::get_if<Density>(&term)) {
      check(den->i);
      h(den->i, den->i) += den->w;
    } else if (std::holds_alternative<AssistedHop>(term)) {
      throw DomainError("density-assisted hopping has no one-body matrix");
    }
  }
  return h;
}

CMatrix occupied_orbitals(Bitmask occupied, int num_sites) {
  CMatrix out = CMatrix::Zero(num_sites, popcount(occupied));
  Eigen::Index col = 0;
  for (int s = 0; s < num_sites; ++s) {
    if (test_bit(occupied, s)) out(s, col++) = 1.0;
  }
  return out;
}

CMatrix evolve_orbitals(const CMatrix& h, const CMatrix& orbitals, double t) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  CVector phases(eig.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(-kI * (eig.eigenvalues()(k) * t));
  return eig.eigenvectors() * phases.asDiagonal() * (eig.eigenvectors().adjoint() * orbitals);
}

StateVector bell_product_state(int length, cplx relative_phase) {
  if (length < 2 || length % 2 != 0) throw DomainError("Bell product state needs an even length");
  const int pairs = length / 2;
  if (pairs > 30) throw CapacityError("Bell product state too large");
  const BasisPtr basis = enumerate_basis(LatticeGeometry::chain(length), pairs);
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(basis->dim()));
  const double weight = std::pow(0.5, 0.5 * pairs);
  for (std::uint64_t choice = 0; choice < (std::uint64_t{1} << pairs); ++choice) {
    // Bit l of `choice` set: the pair (l, L-1-l) holds its particle on the right.
    Bitmask state = 0;
    for (int l = 0; l < pairs; ++l) {
      state |= Bitmask{1} << (((choice >> l) & 1U) ? length - 1 - l : l);
    }
    cplx phase = 1.0;
    for (int k = 0; k < std::popcount(choice); ++k) phase *= relative_phase;
    amps(static_cast<Eigen::Index>(*basis->index_of(state))) = phase * weight;
  }
  return StateVector::normalized(basis, amps);
}

double overlap_metric(const LinearOperator& m, const StateVector& psi) {
  if (m.dim() != static_cast<Eigen::Index>(psi.dim())) {
    throw BasisMismatch("operator and state dimensions differ");
  }
  return overlap_from_action(m * psi.amplitudes(), psi);
}

double overlap_from_action(const CVector& m_psi, const StateVector& psi) {
  if (m_psi.size() != static_cast<Eigen::Index>(psi.dim())) {
    throw BasisMismatch("operator and state dimensions differ");
  }
  const double denom = m_psi.norm();
  if (denom < 1e-14) throw DegenerateMetricError("‖M psi‖ vanishes; overlap undefined");
  return psi.amplitudes().dot(m_psi).real() / denom;
}

double fidelity(const StateVector& psi, const StateVector& phi) {
  require_same_basis(psi, phi);
  return std::norm(phi.amplitudes().dot(psi.amplitudes()));
}

std::vector<double> site_densities(const StateVector& psi) {
  const FockBasis& basis = *psi.basis();
  std::vector<double> out(static_cast<std::size_t>(basis.num_sites()), 0.0);
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const double p = std::norm(psi[k]);
    for (Bitmask b = basis.state(k); b != 0; b &= b - 1) out[countr_zero(b)] += p;
  }
  return out;
}

Bitmask density_wave(int length) {
  if (length < 1 || length > kMaxSites) throw DomainError("chain length out of range");
  Bitmask b = 0;
  for (int l = 0; l < length; l += 2) b |= Bitmask{1} << l;
  return b;
}

Bitmask domain_wall(int length) {
  if (length < 1 || length > kMaxSites) throw DomainError("chain length out of range");
  Bitmask b = 0;
  for (int l = 0; l < length / 2; ++l) b |= Bitmask{1} << l;
  return b;
}

Bitmask single_corner(const LatticeGeometry& geometry) {
  return occupation({geometry.site(0, 0)});
}

Bitmask two_corners(const LatticeGeometry& geometry) {
  return occupation({geometry.site(0, 0), geometry.site(geometry.lx() - 1, geometry.ly() - 1)});
}

Bitmask three_corner_cluster(const LatticeGeometry& geometry) {
  if (geometry.lx() < 2 || geometry.ly() < 2) throw DomainError("corner cluster needs a 2x2 corner");
  return occupation({geometry.site(0, 0), geometry.site(1, 0), geometry.site(0, 1)});
}

}  // namespace emfreeze
