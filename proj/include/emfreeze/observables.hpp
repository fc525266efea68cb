#pragma once

#include <vector>

#include "emfreeze/common.hpp"
#include "emfreeze/lattice_basis.hpp"
#include "emfreeze/linear_operator.hpp"
#include "emfreeze/sparse_operators.hpp"

namespace emfreeze {

/// Site subset A and its complement B on a lattice.
class Bipartition {
 public:
  /// Throws DomainError unless A is a non-empty proper subset of the lattice.
  Bipartition(LatticeGeometry geometry, std::vector<int> subset_a);

  /// First ceil(L/2) sites of a chain.
  static Bipartition half_chain(const LatticeGeometry& geometry);
  /// Rows y < ceil(Ly/2) of a rectangle.
  static Bipartition bottom_half(const LatticeGeometry& geometry);
  /// half_chain or bottom_half depending on the geometry.
  static Bipartition half(const LatticeGeometry& geometry);

  const LatticeGeometry& geometry() const noexcept { return geometry_; }
  const std::vector<int>& a() const noexcept { return a_; }
  const std::vector<int>& b() const noexcept { return b_; }
  Bipartition swapped() const { return Bipartition(geometry_, b_); }

 private:
  LatticeGeometry geometry_;
  std::vector<int> a_;
  std::vector<int> b_;
};

/// Schmidt coefficients in descending order, zeros (below cutoff) dropped.
std::vector<double> schmidt_spectrum(const StateVector& psi, const Bipartition& part,
                                     double cutoff = 1e-12);

/// -sum lambda^2 log2 lambda^2
double entropy_schmidt(const StateVector& psi, const Bipartition& part);

/// Entanglement entropy of a Slater determinant (columns of `orbitals` are the
/// occupied single-particle modes) for a contiguous block of a chain.
double entropy_freefermion_1d(const CMatrix& orbitals, const Bipartition& part);

/// One-body matrix of a term list built only from Hop and Density terms.
CMatrix single_particle_matrix(const TermSpec& spec, int num_sites);
/// One orbital per occupied site.
CMatrix occupied_orbitals(Bitmask occupied, int num_sites);
/// exp(-i h t) applied to each orbital.
CMatrix evolve_orbitals(const CMatrix& h, const CMatrix& orbitals, double t);

/// prod_l (|1>_l |0>_{L-1-l} + phase |0>_l |1>_{L-1-l}) / sqrt 2 over l < L/2.
/// The default phase -i is the density wave evolved to t = pi/2 under the
/// transfer chain; +i is the same state at 3 pi / 2.
StateVector bell_product_state(int length, cplx relative_phase = -kI);

/// <psi|M|psi> / ‖M psi‖. Throws DegenerateMetricError when ‖M psi‖ vanishes.
double overlap_metric(const LinearOperator& m, const StateVector& psi);
/// Same metric from a precomputed M|psi>.
double overlap_from_action(const CVector& m_psi, const StateVector& psi);

/// |<phi|psi>|^2
double fidelity(const StateVector& psi, const StateVector& phi);

/// <n_l> for every site.
std::vector<double> site_densities(const StateVector& psi);

// Initial product states.
Bitmask density_wave(int length);  // |1010...>
Bitmask domain_wall(int length);   // |11..100..0>, first floor(L/2) sites
Bitmask single_corner(const LatticeGeometry& geometry);
Bitmask two_corners(const LatticeGeometry& geometry);
Bitmask three_corner_cluster(const LatticeGeometry& geometry);

}  // namespace emfreeze
