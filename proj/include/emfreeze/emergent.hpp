#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "emfreeze/common.hpp"
#include "emfreeze/lattice_basis.hpp"
#include "emfreeze/linalg.hpp"
#include "emfreeze/linear_operator.hpp"
#include "emfreeze/sparse_operators.hpp"

// Constructions of the emergent (freezing) Hamiltonian
//   M(t) = exp(-i Hf t) H0 exp(+i Hf t),
// exactly where a closed form exists and by truncating the nested-commutator
// series otherwise.

namespace emfreeze {

inline constexpr std::size_t kDefaultDenseCap = 6000;

// --- closed forms ------------------------------------------------------------

/// Perfect-transfer chain: density (L-1)/2 + cos t (l - (L-1)/2) plus hops
/// i sin t sqrt(l(L-l))/2 a_l^dag a_{l-1} + H.c. Valid in every particle sector.
TermSpec exact_1d(int length, double t);

struct Exact2dNN {
  CMatrix dense;     // single-excitation operator, site ordering
  TermSpec hopping;  // same operator as a one-body hopping matrix
};

Exact2dNN exact_2d_nn(int lx, int ly, double t);

/// Closed form for Hf = S1x + S2x + S1x S2x in the single-excitation sector.
/// sin/cos of (1 + S_x) are evaluated on the eigenbasis of S_x.
CMatrix exact_2d_twospin_nnn(int lx, int ly, double t);

// --- numerically exact ---------------------------------------------------------

/// Caches the eigendecomposition of Hf so M(t) can be produced for many t.
class UnitaryConjugator {
 public:
  UnitaryConjugator(const CMatrix& hf, const CMatrix& h0, std::size_t dense_cap = kDefaultDenseCap);

  /// exp(-i Hf t) H0 exp(+i Hf t), Hermitized; H0 itself at t = 0.
  CMatrix at(double t) const;
  Eigen::Index dim() const noexcept { return vectors_.rows(); }

 private:
  CMatrix h0_;
  RVector energies_;
  CMatrix vectors_;
  CMatrix h0_rotated_;  // V^dag H0 V
};

CMatrix unitary_exact(const SparseHermitian& hf, const SparseHermitian& h0, double t,
                      std::size_t dense_cap = kDefaultDenseCap);
CMatrix unitary_exact(const CMatrix& hf, const CMatrix& h0, double t,
                      std::size_t dense_cap = kDefaultDenseCap);

/// Symmetrizes (M + M^dag)/2 after asserting the residual is below tol.
CMatrix hermitize_dense(const CMatrix& m, double tol = 1e-11);

// --- truncated series ----------------------------------------------------------

/// Nested commutators H1 = [Hf, H0], H2 = [Hf, H1], built once.
class CommutatorSeries {
 public:
  CommutatorSeries(const SparseHermitian& hf, const SparseHermitian& h0);

  /// H0 - i t H1 (order 1), additionally - t^2/2 H2 (order 2).
  SparseHermitian at(double t, int order) const;
  /// M^(order)(t) |v> without assembling the matrix.
  CVector apply(double t, int order, const CVector& v) const;

  const SparseHermitian& h0() const noexcept { return h0_; }
  const SparseOperator& h1() const noexcept { return h1_; }
  const SparseOperator& h2() const noexcept { return h2_; }

 private:
  SparseHermitian h0_;
  SparseOperator h1_;
  SparseOperator h2_;
};

SparseHermitian trunc_numeric(const SparseHermitian& hf, const SparseHermitian& h0, double t,
                              int order);

/// Closed-form truncations for the 2D nearest-neighbour model.
TermSpec trunc_appendix_nn(int lx, int ly, double t, int order);
/// First-order closed form for the model with diagonal hopping j_cross.
TermSpec trunc_appendix_nnn(int lx, int ly, double j_cross, double t);

/// Single-particle exact_2d_nn used as a hopping matrix in any particle sector.
SparseHermitian spin_promoted(int lx, int ly, double t, BasisPtr basis);

// --- variant dispatch ----------------------------------------------------------

enum class EmergentTag {
  Exact1D,
  Exact2D_NN,
  Exact2D_TwoSpinNNN,
  UnitaryExact,
  Trunc1,
  Trunc2,
  Trunc1_Appendix,
  Trunc2_Appendix,
  Trunc1_NNN_Appendix,
  SpinPromoted,
  OAT,
};

std::string_view to_string(EmergentTag tag);
std::optional<EmergentTag> parse_emergent_tag(std::string_view name);

struct EmergentVariant {
  EmergentTag tag;
  double t = 0.0;
  double lambda = 1.0;
  double j_cross = 0.0;
  std::size_t dense_cap = kDefaultDenseCap;
};

/// Builds M(t) for a lattice variant on the given basis. Chains use the
/// perfect-transfer model; rectangles the model with diagonal hopping j_cross.
/// Single-excitation closed forms require a one-particle basis. OAT ignores the
/// basis and acts on the Dicke space of basis->num_sites() qubits.
LinearOperator build_emergent(const EmergentVariant& variant, const BasisPtr& basis);

/// True for variants whose operator is the exact M(t).
bool is_exact(EmergentTag tag) noexcept;

}  // namespace emfreeze
