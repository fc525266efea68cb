#pragma once

#include <variant>
#include <vector>

#include "emfreeze/common.hpp"
#include "emfreeze/lattice_basis.hpp"

namespace emfreeze {

// ---------------------------------------------------------------------------
// Second-quantized term lists for hardcore bosons.
// ---------------------------------------------------------------------------

/// amp * a_i^dag a_j + conj(amp) * a_j^dag a_i
struct Hop {
  int i;
  int j;
  cplx amp;
};

/// w * n_i
struct Density {
  int i;
  double w;
};

/// amp * n_k a_i^dag a_j + H.c.; k must differ from i and j.
struct AssistedHop {
  int k;
  int i;
  int j;
  cplx amp;
};

/// c * Identity
struct Const {
  double c;
};

using Term = std::variant<Hop, Density, AssistedHop, Const>;

struct TermSpec {
  std::vector<Term> terms;

  TermSpec& hop(int i, int j, cplx amp) {
    terms.emplace_back(Hop{i, j, amp});
    return *this;
  }
  TermSpec& density(int i, double w) {
    terms.emplace_back(Density{i, w});
    return *this;
  }
  TermSpec& assisted_hop(int k, int i, int j, cplx amp) {
    terms.emplace_back(AssistedHop{k, i, j, amp});
    return *this;
  }
  TermSpec& constant(double c) {
    terms.emplace_back(Const{c});
    return *this;
  }
  TermSpec& append(const TermSpec& other) {
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
    return *this;
  }
  std::size_t size() const noexcept { return terms.size(); }
};

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

/// Normalized amplitude vector over a FockBasis.
class StateVector {
 public:
  /// Throws NumericalError unless ‖amplitudes‖ = 1 within 1e-10.
  StateVector(BasisPtr basis, CVector amplitudes);

  /// Rescales to unit norm; throws NumericalError on a zero vector.
  static StateVector normalized(BasisPtr basis, CVector amplitudes);
  static StateVector product(BasisPtr basis, Bitmask occupied);

  const BasisPtr& basis() const noexcept { return basis_; }
  const CVector& amplitudes() const noexcept { return amps_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }
  cplx operator[](std::size_t k) const { return amps_(static_cast<Eigen::Index>(k)); }

 private:
  BasisPtr basis_;
  CVector amps_;
};

// ---------------------------------------------------------------------------
// Sparse operators
// ---------------------------------------------------------------------------

/// Row-compressed complex operator on a FockBasis. No symmetry is assumed.
class SparseOperator {
 public:
  SparseOperator(BasisPtr basis, CSparse matrix);

  const BasisPtr& basis() const noexcept { return basis_; }
  const CSparse& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

  CVector operator*(const CVector& v) const { return matrix_ * v; }
  CMatrix to_dense() const { return CMatrix(matrix_); }

  /// max |M_ab - conj(M_ba)|
  double hermiticity_residual() const;
  /// max |M_ab + conj(M_ba)|
  double anti_hermiticity_residual() const;

 private:
  BasisPtr basis_;
  CSparse matrix_;
};

/// SparseOperator whose Hermiticity was verified (residual < 1e-12) at construction.
class SparseHermitian : public SparseOperator {
 public:
  static constexpr double kTolerance = 1e-12;
  SparseHermitian(BasisPtr basis, CSparse matrix);
  explicit SparseHermitian(SparseOperator op);
};

SparseHermitian realize(const TermSpec& spec, BasisPtr basis);

/// AB - BA. Throws BasisMismatch for operators on different bases.
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);
/// As above; additionally verifies the result is anti-Hermitian.
SparseOperator commutator(const SparseHermitian& a, const SparseHermitian& b);

/// Symmetrizes (M + M^dag)/2 after checking the pre-symmetrization residual is below tol.
SparseHermitian hermitize(const SparseOperator& op, double tol = 1e-11);

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(cplx s, const SparseOperator& a);

struct ApplyResult {
  CVector vector;
  double norm;
};

ApplyResult apply(const SparseOperator& op, const StateVector& psi);

/// sum_ij h_ij a_i^dag a_j applied to v, for a dense one-body matrix h indexed by
/// site. Avoids assembling the many-body matrix when h has all-to-all entries.
CVector apply_one_body(const CMatrix& h, const FockBasis& basis, const CVector& v);

/// <psi|op|psi>; throws NumericalError when the imaginary part exceeds 1e-8.
double expectation(const SparseHermitian& op, const StateVector& psi);

/// <psi|op|psi> for a dense Hermitian operator in the same basis ordering.
double expectation(const CMatrix& op, const CVector& psi);

}  // namespace emfreeze
