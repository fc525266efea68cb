#include "emfreeze/sparse_operators.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace emfreeze {

namespace {

double max_abs(const CSparse& m) {
  double out = 0.0;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (CSparse::InnerIterator it(m, r); it; ++it) out = std::max(out, std::abs(it.value()));
  }
  return out;
}

void require_same_basis(const SparseOperator& a, const SparseOperator& b) {
  if (a.basis() != b.basis() && !(*a.basis() == *b.basis())) {
    throw BasisMismatch("operators act on different Fock bases");
  }
}

void require_same_basis(const SparseOperator& a, const StateVector& psi) {
  if (a.basis() != psi.basis() && !(*a.basis() == *psi.basis())) {
    throw BasisMismatch("operator and state live on different Fock bases");
  }
}

void check_site(int s, int ns) {
  if (s < 0 || s >= ns) {
    throw DomainError("term references site " + std::to_string(s) + " on a lattice with " +
                      std::to_string(ns) + " sites");
  }
}

constexpr bool occupied(Bitmask b, int s) { return test_bit(b, s); }

}  // namespace

// --- StateVector -----------------------------------------------------------

StateVector::StateVector(BasisPtr basis, CVector amplitudes)
    : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
  if (!basis_) throw DomainError("state vector needs a basis");
  if (static_cast<std::size_t>(amps_.size()) != basis_->dim()) {
    throw BasisMismatch("amplitude count does not match basis dimension");
  }
  if (std::abs(amps_.norm() - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "state vector is not normalized (norm = " << amps_.norm() << ")";
    throw NumericalError(msg.str());
  }
}

StateVector StateVector::normalized(BasisPtr basis, CVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw NumericalError("cannot normalize a zero vector");
  amplitudes /= n;
  return StateVector(std::move(basis), std::move(amplitudes));
}

StateVector StateVector::product(BasisPtr basis, Bitmask occupied_sites) {
  const auto k = basis->index_of(occupied_sites);
  if (!k) throw DomainError("product state is not in this particle-number sector");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(basis->dim()));
  v(static_cast<Eigen::Index>(*k)) = 1.0;
  return StateVector(std::move(basis), std::move(v));
}

// --- SparseOperator --------------------------------------------------------

SparseOperator::SparseOperator(BasisPtr basis, CSparse matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
  if (!basis_) throw DomainError("operator needs a basis");
  const auto d = static_cast<Eigen::Index>(basis_->dim());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw BasisMismatch("operator shape does not match basis dimension");
  }
  matrix_.makeCompressed();
}

double SparseOperator::hermiticity_residual() const {
  const CSparse adj = matrix_.adjoint();
  return max_abs(CSparse(matrix_ - adj));
}

double SparseOperator::anti_hermiticity_residual() const {
  const CSparse adj = matrix_.adjoint();
  return max_abs(CSparse(matrix_ + adj));
}

SparseHermitian::SparseHermitian(BasisPtr basis, CSparse matrix)
    : SparseOperator(std::move(basis), std::move(matrix)) {
  if (const double r = hermiticity_residual(); r >= kTolerance) {
    std::ostringstream msg;
    msg << "operator is not Hermitian (residual " << r << ")";
    throw NumericalError(msg.str());
  }
}

SparseHermitian::SparseHermitian(SparseOperator op)
    : SparseHermitian(op.basis(), op.matrix()) {}

SparseHermitian realize(const TermSpec& spec, BasisPtr basis) {
  const FockBasis& fb = *basis;
  const int ns = fb.num_sites();
  for (const Term& term : spec.terms) {
    std::visit(
        [ns](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, Hop>) {
            check_site(t.i, ns);
            check_site(t.j, ns);
            if (t.i == t.j) throw DomainError("hop with i == j; use a Density term");
          } else if constexpr (std::is_same_v<T, Density>) {
            check_site(t.i, ns);
          } else if constexpr (std::is_same_v<T, AssistedHop>) {
            check_site(t.k, ns);
            check_site(t.i, ns);
            check_site(t.j, ns);
            if (t.i == t.j || t.k == t.i || t.k == t.j) {
              throw DomainError("assisted hop needs distinct sites k, i, j");
            }
          }
        },
        term);
  }

  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(fb.dim() * (spec.size() / 4 + 2));

  // <m| a_i^dag a_j |n> = 1 iff j occupied, i empty in n and m = n with j -> i.
  auto push_hop = [&](std::size_t col, Bitmask n, int i, int j, cplx amp) {
    if (occupied(n, j) && !occupied(n, i)) {
      const Bitmask m = n ^ (Bitmask{1} << j) ^ (Bitmask{1} << i);
      triplets.emplace_back(static_cast<int>(*fb.index_of(m)), static_cast<int>(col), amp);
    }
  };

  for (std::size_t col = 0; col < fb.dim(); ++col) {
    const Bitmask n = fb.state(col);
    double diag = 0.0;
    for (const Term& term : spec.terms) {
      if (const auto* h = std::get_if<Hop>(&term)) {
        push_hop(col, n, h->i, h->j, h->amp);
        push_hop(col, n, h->j, h->i, std::conj(h->amp));
      } else if (const auto* d = std::get_if<Density>(&term)) {
        if (occupied(n, d->i)) diag += d->w;
      } else if (const auto* a = std::get_if<AssistedHop>(&term)) {
        if (occupied(n, a->k)) {
          push_hop(col, n, a->i, a->j, a->amp);
          push_hop(col, n, a->j, a->i, std::conj(a->amp));
        }
      } else {
        diag += std::get<Const>(term).c;
      }
    }
    if (diag != 0.0) triplets.emplace_back(static_cast<int>(col), static_cast<int>(col), diag);
  }

  const auto d = static_cast<Eigen::Index>(fb.dim());
  CSparse m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseHermitian(std::move(basis), std::move(m));
}

CVector apply_one_body(const CMatrix& h, const FockBasis& basis, const CVector& v) {
  const int ns = basis.num_sites();
  if (h.rows() != ns || h.cols() != ns) throw BasisMismatch("one-body matrix size differs from N_s");
  if (v.size() != static_cast<Eigen::Index>(basis.dim())) {
    throw BasisMismatch("vector length differs from the basis dimension");
  }
  CVector out = CVector::Zero(v.size());
  for (std::size_t col = 0; col < basis.dim(); ++col) {
    const cplx amp = v(static_cast<Eigen::Index>(col));
    if (amp == cplx{}) continue;
    const Bitmask n = basis.state(col);
    for (Bitmask rest = n; rest != 0; rest &= rest - 1) {
      const int j = countr_zero(rest);
      out(static_cast<Eigen::Index>(col)) += h(j, j) * amp;
      for (int i = 0; i < ns; ++i) {
        if (occupied(n, i) || h(i, j) == cplx{}) continue;
        const Bitmask m = n ^ (Bitmask{1} << j) ^ (Bitmask{1} << i);
        out(static_cast<Eigen::Index>(*basis.index_of(m))) += h(i, j) * amp;
      }
    }
  }
  return out;
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
  require_same_basis(a, b);
  CSparse ab = a.matrix() * b.matrix();
  CSparse ba = b.matrix() * a.matrix();
  return SparseOperator(a.basis(), CSparse(ab - ba));
}

SparseOperator commutator(const SparseHermitian& a, const SparseHermitian& b) {
  SparseOperator c = commutator(static_cast<const SparseOperator&>(a),
                                static_cast<const SparseOperator&>(b));
  const double scale = std::max(1.0, max_abs(c.matrix()));
  if (const double r = c.anti_hermiticity_residual(); r > 1e-12 * scale) {
    std::ostringstream msg;
    msg << "commutator of Hermitian operators is not anti-Hermitian (residual " << r << ")";
    throw NumericalError(msg.str());
  }
  return c;
}

SparseHermitian hermitize(const SparseOperator& op, double tol) {
  if (const double r = op.hermiticity_residual(); r >= tol) {
    std::ostringstream msg;
    msg << "pre-symmetrization Hermiticity residual " << r << " exceeds " << tol;
    throw NumericalError(msg.str());
  }
  const CSparse adj = op.matrix().adjoint();
  CSparse sym = 0.5 * (op.matrix() + adj);
  return SparseHermitian(op.basis(), std::move(sym));
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  require_same_basis(a, b);
  return SparseOperator(a.basis(), CSparse(a.matrix() + b.matrix()));
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  require_same_basis(a, b);
  return SparseOperator(a.basis(), CSparse(a.matrix() - b.matrix()));
}

SparseOperator operator*(cplx s, const SparseOperator& a) {
  return SparseOperator(a.basis(), CSparse(s * a.matrix()));
}

ApplyResult apply(const SparseOperator& op, const StateVector& psi) {
  require_same_basis(op, psi);
  CVector v = op.matrix() * psi.amplitudes();
  const double n = v.norm();
  return {std::move(v), n};
}

double expectation(const SparseHermitian& op, const StateVector& psi) {
  require_same_basis(op, psi);
  const cplx e = psi.amplitudes().dot(op.matrix() * psi.amplitudes());
  if (std::abs(e.imag()) > 1e-8) {
    std::ostringstream msg;
    msg << "expectation value has imaginary part " << e.imag();
    throw NumericalError(msg.str());
  }
  return e.real();
}

double expectation(const CMatrix& op, const CVector& psi) {
  if (op.rows() != psi.size() || op.cols() != psi.size()) {
    throw BasisMismatch("dense operator and state dimensions differ");
  }
  const cplx e = psi.dot(op * psi);
  if (std::abs(e.imag()) > 1e-8) {
    std::ostringstream msg;
    msg << "expectation value has imaginary part " << e.imag();
    throw NumericalError(msg.str());
  }
  return e.real();
}

}  // namespace emfreeze
