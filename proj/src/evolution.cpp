#include "emfreeze/evolution.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "emfreeze/linalg.hpp"
#include "emfreeze/models.hpp"

namespace emfreeze {

namespace {

CVector restore_norm(CVector psi) {
  const double drift = std::abs(psi.norm() - 1.0);
  if (drift > 1e-6) {
    std::ostringstream msg;
    msg << "propagation changed the norm by " << drift;
    throw NumericalError(msg.str());
  }
  psi /= psi.norm();
  return psi;
}

// beta_m |[exp(-i tau T_m) e1]_m| for the leading m x m Lanczos tridiagonal.
double step_error(const RVector& alpha, const RVector& beta, int m, double tau) {
  RMatrix tri = RMatrix::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    tri(j, j) = alpha(j);
    if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(tri);
  cplx last{0.0, 0.0};
  for (int k = 0; k < m; ++k) {
    last += eig.eigenvectors()(m - 1, k) * std::exp(-kI * (eig.eigenvalues()(k) * tau)) *
            eig.eigenvectors()(0, k);
  }
  return beta(m - 1) * std::abs(last);
}

void require_ascending(const std::vector<double>& times) {
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] >= times[k - 1])) throw DomainError("sample times must be ascending");
  }
}

}  // namespace

Propagator Propagator::dense(const LinearOperator& op) {
  Propagator p(Method::DenseEigen, op, op.dim());
  const CMatrix h = op.dense();
  if (linalg::is_real(h)) {
    linalg::RealEigen e = linalg::eigh(RMatrix(h.real()));
    p.energies_ = std::move(e.values);
    p.vectors_ = e.vectors.cast<cplx>();
  } else {
    linalg::ComplexEigen e = linalg::eigh(h);
    p.energies_ = std::move(e.values);
    p.vectors_ = std::move(e.vectors);
  }
  return p;
}

Propagator Propagator::krylov(LinearOperator op, KrylovOptions options) {
  if (options.krylov_dim < 2) throw DomainError("Krylov dimension must be at least 2");
  const Eigen::Index d = op.dim();
  Propagator p(Method::KrylovExpm, std::move(op), d);
  p.options_ = options;
  return p;
}

Propagator Propagator::automatic(const LinearOperator& op, std::size_t dense_threshold) {
  if (static_cast<std::size_t>(op.dim()) <= dense_threshold) return dense(op);
  return krylov(op);
}

CVector Propagator::propagate(const CVector& psi0, double t) const {
  if (psi0.size() != dim_) throw BasisMismatch("state dimension does not match the generator");
  if (!std::isfinite(t)) throw DomainError("propagation time must be finite");
  if (t == 0.0) return psi0;
  if (method_ == Method::DenseEigen) {
    CVector c = vectors_.adjoint() * psi0;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-kI * (energies_(k) * t));
    return restore_norm(vectors_ * c);
  }
  return restore_norm(krylov_step(psi0, t));
}

StateVector Propagator::propagate(const StateVector& psi0, double t) const {
  return StateVector(psi0.basis(), propagate(psi0.amplitudes(), t));
}

std::vector<CVector> Propagator::propagate_series(const CVector& psi0,
                                                  const std::vector<double>& times) const {
  require_ascending(times);
  std::vector<CVector> out;
  out.reserve(times.size());
  if (method_ == Method::DenseEigen) {
    for (double t : times) out.push_back(propagate(psi0, t));
    return out;
  }
  CVector current = psi0;
  double now = 0.0;
  for (double t : times) {
    current = propagate(current, t - now);
    now = t;
    out.push_back(current);
  }
  return out;
}

std::vector<StateVector> Propagator::propagate_series(const StateVector& psi0,
                                                      const std::vector<double>& times) const {
  std::vector<StateVector> out;
  out.reserve(times.size());
  for (CVector& v : propagate_series(psi0.amplitudes(), times)) {
    out.emplace_back(psi0.basis(), std::move(v));
  }
  return out;
}

// Lanczos exponential integrator with full reorthogonalization. Each step builds
// an m-dimensional Krylov space and shrinks the step until the a posteriori
// estimate beta_m |[exp(-i tau T) e1]_m| is below the tolerance.
CVector Propagator::krylov_step(const CVector& psi, double t) const {
  const int m_max = static_cast<int>(std::min<Eigen::Index>(options_.krylov_dim, dim_));
  const double direction = t < 0.0 ? -1.0 : 1.0;
  double remaining = std::abs(t);
  CVector current = psi;
  int substeps = 0;

  CMatrix basis(dim_, m_max + 1);
  while (remaining > 0.0) {
    const double norm0 = current.norm();
    basis.col(0) = current / norm0;
    RVector alpha = RVector::Zero(m_max);
    RVector beta = RVector::Zero(m_max);
    int m = m_max;
    bool breakdown = false;
    for (int j = 0; j < m_max; ++j) {
      CVector w = op_ * CVector(basis.col(j));
      for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k <= j; ++k) {
          const cplx proj = basis.col(k).dot(w);
          w -= proj * basis.col(k);
          if (pass == 0 && k == j) alpha(j) = proj.real();
        }
      }
      beta(j) = w.norm();
      if (beta(j) < 1e-13 * std::max(1.0, std::abs(alpha(j)))) {
        m = j + 1;
        breakdown = true;
        break;
      }
      basis.col(j + 1) = w / beta(j);
      // Stop growing the space once the full step already meets the tolerance.
      if (j + 1 >= 4 && j + 1 < m_max &&
          step_error(alpha, beta, j + 1, direction * std::min(remaining, options_.max_step)) <=
              options_.tolerance) {
        m = j + 1;
        break;
      }
    }

    RMatrix tri = RMatrix::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      tri(j, j) = alpha(j);
      if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(tri);
    const RVector& theta = eig.eigenvalues();
    const RMatrix& q = eig.eigenvectors();

    double tau = std::min(remaining, options_.max_step);
    CVector coeffs;
    double err = 0.0;
    while (true) {
      CVector expd(m);
      for (int k = 0; k < m; ++k) expd(k) = std::exp(-kI * (direction * theta(k) * tau)) * q(0, k);
      coeffs = q.cast<cplx>() * expd;
      err = breakdown ? 0.0 : beta(m - 1) * std::abs(coeffs(m - 1));
      if (err <= options_.tolerance) break;
      tau *= 0.5;
      if (tau < 1e-14 * std::max(1.0, std::abs(t))) {
        throw IterationError("Krylov step size underflow", err);
      }
    }
    current = norm0 * (basis.leftCols(m) * coeffs);
    remaining -= tau;
    if (remaining < 1e-15 * std::abs(t)) remaining = 0.0;
    if (++substeps > options_.max_substeps) {
      throw IterationError("Krylov propagation exceeded the substep limit", err);
    }
  }
  return current;
}

FreezeTrajectory run_freeze(const StateVector& psi0, const FreezePlan& plan) {
  if (plan.t_freeze < 0.0) throw DomainError("t_freeze must be non-negative");
  if (plan.variant.t != plan.t_freeze) {
    throw DomainError("emergent variant must be constructed at t_freeze");
  }
  require_ascending(plan.post_times);
  const StateVector frozen = Propagator::automatic(plan.hf).propagate(psi0, plan.t_freeze);
  const LinearOperator m = build_emergent(plan.variant, psi0.basis());
  return {frozen, Propagator::automatic(m).propagate_series(frozen, plan.post_times)};
}

std::vector<BlochPoint> bloch_trajectory(const std::vector<StateVector>& psi_series, int lx,
                                         int ly) {
  const SpinOps a = build_spin_ops(0.5 * (lx - 1)).site_ordered();
  const SpinOps b = build_spin_ops(0.5 * (ly - 1)).site_ordered();
  const CMatrix ia = CMatrix::Identity(lx, lx);
  const CMatrix ib = CMatrix::Identity(ly, ly);
  const std::array<CMatrix, 6> ops{
      two_spin_product(a.sx, ib), two_spin_product(a.sy, ib), two_spin_product(a.sz, ib),
      two_spin_product(ia, b.sx), two_spin_product(ia, b.sy), two_spin_product(ia, b.sz)};

  std::vector<BlochPoint> out;
  out.reserve(psi_series.size());
  for (const StateVector& psi : psi_series) {
    const FockBasis& basis = *psi.basis();
    const auto& geo = basis.geometry();
    if (basis.n_particles() != 1 || geo.kind() != LatticeGeometry::Kind::rectangle ||
        geo.lx() != lx || geo.ly() != ly) {
      throw DomainError("Bloch trajectory needs single-excitation states on the given rectangle");
    }
    BlochPoint p{};
    for (std::size_t k = 0; k < ops.size(); ++k) p[k] = expectation(ops[k], psi.amplitudes());
    out.push_back(p);
  }
  return out;
}

}  // namespace emfreeze
