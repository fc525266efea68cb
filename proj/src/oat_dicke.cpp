#include "emfreeze/oat_dicke.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "emfreeze/linalg.hpp"
#include "emfreeze/models.hpp"

namespace emfreeze {

namespace {

void require_qubits(int num_qubits, int min) {
  if (num_qubits < min) {
    throw DomainError("need at least " + std::to_string(min) + " qubits");
  }
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("OAT coupling lambda must be positive");
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// (-i)^k
cplx minus_i_power(int k) {
  switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace

DickeVector::DickeVector(int n, CVector c) : num_qubits(n), coeffs(std::move(c)) {
  if (coeffs.size() != n + 1) throw BasisMismatch("Dicke vector length must be L + 1");
  if (std::abs(coeffs.norm() - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "Dicke vector is not normalized (norm = " << coeffs.norm() << ")";
    throw NumericalError(msg.str());
  }
}

CMatrix oat_hamiltonian(int num_qubits, double lambda) {
  require_qubits(num_qubits, 2);
  require_lambda(lambda);
  const double s = 0.5 * num_qubits;
  CMatrix h = CMatrix::Zero(num_qubits + 1, num_qubits + 1);
  for (int k = 0; k <= num_qubits; ++k) {
    const double m = -s + k;
    h(k, k) = -lambda * m * m;
  }
  return h;
}

DickeVector coherent_minus_y(int num_qubits) {
  require_qubits(num_qubits, 1);
  CVector c(num_qubits + 1);
  for (int k = 0; k <= num_qubits; ++k) {
    // Index k holds m = -s + k; the number of |1> qubits is s - m = L - k.
    const int ones = num_qubits - k;
    const double mag = std::exp(0.5 * log_binomial(num_qubits, ones) - 0.5 * num_qubits * std::log(2.0));
    c(k) = minus_i_power(ones) * mag;
  }
  return DickeVector(num_qubits, c / c.norm());
}

CMatrix oat_emergent(int num_qubits, double lambda, double t) {
  require_qubits(num_qubits, 2);
  require_lambda(lambda);
  const double s = 0.5 * num_qubits;
  const int d = num_qubits + 1;
  CMatrix m = CMatrix::Zero(d, d);
  for (int k = 0; k + 1 < d; ++k) {
    const double mm = -s + k;
    const double ladder = std::sqrt(s * (s + 1.0) - mm * (mm + 1.0));
    const cplx up = std::exp(kI * (lambda * t * (2.0 * mm + 1.0))) * ladder / (2.0 * kI);
    m(k + 1, k) = up;
    m(k, k + 1) = std::conj(up);
  }
  return m;
}

DickeVector oat_evolve(const DickeVector& psi, double lambda, double t) {
  const double s = psi.spin();
  CVector out = psi.coeffs;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double m = -s + static_cast<double>(k);
    out(k) *= std::exp(kI * (lambda * m * m * t));
  }
  return DickeVector(psi.num_qubits, out / out.norm());
}

DickeVector rotate_x(const DickeVector& psi, double theta) {
  const SpinOps ops = build_spin_ops(psi.spin());
  const CMatrix r = linalg::matrix_function(ops.sx, [theta](double w) {
    return std::exp(-kI * (theta * w));
  });
  CVector out = r * psi.coeffs;
  return DickeVector(psi.num_qubits, out / out.norm());
}

DickeVector ghz_state(int num_qubits, double phi) {
  require_qubits(num_qubits, 2);
  CVector c = CVector::Zero(num_qubits + 1);
  c(num_qubits) = 1.0 / std::sqrt(2.0);
  c(0) = std::exp(kI * phi) / std::sqrt(2.0);
  return DickeVector(num_qubits, c);
}

std::vector<double> ghz_fidelity_series(int num_qubits, double lambda,
                                        const std::vector<double>& times) {
  require_qubits(num_qubits, 2);
  require_lambda(lambda);
  const DickeVector psi0 = coherent_minus_y(num_qubits);
  const DickeVector target = ghz_state(num_qubits, 1.5 * kPi);
  const SpinOps ops = build_spin_ops(psi0.spin());
  const CMatrix rot = linalg::matrix_function(ops.sx, [](double w) {
    return std::exp(kI * (0.5 * kPi * w));  // R_x(-pi/2)
  });
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    const CVector rotated = rot * oat_evolve(psi0, lambda, t).coeffs;
    out.push_back(std::norm(target.coeffs.dot(rotated)));
  }
  return out;
}

OatFreezeResult oat_freeze(int num_qubits, double lambda, double t_freeze,
                           const std::vector<double>& post_times) {
  require_qubits(num_qubits, 2);
  require_lambda(lambda);
  if (t_freeze < 0.0) throw DomainError("t_freeze must be non-negative");

  const DickeVector frozen = oat_evolve(coherent_minus_y(num_qubits), lambda, t_freeze);
  const CMatrix m = oat_emergent(num_qubits, lambda, t_freeze);
  OatFreezeResult result;
  result.e0 = -0.5 * num_qubits;
  result.residual = (m * frozen.coeffs - result.e0 * frozen.coeffs).norm();

  const DickeVector target = ghz_state(num_qubits, 1.5 * kPi);
  const linalg::ComplexEigen eig = linalg::eigh(m);
  const CVector in_eigenbasis = eig.vectors.adjoint() * frozen.coeffs;
  for (double dt : post_times) {
    CVector phases(in_eigenbasis.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
      phases(k) = std::exp(-kI * (eig.values(k) * dt)) * in_eigenbasis(k);
    }
    const DickeVector psi(num_qubits, eig.vectors * phases);
    const DickeVector rotated = rotate_x(psi, -0.5 * kPi);
    result.fidelity.push_back(std::norm(target.coeffs.dot(rotated.coeffs)));
    result.overlap.push_back(std::abs(frozen.coeffs.dot(psi.coeffs)));
  }
  return result;
}

CVector embed_symmetric(const DickeVector& psi) {
  const int n = psi.num_qubits;
  if (n > 20) throw CapacityError("symmetric-sector embedding limited to 20 qubits");
  const std::size_t full = std::size_t{1} << n;
  CVector out = CVector::Zero(static_cast<Eigen::Index>(full));
  for (std::size_t idx = 0; idx < full; ++idx) {
    const int ones = std::popcount(idx);
    // Dicke state with `ones` excitations has m = s - ones, index k = n - ones.
    const double norm = std::exp(-0.5 * log_binomial(n, ones));
    out(static_cast<Eigen::Index>(idx)) = psi.coeffs(n - ones) * norm;
  }
  return out;
}

}  // namespace emfreeze
