#pragma once

#include <vector>

#include "emfreeze/common.hpp"

// One-axis twisting in the symmetric Dicke sector of L qubits (s = L/2).
// Basis ordering is m = -s ... +s ascending; |0...0> corresponds to m = +s.

namespace emfreeze {

struct DickeVector {
  int num_qubits;
  CVector coeffs;  // length L + 1

  /// Throws NumericalError unless the norm is 1 within 1e-10.
  DickeVector(int num_qubits, CVector coeffs);

  double spin() const noexcept { return 0.5 * num_qubits; }
};

/// -lambda S_z^2 as a dense diagonal matrix.
CMatrix oat_hamiltonian(int num_qubits, double lambda);

/// (|0> - i|1>)^{(x)L}: the S_y = -L/2 coherent state.
DickeVector coherent_minus_y(int num_qubits);

/// exp(-i H_OAT t) S_y exp(+i H_OAT t), tridiagonal with
/// <m+1|M|m> = e^{i lambda t (2m+1)} sqrt(s(s+1) - m(m+1)) / (2i).
CMatrix oat_emergent(int num_qubits, double lambda, double t);

/// exp(-i H_OAT t) psi, exact diagonal phases.
DickeVector oat_evolve(const DickeVector& psi, double lambda, double t);

/// exp(-i theta S_x) psi.
DickeVector rotate_x(const DickeVector& psi, double theta);

/// (|m=+s> + e^{i phi} |m=-s>) / sqrt 2
DickeVector ghz_state(int num_qubits, double phi);

/// |<GHZ_{3pi/2}| R_x(-pi/2) psi(t)>|^2 along the OAT trajectory of coherent_minus_y.
std::vector<double> ghz_fidelity_series(int num_qubits, double lambda,
                                        const std::vector<double>& times);

struct OatFreezeResult {
  double residual;               // ‖M psi(t_f) - E0 psi(t_f)‖
  double e0;                     // -L/2
  std::vector<double> fidelity;  // at t_freeze + each post time
  std::vector<double> overlap;   // |<psi(t_f)|psi(t_f + dt)>|
};

/// Evolve under H_OAT to t_freeze, then under oat_emergent(t_freeze).
OatFreezeResult oat_freeze(int num_qubits, double lambda, double t_freeze,
                           const std::vector<double>& post_times);

/// Embeds a symmetric-sector state into the full 2^L qubit space (small L only).
/// Qubit q is bit q of the index; bit value 1 means |1>, i.e. spin down.
CVector embed_symmetric(const DickeVector& psi);

}  // namespace emfreeze
