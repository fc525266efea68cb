#pragma once

#include "emfreeze/common.hpp"
#include "emfreeze/lattice_basis.hpp"
#include "emfreeze/sparse_operators.hpp"

namespace emfreeze {

/// Dense spin-s operators. Rows/columns run over m = -s ... +s ascending.
struct SpinOps {
  double s;
  CMatrix sx, sy, sz, sp, sm;

  int dim() const noexcept { return static_cast<int>(sz.rows()); }
  /// Same operators with the basis reversed (index k <-> m = s - k), which is the
  /// ordering in which site k of a perfect-transfer chain carries S_z = s - k.
  SpinOps site_ordered() const;
};

/// s must be a non-negative multiple of 1/2.
SpinOps build_spin_ops(double s);

/// Operator A on the x-spin times B on the y-spin, indexed by lattice site
/// lx + Lx * ly (A is Lx x Lx, B is Ly x Ly).
CMatrix two_spin_product(const CMatrix& a, const CMatrix& b);

/// Perfect-transfer hopping amplitude on the bond (l-1, l) of a length-L line.
double transfer_amplitude(int l, int length);

// --- lattice Hamiltonians as term lists -------------------------------------

/// sum_l l n_l
TermSpec build_h0_chain(int length);
/// Hops (l-1, l) with amplitude sqrt(l (L-l)) / 2, l = 1..L-1.
TermSpec build_hf_chain(int length);
/// sum_l (lx + ly) n_l
TermSpec build_h0_rect(int lx, int ly);
TermSpec build_hf_rect_nn(int lx, int ly);
/// NN part plus constant-amplitude hops along both plaquette diagonals.
TermSpec build_hf_rect_nnn(int lx, int ly, double j_cross);

/// Single-excitation S1x + S2x (+ S1x S2x when interacting) in site ordering.
CMatrix build_two_spin_hf(int lx, int ly, bool interacting);

}  // namespace emfreeze
