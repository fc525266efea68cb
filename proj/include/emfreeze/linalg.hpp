#pragma once

#include "emfreeze/common.hpp"

// Dense Hermitian eigensolvers backed by LAPACK (divide and conquer).

namespace emfreeze::linalg {

struct RealEigen {
  RVector values;   // ascending
  RMatrix vectors;  // columns
};

struct ComplexEigen {
  RVector values;   // ascending
  CMatrix vectors;  // columns
};

RealEigen eigh(const RMatrix& symmetric);
ComplexEigen eigh(const CMatrix& hermitian);

RVector eigvalsh(const CMatrix& hermitian);

/// f(A) = V diag(f(w)) V^dag for Hermitian A.
template <class F>
CMatrix matrix_function(const CMatrix& hermitian, F&& f) {
  const ComplexEigen e = eigh(hermitian);
  CVector fw(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) fw(k) = f(e.values(k));
  return e.vectors * fw.asDiagonal() * e.vectors.adjoint();
}

/// True when every imaginary part is exactly zero.
bool is_real(const CMatrix& m);

}  // namespace emfreeze::linalg
