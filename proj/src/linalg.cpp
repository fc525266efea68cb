#include "emfreeze/linalg.hpp"

#include <lapacke.h>

#include <string>

namespace emfreeze::linalg {

RealEigen eigh(const RMatrix& symmetric) {
  const auto n = static_cast<lapack_int>(symmetric.rows());
  if (symmetric.cols() != symmetric.rows()) throw DomainError("eigh needs a square matrix");
  RealEigen out{RVector(n), symmetric};
  if (n == 0) return out;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n,
                                         out.values.data());
  if (info != 0) throw NumericalError("dsyevd failed with info " + std::to_string(info));
  return out;
}

ComplexEigen eigh(const CMatrix& hermitian) {
  const auto n = static_cast<lapack_int>(hermitian.rows());
  if (hermitian.cols() != hermitian.rows()) throw DomainError("eigh needs a square matrix");
  ComplexEigen out{RVector(n), hermitian};
  if (n == 0) return out;
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n,
                     reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
                     out.values.data());
  if (info != 0) throw NumericalError("zheevd failed with info " + std::to_string(info));
  return out;
}

RVector eigvalsh(const CMatrix& hermitian) {
  const auto n = static_cast<lapack_int>(hermitian.rows());
  CMatrix work = hermitian;
  RVector w(n);
  if (n == 0) return w;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n,
                                         reinterpret_cast<lapack_complex_double*>(work.data()),
                                         n, w.data());
  if (info != 0) throw NumericalError("zheevd failed with info " + std::to_string(info));
  return w;
}

bool is_real(const CMatrix& m) { return (m.imag().array() == 0.0).all(); }

}  // namespace emfreeze::linalg
