#pragma once

#include <vector>

#include "emfreeze/common.hpp"

namespace emfreeze {

struct Histogram {
  std::vector<double> edges;    // size = bins + 1
  std::vector<double> density;  // normalized to unit area
};

/// Fixed bin count when bins > 0, Freedman-Diaconis width otherwise.
Histogram make_histogram(const std::vector<double>& samples, int bins = 0);

/// Matrix-element statistics of a dense Hermitian operator in the Fock basis.
/// Means and standard deviations are maximum-likelihood Gaussian parameters.
struct ElementStats {
  double t = 0.0;
  double diag_mean = 0.0;
  double diag_std = 0.0;
  double offdiag_real_mean = 0.0;
  double offdiag_real_std = 0.0;
  double offdiag_imag_mean = 0.0;
  double offdiag_imag_std = 0.0;
  double offdiag_std = 0.0;  // sqrt of the mean of the real and imaginary variances
  double r_ratio = 0.0;      // offdiag_std / diag_std
  Histogram diag_hist;
  Histogram offdiag_real_hist;
  Histogram offdiag_imag_hist;
};

/// Throws DomainError for matrices smaller than 2x2. Off-diagonal statistics run
/// over the strict upper triangle, zeros included.
ElementStats element_stats(const CMatrix& m, double t, int bins = 0);

struct SpectrumCheck {
  double max_deviation;      // max |sorted eig(M) - sorted eig(H0)|
  double max_gap_residual;   // distance of H0's distinct-level gaps from integers
  bool integer_gaps;         // max_gap_residual < 1e-9
};

SpectrumCheck spectrum_check(const CMatrix& m, const CMatrix& h0);

/// element_stats of exp(-i Hf t) H0 exp(i Hf t) at each ascending time.
std::vector<ElementStats> stats_timeseries(const CMatrix& hf, const CMatrix& h0,
                                           const std::vector<double>& times, int bins = 0,
                                           unsigned threads = 1);

}  // namespace emfreeze
