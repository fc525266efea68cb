#include "emfreeze/spectral_stats.hpp"

#include <algorithm>
#include <cmath>

#include "emfreeze/emergent.hpp"
#include "emfreeze/linalg.hpp"
#include "emfreeze/parallel.hpp"

namespace emfreeze {

namespace {

constexpr int kMaxBins = 2000;

struct Moments {
  double mean;
  double std;
};

Moments moments(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(x.size()))};
}

double quantile(std::vector<double> sorted_copy, double q) {
  const double pos = q * static_cast<double>(sorted_copy.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_copy.size() - 1);
  return sorted_copy[lo] + (pos - static_cast<double>(lo)) * (sorted_copy[hi] - sorted_copy[lo]);
}

}  // namespace

Histogram make_histogram(const std::vector<double>& samples, int bins) {
  if (samples.empty()) throw DomainError("histogram of an empty sample");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  double lo = sorted.front();
  double hi = sorted.back();
  if (bins <= 0) {
    const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
    bins = width > 0.0 ? static_cast<int>(std::ceil((hi - lo) / width)) : 1;
    bins = std::clamp(bins, 1, kMaxBins);
  }
  if (hi - lo <= 0.0) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  const double width = (hi - lo) / bins;
  for (int k = 0; k <= bins; ++k) h.edges[k] = lo + k * width;
  h.edges.back() = hi;
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (double v : sorted) {
    const int k = std::min(bins - 1, static_cast<int>((v - lo) / width));
    counts[static_cast<std::size_t>(k)] += 1.0;
  }
  h.density.resize(counts.size());
  const double norm = static_cast<double>(sorted.size()) * width;
  for (std::size_t k = 0; k < counts.size(); ++k) h.density[k] = counts[k] / norm;
  return h;
}

ElementStats element_stats(const CMatrix& m, double t, int bins) {
  const Eigen::Index d = m.rows();
  if (d < 2 || m.cols() != d) throw DomainError("element statistics need a square matrix of size >= 2");

  std::vector<double> diag(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) diag[k] = m(k, k).real();
  std::vector<double> re;
  std::vector<double> im;
  const auto n_off = static_cast<std::size_t>(d * (d - 1) / 2);
  re.reserve(n_off);
  im.reserve(n_off);
  for (Eigen::Index j = 1; j < d; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }

  ElementStats s;
  s.t = t;
  const Moments md = moments(diag);
  const Moments mr = moments(re);
  const Moments mi = moments(im);
  s.diag_mean = md.mean;
  s.diag_std = md.std;
  s.offdiag_real_mean = mr.mean;
  s.offdiag_real_std = mr.std;
  s.offdiag_imag_mean = mi.mean;
  s.offdiag_imag_std = mi.std;
  s.offdiag_std = std::sqrt(0.5 * (mr.std * mr.std + mi.std * mi.std));
  s.r_ratio = md.std > 0.0 ? s.offdiag_std / md.std : 0.0;
  s.diag_hist = make_histogram(diag, bins);
  s.offdiag_real_hist = make_histogram(re, bins);
  s.offdiag_imag_hist = make_histogram(im, bins);
  return s;
}

SpectrumCheck spectrum_check(const CMatrix& m, const CMatrix& h0) {
  if (m.rows() != h0.rows()) throw BasisMismatch("spectrum check needs equal dimensions");
  const RVector em = linalg::eigvalsh(m);
  const RVector e0 = linalg::eigvalsh(h0);
  SpectrumCheck out{};
  out.max_deviation = em.size() ? (em - e0).cwiseAbs().maxCoeff() : 0.0;

  std::vector<double> levels;
  for (Eigen::Index k = 0; k < e0.size(); ++k) {
    if (levels.empty() || e0(k) - levels.back() > 1e-9) levels.push_back(e0(k));
  }
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double gap = levels[k] - levels[k - 1];
    out.max_gap_residual = std::max(out.max_gap_residual, std::abs(gap - std::round(gap)));
  }
  out.integer_gaps = out.max_gap_residual < 1e-9;
  return out;
}

std::vector<ElementStats> stats_timeseries(const CMatrix& hf, const CMatrix& h0,
                                           const std::vector<double>& times, int bins,
                                           unsigned threads) {
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] >= times[k - 1])) throw DomainError("sample times must be ascending");
  }
  const UnitaryConjugator conj(hf, h0);
  std::vector<ElementStats> out(times.size());
  parallel_for(times.size(), threads, [&](std::size_t k) {
    out[k] = element_stats(conj.at(times[k]), times[k], bins);
  });
  return out;
}

}  // namespace emfreeze
