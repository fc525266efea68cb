#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "emfreeze/emergent.hpp"
#include "emfreeze/evolution.hpp"
#include "emfreeze/models.hpp"
#include "emfreeze/oat_dicke.hpp"
#include "emfreeze/observables.hpp"
#include "emfreeze/parallel.hpp"
#include "emfreeze/runner.hpp"
#include "emfreeze/spectral_stats.hpp"

namespace emfreeze {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LatticeGeometry geometry_of(const ExperimentConfig& c, std::pair<int, int> size) {
  return c.rectangle ? LatticeGeometry::rectangle(size.first, size.second)
                     : LatticeGeometry::chain(size.first);
}

std::string size_label(std::pair<int, int> size) {
  return std::to_string(size.first) + "x" + std::to_string(size.second);
}

Bitmask initial_bitmask(const ExperimentConfig& c, const LatticeGeometry& geo) {
  switch (c.state) {
    case InitialState::density_wave:
      return density_wave(geo.num_sites());
    case InitialState::domain_wall:
      return domain_wall(geo.num_sites());
    case InitialState::single_corner:
      return single_corner(geo);
    case InitialState::two_corners:
      return two_corners(geo);
    case InitialState::three_corner_cluster:
      return three_corner_cluster(geo);
    case InitialState::explicit_sites:
      for (int s : c.sites) {
        if (s < 0 || s >= geo.num_sites()) {
          throw DomainError("state.sites: site " + std::to_string(s) + " outside the " +
                            std::to_string(geo.num_sites()) + "-site lattice");
        }
      }
      return occupation(c.sites);
    default:
      throw DomainError("experiment needs an initial product state");
  }
}

int particle_count(const ExperimentConfig& c, const LatticeGeometry& geo) {
  return c.state == InitialState::none ? c.particles : popcount(initial_bitmask(c, geo));
}

LinearOperator hf_operator(const ExperimentConfig& c, const BasisPtr& basis, double j_cross) {
  const auto& geo = basis->geometry();
  if (c.hf == HfModel::two_spin_interacting) {
    if (basis->n_particles() != 1) throw DomainError("two_spin_interacting acts on one excitation");
    return build_two_spin_hf(geo.lx(), geo.ly(), true);
  }
  if (geo.kind() == LatticeGeometry::Kind::chain) return realize(build_hf_chain(geo.lx()), basis);
  return realize(build_hf_rect_nnn(geo.lx(), geo.ly(), j_cross), basis);
}

SparseHermitian h0_operator(const BasisPtr& basis) {
  const auto& geo = basis->geometry();
  if (geo.kind() == LatticeGeometry::Kind::chain) return realize(build_h0_chain(geo.lx()), basis);
  return realize(build_h0_rect(geo.lx(), geo.ly()), basis);
}

EmergentVariant variant_at(const ExperimentConfig& c, EmergentTag tag, double t, double j_cross) {
  EmergentVariant v{tag, t};
  v.lambda = c.lambda;
  v.j_cross = j_cross;
  return v;
}

// States at every sample time; samples after t_freeze evolve under the first
// configured variant built at t_freeze.
std::vector<StateVector> trajectory(const ExperimentConfig& c, const StateVector& psi0,
                                    const LinearOperator& hf, const std::vector<double>& times,
                                    double j_cross) {
  if (!c.t_freeze) return Propagator::automatic(hf).propagate_series(psi0, times);
  const double tf = *c.t_freeze;
  std::vector<double> before;
  std::vector<double> offsets;
  for (double t : times) {
    if (t <= tf) {
      before.push_back(t);
    } else {
      offsets.push_back(t - tf);
    }
  }
  std::vector<StateVector> out = Propagator::automatic(hf).propagate_series(psi0, before);
  if (!offsets.empty()) {
    const FreezePlan plan{hf, variant_at(c, c.variants.front(), tf, j_cross), tf, offsets};
    FreezeTrajectory frozen = run_freeze(psi0, plan);
    for (StateVector& s : frozen.post) out.push_back(std::move(s));
  }
  return out;
}

// Sweep points (size, j_cross) in configuration order.
struct SweepPoint {
  std::pair<int, int> size;
  double j_cross;
};

std::vector<SweepPoint> sweep(const ExperimentConfig& c) {
  std::vector<SweepPoint> out;
  for (const auto& size : c.sizes) {
    for (double j : c.j_cross) out.push_back({size, j});
  }
  return out;
}

// --- experiments ----------------------------------------------------------------

ExperimentResult fig2_entropy(const ExperimentConfig& c, unsigned threads) {
  const std::vector<double> times = c.time.times();
  std::vector<std::vector<double>> entropy(c.sizes.size());
  parallel_for(c.sizes.size(), threads, [&](std::size_t k) {
    const auto geo = geometry_of(c, c.sizes[k]);
    const BasisPtr basis = enumerate_basis(geo, particle_count(c, geo));
    const StateVector psi0 = StateVector::product(basis, initial_bitmask(c, geo));
    const Bipartition part = Bipartition::half(geo);
    for (const StateVector& psi : trajectory(c, psi0, hf_operator(c, basis, 0.0), times, 0.0)) {
      entropy[k].push_back(entropy_schmidt(psi, part));
    }
  });

  ExperimentResult r;
  ResultTable table{"fig2_entropy", {"t", "entropy_bits", "entropy_over_max", "L"}, {}};
  for (std::size_t k = 0; k < c.sizes.size(); ++k) {
    const int length = c.sizes[k].first;
    const double max_entropy = 0.5 * length;
    double peak = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      table.add_row({times[i], entropy[k][i], entropy[k][i] / max_entropy, double(length)});
      peak = std::max(peak, entropy[k][i]);
    }
    r.diagnostics["max_entropy_bits"][std::to_string(length)] = peak;
  }
  r.diagnostics["max_entropy_definition"] = "L/2 bits";
  r.tables.push_back(std::move(table));
  return r;
}

ExperimentResult fig2_hamming_schmidt(const ExperimentConfig& c, unsigned threads) {
  const std::vector<double> times = c.time.times();
  struct Out {
    std::vector<std::vector<std::pair<int, double>>> hamming;
    std::vector<std::vector<double>> schmidt;
  };
  std::vector<Out> out(c.sizes.size());
  parallel_for(c.sizes.size(), threads, [&](std::size_t k) {
    const auto geo = geometry_of(c, c.sizes[k]);
    const BasisPtr basis = enumerate_basis(geo, particle_count(c, geo));
    const Bitmask ref = initial_bitmask(c, geo);
    const StateVector psi0 = StateVector::product(basis, ref);
    const Bipartition part = Bipartition::half(geo);
    for (const StateVector& psi : trajectory(c, psi0, hf_operator(c, basis, 0.0), times, 0.0)) {
      out[k].hamming.push_back(hamming_distribution(psi, ref));
      out[k].schmidt.push_back(schmidt_spectrum(psi, part));
    }
  });

  ResultTable hamming{"fig2_hamming", {"t", "d", "weight", "L"}, {}};
  ResultTable schmidt{"fig2_schmidt", {"t", "alpha", "lambda", "L"}, {}};
  for (std::size_t k = 0; k < c.sizes.size(); ++k) {
    const double length = c.sizes[k].first;
    for (std::size_t i = 0; i < times.size(); ++i) {
      for (const auto& [d, w] : out[k].hamming[i]) hamming.add_row({times[i], double(d), w, length});
      const auto& lambdas = out[k].schmidt[i];
      for (std::size_t a = 0; a < lambdas.size(); ++a) {
        schmidt.add_row({times[i], double(a), lambdas[a], length});
      }
    }
  }
  ExperimentResult r;
  r.tables.push_back(std::move(hamming));
  r.tables.push_back(std::move(schmidt));
  return r;
}

ExperimentResult fig3_single_particle(const ExperimentConfig& c, unsigned threads) {
  const std::vector<double> times = c.time.times();
  const double jx = c.j_cross.front();
  struct Out {
    std::vector<double> entropy;
    std::vector<BlochPoint> bloch;
    std::vector<std::vector<double>> densities;
  };
  std::vector<Out> out(c.sizes.size());
  parallel_for(c.sizes.size(), threads, [&](std::size_t k) {
    const auto geo = geometry_of(c, c.sizes[k]);
    const BasisPtr basis = enumerate_basis(geo, 1);
    const StateVector psi0 = StateVector::product(basis, initial_bitmask(c, geo));
    const Bipartition part = Bipartition::half(geo);
    const auto states = trajectory(c, psi0, hf_operator(c, basis, jx), times, jx);
    for (const StateVector& psi : states) {
      out[k].entropy.push_back(entropy_schmidt(psi, part));
      out[k].densities.push_back(site_densities(psi));
    }
    out[k].bloch = bloch_trajectory(states, geo.lx(), geo.ly());
  });

  ResultTable main{"fig3_single_particle",
                   {"t", "entropy_bits", "s1x", "s1y", "s1z", "s2x", "s2y", "s2z",
                    "opposite_corner_density", "Lx", "Ly"},
                   {}};
  ResultTable dens{"fig3_densities", {"t", "x", "y", "density", "Lx", "Ly"}, {}};
  ExperimentResult r;
  for (std::size_t k = 0; k < c.sizes.size(); ++k) {
    const auto [lx, ly] = c.sizes[k];
    const auto geo = geometry_of(c, c.sizes[k]);
    const int opposite = geo.site(lx - 1, ly - 1);
    double peak = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const BlochPoint& b = out[k].bloch[i];
      main.add_row({times[i], out[k].entropy[i], b[0], b[1], b[2], b[3], b[4], b[5],
                    out[k].densities[i][static_cast<std::size_t>(opposite)], double(lx), double(ly)});
      for (int s = 0; s < geo.num_sites(); ++s) {
        const auto [x, y] = geo.coords(s);
        dens.add_row({times[i], double(x), double(y), out[k].densities[i][static_cast<std::size_t>(s)],
                      double(lx), double(ly)});
      }
      peak = std::max(peak, out[k].entropy[i]);
    }
    r.diagnostics["max_entropy_bits"][size_label(c.sizes[k])] = peak;
  }
  r.diagnostics["bloch_convention"] = "site (0,0) <-> m1 = s1, m2 = s2";
  r.tables.push_back(std::move(main));
  r.tables.push_back(std::move(dens));
  return r;
}

// Overlap metric, or NaN with a recorded count when the metric degenerates.
struct OverlapRecorder {
  std::mutex mutex;
  std::map<std::string, int> degenerate;

  double operator()(const CVector& m_psi, const StateVector& psi, const std::string& label) {
    try {
      return overlap_from_action(m_psi, psi);
    } catch (const DegenerateMetricError&) {
      const std::lock_guard lock(mutex);
      ++degenerate[label];
      return kNaN;
    }
  }
};

ExperimentResult fig4_overlap(const ExperimentConfig& c, unsigned threads) {
  const std::vector<double> times = c.time.times();
  std::vector<std::vector<std::array<double, 3>>> out(c.sizes.size());
  OverlapRecorder overlap;
  parallel_for(c.sizes.size(), threads, [&](std::size_t k) {
    const auto geo = geometry_of(c, c.sizes[k]);
    const BasisPtr basis = enumerate_basis(geo, particle_count(c, geo));
    const StateVector psi0 = StateVector::product(basis, initial_bitmask(c, geo));
    const SparseHermitian hf = realize(build_hf_rect_nn(geo.lx(), geo.ly()), basis);
    const CommutatorSeries series(hf, h0_operator(basis));
    const auto states = Propagator::automatic(hf).propagate_series(psi0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      const StateVector& psi = states[i];
      const CMatrix spin = exact_2d_nn(geo.lx(), geo.ly(), t).dense;
      out[k].push_back({overlap(series.apply(t, 1, psi.amplitudes()), psi, "Trunc1"),
                        overlap(series.apply(t, 2, psi.amplitudes()), psi, "Trunc2"),
                        overlap(apply_one_body(spin, *basis, psi.amplitudes()), psi, "SpinPromoted")});
    }
  });

  ResultTable table{"fig4_overlap", {"t", "overlap_m1", "overlap_m2", "overlap_mspin", "Lx", "Ly"}, {}};
  for (std::size_t k = 0; k < c.sizes.size(); ++k) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto& o = out[k][i];
      table.add_row({times[i], o[0], o[1], o[2], double(c.sizes[k].first), double(c.sizes[k].second)});
    }
  }
  ExperimentResult r;
  r.diagnostics["degenerate_metric_samples"] = overlap.degenerate;
  r.tables.push_back(std::move(table));
  return r;
}

ExperimentResult fig5_overlap_jcross(const ExperimentConfig& c, unsigned threads) {
  const std::vector<double> times = c.time.times();
  const std::vector<SweepPoint> points = sweep(c);
  std::vector<std::vector<double>> out(points.size());
  OverlapRecorder overlap;
  parallel_for(points.size(), threads, [&](std::size_t k) {
    const auto geo = geometry_of(c, points[k].size);
    const BasisPtr basis = enumerate_basis(geo, particle_count(c, geo));
    const StateVector psi0 = StateVector::product(basis, initial_bitmask(c, geo));
    const SparseHermitian hf =
        realize(build_hf_rect_nnn(geo.lx(), geo.ly(), points[k].j_cross), basis);
    const CommutatorSeries series(hf, h0_operator(basis));
    const auto states = Propagator::automatic(hf).propagate_series(psi0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
      out[k].push_back(overlap(series.apply(times[i], 2, states[i].amplitudes()), states[i], "Trunc2"));
    }
  });

  ResultTable table{"fig5_overlap_jcross", {"t", "overlap_m2", "j_cross", "Lx", "Ly"}, {}};
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      table.add_row({times[i], out[k][i], points[k].j_cross, double(points[k].size.first),
                     double(points[k].size.second)});
    }
  }
  ExperimentResult r;
  r.diagnostics["degenerate_metric_samples"] = overlap.degenerate;
  r.tables.push_back(std::move(table));
  return r;
}

ExperimentResult fig6_spectral(const ExperimentConfig& c, unsigned threads) {
  const std::vector<double> times = c.time.times();
  const auto geo = geometry_of(c, c.sizes.front());
  const BasisPtr basis = enumerate_basis(geo, particle_count(c, geo));
  const CMatrix hf = hf_operator(c, basis, c.j_cross.front()).dense();
  const CMatrix h0 = h0_operator(basis).to_dense();
  const std::vector<ElementStats> stats = stats_timeseries(hf, h0, times, c.histogram_bins, threads);

  ExperimentResult r;
  ResultTable table{"fig6_spectral",
                    {"t", "diag_mean", "diag_std", "offdiag_std_re", "offdiag_std_im", "r_ratio"},
                    {}};
  for (const ElementStats& s : stats) {
    table.add_row({s.t, s.diag_mean, s.diag_std, s.offdiag_real_std, s.offdiag_imag_std, s.r_ratio});
  }

  // Histograms and spectrum checks at the snapshot times (all times if none are listed).
  const std::vector<double>& snaps = c.time.extra.empty() ? times : c.time.extra;
  ResultTable hist{"fig6_histograms", {"t", "class", "bin_left", "bin_right", "density"}, {}};
  const UnitaryConjugator conj(hf, h0);
  json snapshots = json::array();
  for (double t : snaps) {
    const CMatrix m = conj.at(t);
    const ElementStats s = element_stats(m, t, c.histogram_bins);
    const SpectrumCheck sc = spectrum_check(m, h0);
    const std::array<const Histogram*, 3> hs{&s.diag_hist, &s.offdiag_real_hist, &s.offdiag_imag_hist};
    for (std::size_t cls = 0; cls < hs.size(); ++cls) {
      const Histogram& h = *hs[cls];
      for (std::size_t b = 0; b < h.density.size(); ++b) {
        hist.add_row({t, double(cls), h.edges[b], h.edges[b + 1], h.density[b]});
      }
    }
    snapshots.push_back({{"t", t},
                         {"diag_mean", s.diag_mean},
                         {"diag_std", s.diag_std},
                         {"offdiag_real_mean", s.offdiag_real_mean},
                         {"offdiag_real_std", s.offdiag_real_std},
                         {"offdiag_imag_mean", s.offdiag_imag_mean},
                         {"offdiag_imag_std", s.offdiag_imag_std},
                         {"r_ratio", s.r_ratio},
                         {"isospectral_deviation", sc.max_deviation},
                         {"integer_gaps", sc.integer_gaps}});
  }
  // r fluctuates from sample to sample at this dimension; report its late-time mean.
  double r_late = 0.0;
  int n_late = 0;
  for (const ElementStats& s : stats) {
    if (s.t >= 20.0 && s.t <= 40.0) {
      r_late += s.r_ratio;
      ++n_late;
    }
  }

  r.diagnostics["histogram_classes"] = {"diagonal", "offdiag_real", "offdiag_imag"};
  r.diagnostics["snapshots"] = snapshots;
  if (n_late > 0) r.diagnostics["r_mean_t20_to_40"] = r_late / n_late;
  r.diagnostics["dimension"] = basis->dim();
  r.tables.push_back(std::move(table));
  r.tables.push_back(std::move(hist));
  return r;
}

ExperimentResult fig7_ghz(const ExperimentConfig& c, unsigned threads) {
  const std::vector<double> times = c.time.times();
  std::vector<std::vector<double>> fid(c.qubits.size());
  std::vector<double> residual(c.qubits.size(), kNaN);
  parallel_for(c.qubits.size(), threads, [&](std::size_t k) {
    const int n = c.qubits[k];
    if (!c.t_freeze) {
      fid[k] = ghz_fidelity_series(n, c.lambda, times);
      return;
    }
    std::vector<double> before;
    std::vector<double> offsets;
    for (double t : times) {
      if (t <= *c.t_freeze) {
        before.push_back(t);
      } else {
        offsets.push_back(t - *c.t_freeze);
      }
    }
    fid[k] = ghz_fidelity_series(n, c.lambda, before);
    const OatFreezeResult frozen = oat_freeze(n, c.lambda, *c.t_freeze, offsets);
    fid[k].insert(fid[k].end(), frozen.fidelity.begin(), frozen.fidelity.end());
    residual[k] = frozen.residual;
  });

  ExperimentResult r;
  ResultTable table{"fig7_ghz", {"t", "fidelity", "L"}, {}};
  for (std::size_t k = 0; k < c.qubits.size(); ++k) {
    const std::string key = std::to_string(c.qubits[k]);
    for (std::size_t i = 0; i < times.size(); ++i) table.add_row({times[i], fid[k][i], double(c.qubits[k])});
    const double t_ghz = kPi / (2.0 * c.lambda);
    r.diagnostics["fidelity_at_pi_over_2lambda"][key] = ghz_fidelity_series(c.qubits[k], c.lambda, {t_ghz}).front();
    if (c.t_freeze) r.diagnostics["freeze_residual"][key] = residual[k];
  }
  r.diagnostics["ghz_convention"] = "|0...0> <-> m = +s; target GHZ_{3pi/2} after R_x(-pi/2)";
  r.tables.push_back(std::move(table));
  return r;
}

// Entropy, overlap with the frozen state, and per-variant overlap metrics.
ExperimentResult trajectory_table(const ExperimentConfig& c, unsigned threads, bool freeze_columns) {
  const std::vector<double> times = c.time.times();
  const double jx = c.j_cross.front();
  struct Out {
    std::vector<std::vector<double>> rows;
  };
  std::vector<Out> out(c.sizes.size());
  OverlapRecorder overlap;
  parallel_for(c.sizes.size(), threads, [&](std::size_t k) {
    const auto geo = geometry_of(c, c.sizes[k]);
    const BasisPtr basis = enumerate_basis(geo, particle_count(c, geo));
    const StateVector psi0 = StateVector::product(basis, initial_bitmask(c, geo));
    const LinearOperator hf = hf_operator(c, basis, jx);
    const Bipartition part = Bipartition::half(geo);
    const auto states = trajectory(c, psi0, hf, times, jx);
    std::optional<StateVector> frozen;
    if (freeze_columns) frozen = Propagator::automatic(hf).propagate(psi0, *c.t_freeze);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const StateVector& psi = states[i];
      std::vector<double> row{times[i], entropy_schmidt(psi, part)};
      if (frozen) {
        row.push_back(std::abs(frozen->amplitudes().dot(psi.amplitudes())));
      } else {
        for (EmergentTag tag : c.variants) {
          const LinearOperator m = build_emergent(variant_at(c, tag, times[i], jx), basis);
          row.push_back(overlap(m * psi.amplitudes(), psi, std::string(to_string(tag))));
        }
      }
      row.push_back(double(geo.lx()));
      row.push_back(double(geo.ly()));
      out[k].rows.push_back(std::move(row));
    }
  });

  ResultTable table{std::string(to_string(c.experiment)), {"t", "entropy_bits"}, {}};
  if (freeze_columns) {
    table.columns.push_back("overlap_frozen");
  } else {
    for (EmergentTag tag : c.variants) table.columns.push_back("overlap_" + std::string(to_string(tag)));
  }
  table.columns.push_back("Lx");
  table.columns.push_back("Ly");
  for (Out& o : out) {
    for (auto& row : o.rows) table.add_row(std::move(row));
  }
  ExperimentResult r;
  r.diagnostics["degenerate_metric_samples"] = overlap.degenerate;
  r.tables.push_back(std::move(table));
  return r;
}

}  // namespace

ExperimentResult compute_experiment(const ExperimentConfig& cfg, unsigned threads) {
  switch (cfg.experiment) {
    case Experiment::fig2_entropy:
      return fig2_entropy(cfg, threads);
    case Experiment::fig2_hamming_schmidt:
      return fig2_hamming_schmidt(cfg, threads);
    case Experiment::fig3_single_particle:
      return fig3_single_particle(cfg, threads);
    case Experiment::fig4_overlap:
      return fig4_overlap(cfg, threads);
    case Experiment::fig5_overlap_jcross:
      return fig5_overlap_jcross(cfg, threads);
    case Experiment::fig6_spectral:
      return fig6_spectral(cfg, threads);
    case Experiment::fig7_ghz:
      return fig7_ghz(cfg, threads);
    case Experiment::freeze_demo:
      return trajectory_table(cfg, threads, true);
    case Experiment::custom:
      return trajectory_table(cfg, threads, false);
  }
  throw DomainError("unknown experiment");
}

}  // namespace emfreeze
