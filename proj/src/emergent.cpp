#include "emfreeze/emergent.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "emfreeze/models.hpp"
#include "emfreeze/oat_dicke.hpp"

namespace emfreeze {

namespace {

void require_order(int order) {
  if (order != 1 && order != 2) throw DomainError("truncation order must be 1 or 2");
}

void require_lattice(int lx, int ly) {
  if (lx < 2 || ly < 2) throw DomainError("rectangle sides must be at least 2");
}

}  // namespace

// --- closed forms ------------------------------------------------------------

TermSpec exact_1d(int length, double t) {
  if (length < 2) throw DomainError("chain length must be at least 2");
  const double centre = 0.5 * (length - 1);
  const double c = std::cos(t);
  const double s = std::sin(t);
  TermSpec spec;
  for (int l = 0; l < length; ++l) spec.density(l, centre + c * (l - centre));
  if (s != 0.0) {
    for (int l = 1; l < length; ++l) spec.hop(l, l - 1, kI * s * transfer_amplitude(l, length));
  }
  return spec;
}

Exact2dNN exact_2d_nn(int lx, int ly, double t) {
  require_lattice(lx, ly);
  const double s1 = 0.5 * (lx - 1);
  const double s2 = 0.5 * (ly - 1);
  const double c = std::cos(t);
  const double s = std::sin(t);

  const SpinOps a = build_spin_ops(s1).site_ordered();
  const SpinOps b = build_spin_ops(s2).site_ordered();
  const CMatrix ia = CMatrix::Identity(lx, lx);
  const CMatrix ib = CMatrix::Identity(ly, ly);
  CMatrix dense = (s1 + s2) * CMatrix::Identity(lx * ly, lx * ly) +
                  s * (two_spin_product(a.sy, ib) + two_spin_product(ia, b.sy)) -
                  c * (two_spin_product(a.sz, ib) + two_spin_product(ia, b.sz));

  const auto geo = LatticeGeometry::rectangle(lx, ly);
  TermSpec hopping;
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) hopping.density(geo.site(x, y), s1 + s2 + c * (x + y - s1 - s2));
  }
  if (s != 0.0) {
    for (int y = 0; y < ly; ++y) {
      for (int x = 1; x < lx; ++x) {
        hopping.hop(geo.site(x, y), geo.site(x - 1, y), kI * s * transfer_amplitude(x, lx));
      }
    }
    for (int y = 1; y < ly; ++y) {
      for (int x = 0; x < lx; ++x) {
        hopping.hop(geo.site(x, y), geo.site(x, y - 1), kI * s * transfer_amplitude(y, ly));
      }
    }
  }
  return {std::move(dense), std::move(hopping)};
}

CMatrix exact_2d_twospin_nnn(int lx, int ly, double t) {
  require_lattice(lx, ly);
  const double s1 = 0.5 * (lx - 1);
  const double s2 = 0.5 * (ly - 1);
  const SpinOps a = build_spin_ops(s1).site_ordered();
  const SpinOps b = build_spin_ops(s2).site_ordered();

  const CMatrix shifted_a = CMatrix::Identity(lx, lx) + a.sx;
  const CMatrix shifted_b = CMatrix::Identity(ly, ly) + b.sx;
  const CMatrix sin_a = linalg::matrix_function(shifted_a, [t](double w) { return std::sin(w * t); });
  const CMatrix cos_a = linalg::matrix_function(shifted_a, [t](double w) { return std::cos(w * t); });
  const CMatrix sin_b = linalg::matrix_function(shifted_b, [t](double w) { return std::sin(w * t); });
  const CMatrix cos_b = linalg::matrix_function(shifted_b, [t](double w) { return std::cos(w * t); });

  CMatrix m = (s1 + s2) * CMatrix::Identity(lx * ly, lx * ly) + two_spin_product(sin_a, b.sy) -
              two_spin_product(cos_a, b.sz) + two_spin_product(a.sy, sin_b) -
              two_spin_product(a.sz, cos_b);
  return hermitize_dense(m, 1e-12);
}

// --- numerically exact ---------------------------------------------------------

CMatrix hermitize_dense(const CMatrix& m, double tol) {
  const double r = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (r >= tol) {
    std::ostringstream msg;
    msg << "dense operator Hermiticity residual " << r << " exceeds " << tol;
    throw NumericalError(msg.str());
  }
  return 0.5 * (m + m.adjoint());
}

UnitaryConjugator::UnitaryConjugator(const CMatrix& hf, const CMatrix& h0, std::size_t dense_cap)
    : h0_(h0) {
  if (hf.rows() != h0.rows() || hf.cols() != h0.cols() || hf.rows() != hf.cols()) {
    throw BasisMismatch("Hf and H0 must be square and of equal dimension");
  }
  if (static_cast<std::size_t>(hf.rows()) > dense_cap) {
    std::ostringstream msg;
    msg << "dimension " << hf.rows() << " exceeds the dense cap " << dense_cap;
    throw CapacityError(msg.str());
  }
  if (linalg::is_real(hf)) {
    linalg::RealEigen e = linalg::eigh(RMatrix(hf.real()));
    energies_ = std::move(e.values);
    vectors_ = e.vectors.cast<cplx>();
  } else {
    linalg::ComplexEigen e = linalg::eigh(hf);
    energies_ = std::move(e.values);
    vectors_ = std::move(e.vectors);
  }
  h0_rotated_ = vectors_.adjoint() * h0 * vectors_;
}

CMatrix UnitaryConjugator::at(double t) const {
  if (t == 0.0) return h0_;
  const Eigen::Index n = energies_.size();
  CVector phase(n);
  for (Eigen::Index k = 0; k < n; ++k) phase(k) = std::exp(-kI * energies_(k) * t);
  // (Phi W Phi^*)_{kl} = e^{-i (E_k - E_l) t} W_{kl}
  const CMatrix inner = phase.asDiagonal() * h0_rotated_ * phase.conjugate().asDiagonal();
  return hermitize_dense(vectors_ * inner * vectors_.adjoint());
}

CMatrix unitary_exact(const SparseHermitian& hf, const SparseHermitian& h0, double t,
                      std::size_t dense_cap) {
  if (!(*hf.basis() == *h0.basis())) throw BasisMismatch("Hf and H0 act on different bases");
  if (hf.dim() > dense_cap) {
    std::ostringstream msg;
    msg << "dimension " << hf.dim() << " exceeds the dense cap " << dense_cap;
    throw CapacityError(msg.str());
  }
  return UnitaryConjugator(hf.to_dense(), h0.to_dense(), dense_cap).at(t);
}

CMatrix unitary_exact(const CMatrix& hf, const CMatrix& h0, double t, std::size_t dense_cap) {
  return UnitaryConjugator(hf, h0, dense_cap).at(t);
}

// --- truncated series ----------------------------------------------------------

CommutatorSeries::CommutatorSeries(const SparseHermitian& hf, const SparseHermitian& h0)
    : h0_(h0), h1_(commutator(hf, h0)), h2_(commutator(hf, h1_)) {}

SparseHermitian CommutatorSeries::at(double t, int order) const {
  require_order(order);
  SparseOperator m = h0_ + (-kI * t) * h1_;
  if (order == 2) m = m + cplx(-0.5 * t * t) * h2_;
  return hermitize(m);
}

CVector CommutatorSeries::apply(double t, int order, const CVector& v) const {
  require_order(order);
  CVector out = h0_ * v - kI * t * (h1_ * v);
  if (order == 2) out -= 0.5 * t * t * (h2_ * v);
  return out;
}

SparseHermitian trunc_numeric(const SparseHermitian& hf, const SparseHermitian& h0, double t,
                              int order) {
  require_order(order);
  return CommutatorSeries(hf, h0).at(t, order);
}

namespace {

// -i t [Hf, H0] for a single hop amp a_i^dag a_j + H.c. against H0 = sum w n:
// [a_i^dag a_j, H0] = (w_j - w_i) a_i^dag a_j.
void add_first_order_current(TermSpec& spec, int i, int j, cplx amp, double wi, double wj,
                             double t) {
  const cplx c = -kI * t * amp * (wj - wi);
  if (c != cplx{}) spec.hop(i, j, c);
}

}  // namespace

TermSpec trunc_appendix_nn(int lx, int ly, double t, int order) {
  require_lattice(lx, ly);
  require_order(order);
  const auto geo = LatticeGeometry::rectangle(lx, ly);
  TermSpec spec;

  // H0
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) spec.density(geo.site(x, y), x + y);
  }

  // First order: current-like terms -(t/2) sqrt(l(L-l)) {i a_lower^dag a_upper + H.c.}
  // on every bond, sqrt(l(L-l)) / 2 being the bond amplitude.
  for (int y = 0; y < ly; ++y) {
    for (int x = 1; x < lx; ++x) {
      spec.hop(geo.site(x - 1, y), geo.site(x, y), -kI * t * transfer_amplitude(x, lx));
    }
  }
  for (int y = 1; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      spec.hop(geo.site(x, y - 1), geo.site(x, y), -kI * t * transfer_amplitude(y, ly));
    }
  }
  if (order == 1) return spec;

  // Second order, prefactor -t^2/4.
  const double pre = -0.25 * t * t;

  // On-site renormalization. Along each axis a site gains 4 J_in^2 from the bond
  // arriving at it and loses 4 J_out^2 to the bond leaving it, where
  // 4 J^2 = l (L - l) for the bond (l-1, l).
  auto renorm = [](int l, int length) {
    const double in = (l >= 1) ? 4.0 * std::pow(transfer_amplitude(l, length), 2) : 0.0;
    const double out = (l + 1 < length) ? 4.0 * std::pow(transfer_amplitude(l + 1, length), 2) : 0.0;
    return in - out;
  };
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      const double w = renorm(x, lx) + renorm(y, ly);
      if (w != 0.0) spec.density(geo.site(x, y), pre * w);
    }
  }

  // Density-assisted hopping across each plaquette A=(x,y), B=A+x, C=A+y, D=A+x+y:
  // 2 sqrt(lx(Lx-lx)) sqrt(ly(Ly-ly)) (n_D - n_A)(a_B^dag a_C + a_C^dag a_B).
  for (int y = 0; y + 1 < ly; ++y) {
    for (int x = 0; x + 1 < lx; ++x) {
      const double jx2 = 2.0 * transfer_amplitude(x + 1, lx);
      const double jy2 = 2.0 * transfer_amplitude(y + 1, ly);
      const cplx amp = pre * 2.0 * jx2 * jy2;
      const int a = geo.site(x, y);
      const int b = geo.site(x + 1, y);
      const int c = geo.site(x, y + 1);
      const int d = geo.site(x + 1, y + 1);
      spec.assisted_hop(d, b, c, amp);
      spec.assisted_hop(a, b, c, -amp);
    }
  }
  return spec;
}

TermSpec trunc_appendix_nnn(int lx, int ly, double j_cross, double t) {
  TermSpec spec = trunc_appendix_nn(lx, ly, t, 1);
  if (j_cross == 0.0) return spec;
  const auto geo = LatticeGeometry::rectangle(lx, ly);
  // Diagonal current families a_{l-x+y}^dag a_l and a_{l+x+y}^dag a_l.
  for (int y = 0; y + 1 < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      const int from = geo.site(x, y);
      const double w_from = x + y;
      if (geo.contains(x - 1, y + 1)) {
        add_first_order_current(spec, geo.site(x - 1, y + 1), from, j_cross, x - 1 + y + 1, w_from, t);
      }
      if (geo.contains(x + 1, y + 1)) {
        add_first_order_current(spec, geo.site(x + 1, y + 1), from, j_cross, x + 1 + y + 1, w_from, t);
      }
    }
  }
  return spec;
}

SparseHermitian spin_promoted(int lx, int ly, double t, BasisPtr basis) {
  const auto& geo = basis->geometry();
  if (geo.kind() != LatticeGeometry::Kind::rectangle || geo.lx() != lx || geo.ly() != ly) {
    throw DomainError("basis geometry does not match the requested rectangle");
  }
  return realize(exact_2d_nn(lx, ly, t).hopping, std::move(basis));
}

// --- dispatch ------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<EmergentTag, std::string_view>, 11> kTagNames{{
    {EmergentTag::Exact1D, "Exact1D"},
    {EmergentTag::Exact2D_NN, "Exact2D_NN"},
    {EmergentTag::Exact2D_TwoSpinNNN, "Exact2D_TwoSpinNNN"},
    {EmergentTag::UnitaryExact, "UnitaryExact"},
    {EmergentTag::Trunc1, "Trunc1"},
    {EmergentTag::Trunc2, "Trunc2"},
    {EmergentTag::Trunc1_Appendix, "Trunc1_Appendix"},
    {EmergentTag::Trunc2_Appendix, "Trunc2_Appendix"},
    {EmergentTag::Trunc1_NNN_Appendix, "Trunc1_NNN_Appendix"},
    {EmergentTag::SpinPromoted, "SpinPromoted"},
    {EmergentTag::OAT, "OAT"},
}};

void require_single_excitation(const FockBasis& basis) {
  if (basis.n_particles() != 1) {
    throw DomainError("single-excitation closed form used outside the one-particle sector");
  }
}

void require_rectangle(const FockBasis& basis) {
  if (basis.geometry().kind() != LatticeGeometry::Kind::rectangle) {
    throw DomainError("variant requires a rectangular lattice");
  }
}

std::pair<SparseHermitian, SparseHermitian> lattice_model(const EmergentVariant& v,
                                                          const BasisPtr& basis) {
  const auto& geo = basis->geometry();
  if (geo.kind() == LatticeGeometry::Kind::chain) {
    return {realize(build_hf_chain(geo.lx()), basis), realize(build_h0_chain(geo.lx()), basis)};
  }
  return {realize(build_hf_rect_nnn(geo.lx(), geo.ly(), v.j_cross), basis),
          realize(build_h0_rect(geo.lx(), geo.ly()), basis)};
}

}  // namespace

std::string_view to_string(EmergentTag tag) {
  for (const auto& [t, name] : kTagNames) {
    if (t == tag) return name;
  }
  return "?";
}

std::optional<EmergentTag> parse_emergent_tag(std::string_view name) {
  for (const auto& [t, n] : kTagNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

bool is_exact(EmergentTag tag) noexcept {
  switch (tag) {
    case EmergentTag::Exact1D:
    case EmergentTag::Exact2D_NN:
    case EmergentTag::Exact2D_TwoSpinNNN:
    case EmergentTag::UnitaryExact:
    case EmergentTag::OAT:
      return true;
    default:
      return false;
  }
}

LinearOperator build_emergent(const EmergentVariant& v, const BasisPtr& basis) {
  const FockBasis& fb = *basis;
  const auto& geo = fb.geometry();
  switch (v.tag) {
    case EmergentTag::Exact1D:
      if (geo.kind() != LatticeGeometry::Kind::chain) throw DomainError("Exact1D needs a chain");
      return realize(exact_1d(geo.lx(), v.t), basis);
    case EmergentTag::Exact2D_NN:
      require_rectangle(fb);
      require_single_excitation(fb);
      return exact_2d_nn(geo.lx(), geo.ly(), v.t).dense;
    case EmergentTag::Exact2D_TwoSpinNNN:
      require_rectangle(fb);
      require_single_excitation(fb);
      return exact_2d_twospin_nnn(geo.lx(), geo.ly(), v.t);
    case EmergentTag::UnitaryExact: {
      auto [hf, h0] = lattice_model(v, basis);
      return unitary_exact(hf, h0, v.t, v.dense_cap);
    }
    case EmergentTag::Trunc1:
    case EmergentTag::Trunc2: {
      auto [hf, h0] = lattice_model(v, basis);
      return trunc_numeric(hf, h0, v.t, v.tag == EmergentTag::Trunc1 ? 1 : 2);
    }
    case EmergentTag::Trunc1_Appendix:
    case EmergentTag::Trunc2_Appendix:
      require_rectangle(fb);
      return realize(trunc_appendix_nn(geo.lx(), geo.ly(), v.t,
                                       v.tag == EmergentTag::Trunc1_Appendix ? 1 : 2),
                     basis);
    case EmergentTag::Trunc1_NNN_Appendix:
      require_rectangle(fb);
      return realize(trunc_appendix_nnn(geo.lx(), geo.ly(), v.j_cross, v.t), basis);
    case EmergentTag::SpinPromoted:
      require_rectangle(fb);
      return spin_promoted(geo.lx(), geo.ly(), v.t, basis);
    case EmergentTag::OAT:
      return oat_emergent(fb.num_sites(), v.lambda, v.t);
  }
  throw DomainError("unknown emergent variant");
}

}  // namespace emfreeze
