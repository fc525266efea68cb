#include "emfreeze/models.hpp"

#include <cmath>
#include <string>

namespace emfreeze {

namespace {

void require_min(int value, int min, const char* what) {
  if (value < min) {
    throw DomainError(std::string(what) + " must be at least " + std::to_string(min));
  }
}

CMatrix reversed(const CMatrix& m) { return m.reverse(); }

}  // namespace

SpinOps SpinOps::site_ordered() const {
  return SpinOps{s, reversed(sx), reversed(sy), reversed(sz), reversed(sp), reversed(sm)};
}

SpinOps build_spin_ops(double s) {
  const double twice = 2.0 * s;
  if (s < 0.0 || std::abs(twice - std::round(twice)) > 1e-12) {
    throw DomainError("spin quantum number must be a non-negative multiple of 1/2");
  }
  const int d = static_cast<int>(std::lround(twice)) + 1;
  SpinOps ops{s, CMatrix::Zero(d, d), CMatrix::Zero(d, d), CMatrix::Zero(d, d),
              CMatrix::Zero(d, d), CMatrix::Zero(d, d)};
  for (int k = 0; k < d; ++k) {
    const double m = -s + k;
    ops.sz(k, k) = m;
    if (k + 1 < d) {
      // <m+1| S+ |m> = sqrt(s(s+1) - m(m+1))
      ops.sp(k + 1, k) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
    }
  }
  ops.sm = ops.sp.adjoint();
  ops.sx = 0.5 * (ops.sp + ops.sm);
  ops.sy = (ops.sp - ops.sm) / (2.0 * kI);
  return ops;
}

CMatrix two_spin_product(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index nx = a.rows();
  const Eigen::Index ny = b.rows();
  CMatrix out(nx * ny, nx * ny);
  for (Eigen::Index by = 0; by < ny; ++by) {
    for (Eigen::Index cy = 0; cy < ny; ++cy) {
      out.block(by * nx, cy * nx, nx, nx) = b(by, cy) * a;
    }
  }
  return out;
}

double transfer_amplitude(int l, int length) {
  return 0.5 * std::sqrt(static_cast<double>(l) * static_cast<double>(length - l));
}

TermSpec build_h0_chain(int length) {
  require_min(length, 2, "chain length");
  TermSpec spec;
  for (int l = 0; l < length; ++l) spec.density(l, l);
  return spec;
}

TermSpec build_hf_chain(int length) {
  require_min(length, 2, "chain length");
  TermSpec spec;
  for (int l = 1; l < length; ++l) spec.hop(l, l - 1, transfer_amplitude(l, length));
  return spec;
}

TermSpec build_h0_rect(int lx, int ly) {
  require_min(lx, 2, "Lx");
  require_min(ly, 2, "Ly");
  const auto geo = LatticeGeometry::rectangle(lx, ly);
  TermSpec spec;
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) spec.density(geo.site(x, y), x + y);
  }
  return spec;
}

TermSpec build_hf_rect_nn(int lx, int ly) {
  require_min(lx, 2, "Lx");
  require_min(ly, 2, "Ly");
  const auto geo = LatticeGeometry::rectangle(lx, ly);
  TermSpec spec;
  for (int y = 0; y < ly; ++y) {
    for (int x = 1; x < lx; ++x) {
      spec.hop(geo.site(x, y), geo.site(x - 1, y), transfer_amplitude(x, lx));
    }
  }
  for (int y = 1; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      spec.hop(geo.site(x, y), geo.site(x, y - 1), transfer_amplitude(y, ly));
    }
  }
  return spec;
}

TermSpec build_hf_rect_nnn(int lx, int ly, double j_cross) {
  TermSpec spec = build_hf_rect_nn(lx, ly);
  if (j_cross == 0.0) return spec;
  const auto geo = LatticeGeometry::rectangle(lx, ly);
  for (int y = 0; y + 1 < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      const int from = geo.site(x, y);
      if (geo.contains(x - 1, y + 1)) spec.hop(geo.site(x - 1, y + 1), from, j_cross);
      if (geo.contains(x + 1, y + 1)) spec.hop(geo.site(x + 1, y + 1), from, j_cross);
    }
  }
  return spec;
}

CMatrix build_two_spin_hf(int lx, int ly, bool interacting) {
  require_min(lx, 2, "Lx");
  require_min(ly, 2, "Ly");
  const SpinOps s1 = build_spin_ops(0.5 * (lx - 1)).site_ordered();
  const SpinOps s2 = build_spin_ops(0.5 * (ly - 1)).site_ordered();
  const CMatrix id1 = CMatrix::Identity(lx, lx);
  const CMatrix id2 = CMatrix::Identity(ly, ly);
  CMatrix h = two_spin_product(s1.sx, id2) + two_spin_product(id1, s2.sx);
  if (interacting) h += two_spin_product(s1.sx, s2.sx);
  return h;
}

}  // namespace emfreeze
