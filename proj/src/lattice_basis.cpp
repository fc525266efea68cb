#include "emfreeze/lattice_basis.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "emfreeze/sparse_operators.hpp"

namespace emfreeze {

LatticeGeometry LatticeGeometry::chain(int length) {
  if (length < 2 || length > kMaxSites) {
    throw DomainError("chain length must lie in [2, " + std::to_string(kMaxSites) + "], got " +
                      std::to_string(length));
  }
  return LatticeGeometry(Kind::chain, length, 1);
}

LatticeGeometry LatticeGeometry::rectangle(int lx, int ly) {
  if (lx < 1 || ly < 1 || lx * ly < 2 || lx * ly > kMaxSites) {
    throw DomainError("rectangle " + std::to_string(lx) + "x" + std::to_string(ly) +
                      " must have between 2 and " + std::to_string(kMaxSites) + " sites");
  }
  return LatticeGeometry(Kind::rectangle, lx, ly);
}

int LatticeGeometry::site(int x, int y) const {
  if (!contains(x, y)) {
    throw DomainError("coordinates (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") outside the lattice");
  }
  return x + lx_ * y;
}

std::pair<int, int> LatticeGeometry::coords(int s) const {
  if (s < 0 || s >= num_sites()) {
    throw DomainError("site " + std::to_string(s) + " outside the lattice");
  }
  return {s % lx_, s / lx_};
}

namespace {

// Gosper's hack: next larger integer with the same popcount.
Bitmask next_combination(Bitmask v) {
  const Bitmask t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (countr_zero(v) + 1));
}

}  // namespace

FockBasis::FockBasis(LatticeGeometry geometry, int n_particles)
    : geometry_(geometry), n_particles_(n_particles) {
  const int ns = geometry_.num_sites();
  if (n_particles < 0 || n_particles > ns) {
    throw DomainError("particle number " + std::to_string(n_particles) +
                      " outside [0, " + std::to_string(ns) + "]");
  }
  if (n_particles == 0) {
    states_.push_back(0);
  } else {
    const Bitmask first =
        (n_particles == kMaxSites) ? ~Bitmask{0} : (Bitmask{1} << n_particles) - 1;
    const Bitmask last = first << (ns - n_particles);
    Bitmask v = first;
    while (true) {
      states_.push_back(v);
      if (v == last) break;
      v = next_combination(v);
    }
  }
  index_.reserve(states_.size());
  for (std::size_t k = 0; k < states_.size(); ++k) index_.emplace(states_[k], k);
}

std::optional<std::size_t> FockBasis::index_of(Bitmask b) const {
  if (auto it = index_.find(b); it != index_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::size_t> FockBasis::index_of_sorted(Bitmask b) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), b);
  if (it == states_.end() || *it != b) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

BasisPtr enumerate_basis(const LatticeGeometry& geometry, int n) {
  return std::make_shared<const FockBasis>(geometry, n);
}

int hamming_distance(Bitmask a, Bitmask b) noexcept { return popcount(a ^ b); }

Bitmask occupation(const std::vector<int>& sites) {
  Bitmask b = 0;
  for (int s : sites) {
    if (s < 0 || s >= kMaxSites) throw DomainError("site index out of range");
    const Bitmask bit = Bitmask{1} << s;
    if (b & bit) throw DomainError("site " + std::to_string(s) + " listed twice");
    b |= bit;
  }
  return b;
}

std::vector<std::pair<int, double>> hamming_distribution(const StateVector& psi,
                                                         Bitmask reference) {
  const FockBasis& basis = *psi.basis();
  const int ns = basis.num_sites();
  if (ns < kMaxSites && (reference >> ns) != 0) {
    throw DomainError("reference bitmask has bits beyond the lattice");
  }
  std::vector<double> weight(static_cast<std::size_t>(ns) + 1, 0.0);
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    weight[static_cast<std::size_t>(hamming_distance(basis.state(k), reference))] +=
        std::norm(psi[k]);
  }
  std::vector<std::pair<int, double>> out;
  out.reserve(weight.size());
  for (int d = 0; d <= ns; ++d) out.emplace_back(d, weight[static_cast<std::size_t>(d)]);
  return out;
}

}  // namespace emfreeze
