#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "emfreeze/common.hpp"

namespace emfreeze {

/// Occupation bitmask: bit b set <=> site b occupied. 128 bits so that 10x10
/// lattices fit.
__extension__ typedef unsigned __int128 Bitmask;

inline constexpr int kMaxSites = 128;

constexpr int popcount(Bitmask b) noexcept {
  return std::popcount(static_cast<std::uint64_t>(b)) +
         std::popcount(static_cast<std::uint64_t>(b >> 64));
}

/// Index of the lowest set bit; b must be non-zero.
constexpr int countr_zero(Bitmask b) noexcept {
  const auto lo = static_cast<std::uint64_t>(b);
  return lo ? std::countr_zero(lo) : 64 + std::countr_zero(static_cast<std::uint64_t>(b >> 64));
}

constexpr bool test_bit(Bitmask b, int s) noexcept { return ((b >> s) & 1U) != 0; }

struct BitmaskHash {
  std::size_t operator()(Bitmask b) const noexcept {
    const auto lo = static_cast<std::uint64_t>(b);
    const auto hi = static_cast<std::uint64_t>(b >> 64);
    return std::hash<std::uint64_t>{}(lo ^ (hi * 0x9E3779B97F4A7C15ULL));
  }
};

/// Open-boundary chain or rectangle. Rectangle sites are numbered
/// site(lx, ly) = lx + Lx * ly.
class LatticeGeometry {
 public:
  enum class Kind { chain, rectangle };

  static LatticeGeometry chain(int length);
  static LatticeGeometry rectangle(int lx, int ly);

  Kind kind() const noexcept { return kind_; }
  int lx() const noexcept { return lx_; }
  int ly() const noexcept { return ly_; }
  int num_sites() const noexcept { return lx_ * ly_; }

  int site(int x, int y) const;
  std::pair<int, int> coords(int site) const;
  bool contains(int x, int y) const noexcept {
    return x >= 0 && x < lx_ && y >= 0 && y < ly_;
  }

  bool operator==(const LatticeGeometry&) const = default;

 private:
  LatticeGeometry(Kind kind, int lx, int ly) : kind_(kind), lx_(lx), ly_(ly) {}
  Kind kind_;
  int lx_;
  int ly_;  // 1 for chains
};

/// All occupation bitmasks with a fixed particle number, in ascending order.
class FockBasis {
 public:
  FockBasis(LatticeGeometry geometry, int n_particles);

  const LatticeGeometry& geometry() const noexcept { return geometry_; }
  int num_sites() const noexcept { return geometry_.num_sites(); }
  int n_particles() const noexcept { return n_particles_; }
  std::size_t dim() const noexcept { return states_.size(); }

  const std::vector<Bitmask>& states() const noexcept { return states_; }
  Bitmask state(std::size_t k) const { return states_.at(k); }

  /// Ordinal of a bitmask, or nullopt when it is not in this sector.
  std::optional<std::size_t> index_of(Bitmask b) const;
  /// Same lookup by binary search over the sorted state list.
  std::optional<std::size_t> index_of_sorted(Bitmask b) const;

  bool operator==(const FockBasis& other) const {
    return geometry_ == other.geometry_ && n_particles_ == other.n_particles_;
  }

 private:
  LatticeGeometry geometry_;
  int n_particles_;
  std::vector<Bitmask> states_;
  std::unordered_map<Bitmask, std::size_t, BitmaskHash> index_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

BasisPtr enumerate_basis(const LatticeGeometry& geometry, int n);

int hamming_distance(Bitmask a, Bitmask b) noexcept;

/// Bitmask with the given sites occupied.
Bitmask occupation(const std::vector<int>& sites);

class StateVector;

/// Weight of psi on Fock states at each Hamming distance d = 0..N_s from reference.
std::vector<std::pair<int, double>> hamming_distribution(const StateVector& psi,
                                                         Bitmask reference);

}  // namespace emfreeze
