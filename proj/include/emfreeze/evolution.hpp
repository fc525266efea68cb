#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "emfreeze/common.hpp"
#include "emfreeze/emergent.hpp"
#include "emfreeze/linear_operator.hpp"
#include "emfreeze/sparse_operators.hpp"

namespace emfreeze {

/// Above this dimension Propagator::automatic switches from dense
/// diagonalization to Krylov stepping.
inline constexpr std::size_t kAutoDenseThreshold = 2000;

struct KrylovOptions {
  int krylov_dim = 30;
  double tolerance = 1e-10;  // local error per step
  double max_step = 1.0;
  int max_substeps = 200000;
};

/// exp(-i H t) acting on states, for a fixed Hermitian generator H.
class Propagator {
 public:
  enum class Method { DenseEigen, KrylovExpm };

  static Propagator dense(const LinearOperator& op);
  static Propagator krylov(LinearOperator op, KrylovOptions options = {});
  static Propagator automatic(const LinearOperator& op,
                              std::size_t dense_threshold = kAutoDenseThreshold);

  Method method() const noexcept { return method_; }
  Eigen::Index dim() const noexcept { return dim_; }

  CVector propagate(const CVector& psi0, double t) const;
  StateVector propagate(const StateVector& psi0, double t) const;

  /// States at each of the ascending times (measured from psi0). Krylov runs
  /// step incrementally between samples.
  std::vector<CVector> propagate_series(const CVector& psi0, const std::vector<double>& times) const;
  std::vector<StateVector> propagate_series(const StateVector& psi0,
                                            const std::vector<double>& times) const;

 private:
  Propagator(Method method, LinearOperator op, Eigen::Index dim)
      : method_(method), op_(std::move(op)), dim_(dim) {}

  CVector krylov_step(const CVector& psi, double t) const;

  Method method_;
  LinearOperator op_;
  Eigen::Index dim_;
  KrylovOptions options_;
  RVector energies_;
  CMatrix vectors_;
};

/// Quench Hf -> M(t_freeze).
struct FreezePlan {
  LinearOperator hf;
  EmergentVariant variant;  // variant.t must equal t_freeze
  double t_freeze = 0.0;
  std::vector<double> post_times;  // offsets after the quench, ascending
};

struct FreezeTrajectory {
  StateVector at_freeze;
  std::vector<StateVector> post;  // one per post_times entry
};

FreezeTrajectory run_freeze(const StateVector& psi0, const FreezePlan& plan);

/// (<S1x>, <S1y>, <S1z>, <S2x>, <S2y>, <S2z>) for single-excitation states on a
/// rectangle, with the corner (0,0) mapped to m1 = s1, m2 = s2.
using BlochPoint = std::array<double, 6>;
std::vector<BlochPoint> bloch_trajectory(const std::vector<StateVector>& psi_series, int lx,
                                         int ly);

}  // namespace emfreeze
