#pragma once

#include <variant>

#include "emfreeze/common.hpp"
#include "emfreeze/sparse_operators.hpp"

namespace emfreeze {

/// Hermitian generator held either sparse or dense. Used wherever the same code
/// must accept lattice operators and dense spin-space matrices.
class LinearOperator {
 public:
  LinearOperator(const SparseOperator& op) : storage_(op.matrix()) {}  // NOLINT
  LinearOperator(CSparse m) : storage_(std::move(m)) {}                // NOLINT
  LinearOperator(CMatrix m) : storage_(std::move(m)) {}                // NOLINT

  Eigen::Index dim() const {
    return std::visit([](const auto& m) { return m.rows(); }, storage_);
  }
  bool is_dense() const noexcept { return std::holds_alternative<CMatrix>(storage_); }

  CVector operator*(const CVector& v) const {
    return std::visit([&v](const auto& m) -> CVector { return m * v; }, storage_);
  }
  CMatrix dense() const {
    return std::visit([](const auto& m) { return CMatrix(m); }, storage_);
  }

 private:
  std::variant<CSparse, CMatrix> storage_;
};

}  // namespace emfreeze
