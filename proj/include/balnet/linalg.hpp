#pragma once

// Dense symmetric-matrix primitives. Every matrix function (square root,
// inverse, log-determinant) goes through one symmetric eigendecomposition.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "balnet/error.hpp"
#include "balnet/index_set.hpp"

namespace balnet {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Symmetric p×p matrices are carried as plain dense Eigen matrices; the
/// symmetry invariant is checked at the operation boundaries.
template <typename Scalar>
using SymMatrixX = MatrixX<Scalar>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using SymMatrix = SymMatrixX<double>;

/// Eigenvalues in ascending order with orthonormal column eigenvectors.
template <typename Scalar>
struct EigenPair {
  VectorX<Scalar> values;
  MatrixX<Scalar> vectors;

  Scalar min_value() const { return values(0); }
  Scalar max_abs_value() const {
    return std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
  }
};

template <typename Scalar>
struct MatrixNorms {
  Scalar elem_max;  // max |A_ij|
  Scalar fro;
  Scalar op2;       // spectral norm (max |eigenvalue| for symmetric input)
  Scalar row_sum;   // |||A|||_inf, max absolute row sum
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

/// Relative symmetry test: max |A - A^T| <= 1e-12 * max(1, max |A|).
template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const Scalar scale = std::max<Scalar>(1, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= Scalar(1e-12) * scale;
}

template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& a, const char* what) {
  if (a.rows() < 1 || a.rows() != a.cols()) {
    throw Error(ErrorCode::InvalidInput,
                std::string(what) + " must be a non-empty square matrix");
  }
  if (!a.allFinite()) {
    throw Error(ErrorCode::InvalidInput,
                std::string(what) + " has non-finite entries");
  }
  if (!is_symmetric(a)) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " is not symmetric");
  }
}

/// Numerical positive-definiteness floor, scale-invariant in the spectral norm.
template <typename Scalar>
Scalar pd_floor(Scalar op2_norm) {
  return Scalar(1e-12) * std::max<Scalar>(1, op2_norm);
}

template <typename Scalar>
bool is_positive_definite(const EigenPair<Scalar>& eig) {
  return eig.min_value() > pd_floor(eig.max_abs_value());
}

template <typename Derived>
EigenPair<typename Derived::Scalar> sym_eigen(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  require_symmetric(a, "sym_eigen input");
  // Symmetrize so the solver sees an exactly symmetric operand.
  const MatrixX<Scalar> sym = (a + a.transpose()) * Scalar(0.5);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidInput, "eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Scalar>
void require_positive_definite(const EigenPair<Scalar>& eig, const char* what) {
  if (!is_positive_definite(eig)) {
    throw Error(ErrorCode::NotPositiveDefinite,
                std::string(what) + " has minimum eigenvalue " +
                    std::to_string(static_cast<double>(eig.min_value())));
  }
}

/// V f(Λ) Vᵀ for a scalar function f applied to the eigenvalues.
template <typename Scalar, typename F>
MatrixX<Scalar> apply_spectral(const EigenPair<Scalar>& eig, F&& f) {
  const VectorX<Scalar> fv = eig.values.unaryExpr(f);
  MatrixX<Scalar> out = eig.vectors * fv.asDiagonal() * eig.vectors.transpose();
  return (out + out.transpose()) * Scalar(0.5);
}

template <typename Scalar>
MatrixX<Scalar> sym_sqrt(const EigenPair<Scalar>& eig) {
  require_positive_definite(eig, "sym_sqrt input");
  return apply_spectral(eig, [](Scalar v) { return std::sqrt(v); });
}

template <typename Derived>
MatrixX<typename Derived::Scalar> sym_sqrt(const Eigen::MatrixBase<Derived>& a) {
  return sym_sqrt(sym_eigen(a));
}

template <typename Scalar>
MatrixX<Scalar> sym_inv(const EigenPair<Scalar>& eig) {
  require_positive_definite(eig, "sym_inv input");
  return apply_spectral(eig, [](Scalar v) { return Scalar(1) / v; });
}

template <typename Derived>
MatrixX<typename Derived::Scalar> sym_inv(const Eigen::MatrixBase<Derived>& a) {
  return sym_inv(sym_eigen(a));
}

template <typename Scalar>
Scalar log_det(const EigenPair<Scalar>& eig) {
  require_positive_definite(eig, "log_det input");
  return eig.values.array().log().sum();
}

template <typename Derived>
typename Derived::Scalar log_det(const Eigen::MatrixBase<Derived>& a) {
  return log_det(sym_eigen(a));
}

template <typename Derived>
typename Derived::Scalar elem_max_norm(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? typename Derived::Scalar(0) : a.cwiseAbs().maxCoeff();
}

/// |||A|||_inf: maximum absolute row sum.
template <typename Derived>
typename Derived::Scalar row_sum_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return typename Derived::Scalar(0);
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename Derived>
MatrixNorms<typename Derived::Scalar> norms(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (!a.allFinite()) {
    throw Error(ErrorCode::InvalidInput, "norms input has non-finite entries");
  }
  MatrixNorms<Scalar> out{};
  out.elem_max = elem_max_norm(a);
  out.fro = a.norm();
  out.row_sum = row_sum_norm(a);
  if (a.size() == 0) {
    out.op2 = 0;
  } else if (is_symmetric(a)) {
    out.op2 = sym_eigen(a).max_abs_value();
  } else {
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(a);
    out.op2 = svd.singularValues()(0);
  }
  return out;
}

/// |||Γ_{Ec,E} (Γ_{E,E})⁻¹|||_inf for Γ = Binv ⊗ Binv under column-stacking
/// vectorization, where Γ[(i,j),(k,l)] = Binv(i,k)·Binv(j,l). Only the two
/// needed blocks are assembled.
template <typename Derived>
typename Derived::Scalar kron_submatrix_infnorm_product(
    const Eigen::MatrixBase<Derived>& binv, const IndexSet& e, const IndexSet& ec) {
  using Scalar = typename Derived::Scalar;
  require_symmetric(binv, "kron_submatrix_infnorm_product Binv");
  const int p = static_cast<int>(binv.rows());
  if (e.dim() != p || ec.dim() != p) {
    throw Error(ErrorCode::InvalidInput, "index set dimension mismatch");
  }
  {
    auto m = e.mask();
    const auto mc = ec.mask();
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] && mc[k]) {
        throw Error(ErrorCode::InvalidInput, "E and Ec overlap");
      }
      m[k] = static_cast<char>(m[k] | mc[k]);
    }
    if (std::find(m.begin(), m.end(), 0) != m.end()) {
      throw Error(ErrorCode::InvalidInput, "E and Ec do not cover the grid");
    }
  }
  if (ec.empty() || e.empty()) return Scalar(0);

  const auto& ep = e.pairs();
  const auto& cp = ec.pairs();
  const Eigen::Index ne = static_cast<Eigen::Index>(ep.size());
  const Eigen::Index nc = static_cast<Eigen::Index>(cp.size());

  MatrixX<Scalar> g_ee(ne, ne);
  for (Eigen::Index r = 0; r < ne; ++r)
    for (Eigen::Index c = 0; c < ne; ++c)
      g_ee(r, c) = binv(ep[r].first, ep[c].first) * binv(ep[r].second, ep[c].second);

  MatrixX<Scalar> g_ce(nc, ne);
  for (Eigen::Index r = 0; r < nc; ++r)
    for (Eigen::Index c = 0; c < ne; ++c)
      g_ce(r, c) = binv(cp[r].first, ep[c].first) * binv(cp[r].second, ep[c].second);

  const auto eig = sym_eigen(g_ee);
  const Scalar lo = eig.values(0);
  const Scalar hi = eig.values(ne - 1);
  if (!(lo > 0) || hi / lo > Scalar(1e12)) {
    throw Error(ErrorCode::SingularBlock,
                "Γ_EE condition number exceeds 1e12");
  }
  // X = Γ_{Ec,E} Γ_{E,E}⁻¹, formed as (Γ_{E,E}⁻¹ Γ_{Ec,E}ᵀ)ᵀ.
  const MatrixX<Scalar> x =
      Eigen::LLT<MatrixX<Scalar>>(g_ee).solve(g_ce.transpose()).transpose();
  return row_sum_norm(x);
}

}  // namespace balnet
