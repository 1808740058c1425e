#pragma once

#include <optional>

#include <Eigen/Dense>

namespace bilt::detail {

/// Relative pivot floor for declaring a symmetric matrix numerically singular.
inline constexpr double kPivotTolerance = 1e-12;

/// Cholesky factorization that also rejects pivots at or below
/// kPivotTolerance times the largest diagonal magnitude.
inline std::optional<Eigen::LLT<Eigen::MatrixXd>> checked_cholesky(const Eigen::MatrixXd& s)
{
    if (s.rows() == 0) return std::nullopt;
    const double max_diag = s.diagonal().cwiseAbs().maxCoeff();
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const auto diag = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag[i] * diag[i] > kPivotTolerance * max_diag)) return std::nullopt;
    }
    return llt;
}

} // namespace bilt::detail
