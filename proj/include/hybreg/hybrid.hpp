#pragma once

// Hybrid-data multiple regression: observations y are modelled as diag(z) X theta + e,
// where z holds deterministic simulator outputs at the design points. With
// Y = (D - I) X the model is rewritten as y = [X Y] b + e and solved through the
// partitioned generalized inverse, with Z = (I - P_X) Y carrying everything the
// simulator adds beyond the plain polynomial fit.

#include <cmath>
#include <optional>
#include <string>

#include "hybreg/dataset.hpp"
#include "hybreg/errors.hpp"
#include "hybreg/linalg.hpp"

namespace hybreg {

/// Simulator output at each design row, in response units.
struct TheoryVector {
    Vector z;
    std::string source_label;
};

inline TheoryVector make_theory(Vector z, std::string label) {
    for (Index i = 0; i < z.size(); ++i)
        if (!std::isfinite(z(i)))
            throw ContractError("theory vector '" + label + "' has a non-finite entry at row " + std::to_string(i + 1));
    return TheoryVector{std::move(z), std::move(label)};
}

/// All-ones theory: D = I, which reduces the hybrid model to ordinary MLR.
inline TheoryVector unit_theory(Index n) { return TheoryVector{Vector::Ones(n), "none"}; }

struct HybridSystem {
    DesignMatrix design;
    TheoryVector theory;
    Matrix Y;    ///< (D - I) X
    Matrix Psi;  ///< [X Y]
    Matrix Z;    ///< (I - P_X) Y
    Matrix xtx_inv;       ///< (X'X)^{-1}
    Matrix ztz_ginv;      ///< (Z'Z)^-, Moore-Penrose
    Matrix hat_x;         ///< X (X'X)^{-1} X'
    Matrix hat_z;         ///< Z (Z'Z)^- Z'
    Index rank_x = 0;
    Index rank_z = 0;
    Index rank_psi = 0;   ///< independent SVD rank of Psi, for cross-checking m
    Index m = 0;          ///< rank(X) + rank(Z)
    double scale = 0.0;   ///< spectral norm of Psi; reference magnitude for rank decisions
    Tolerances tol;

    const Matrix& X() const { return design.x; }
    Matrix D() const { return theory.z.asDiagonal(); }
    Index n() const { return design.x.rows(); }
    Index terms() const { return design.x.cols(); }
};

/// Builds D, Y, Psi, Z and the two projectors. X must have full column rank.
inline HybridSystem assemble(const DesignMatrix& design, const TheoryVector& theory,
                             const Tolerances& tol = default_tolerances) {
    const Index n = design.x.rows();
    if (theory.z.size() != n)
        throw ShapeError("assemble: theory vector has " + std::to_string(theory.z.size()) + " entries, design has " +
                         std::to_string(n) + " rows");
    if (n < design.x.cols())
        throw UnderdeterminedError("assemble: " + std::to_string(n) + " rows cannot determine " +
                                   std::to_string(design.x.cols()) + " polynomial terms");

    HybridSystem sys;
    sys.design = design;
    sys.theory = theory;
    sys.tol = tol;
    const Matrix& x = design.x;
    const Index p1 = x.cols();

    sys.xtx_inv = gram_inverse(x, tol.rank);
    sys.rank_x = p1;
    sys.Y = (theory.z.array() - 1.0).matrix().asDiagonal() * x;
    sys.Psi.resize(n, 2 * p1);
    sys.Psi << x, sys.Y;
    sys.scale = spectral_norm(sys.Psi);

    sys.hat_x = x * sys.xtx_inv * x.transpose();
    sys.Z = sys.Y - sys.hat_x * sys.Y;

    const RankedMatrix q = gram_pseudo_inverse(sys.Z, tol.rank, sys.scale);
    sys.ztz_ginv = q.values;
    sys.rank_z = q.rank;
    sys.hat_z = sys.Z * sys.ztz_ginv * sys.Z.transpose();
    sys.m = sys.rank_x + sys.rank_z;
    sys.rank_psi = numerical_rank(sys.Psi, tol.rank);
    return sys;
}

/// (Psi'Psi)^- as the Moore-Penrose pseudoinverse.
inline Matrix psi_gram_ginv(const HybridSystem& sys) {
    return gram_pseudo_inverse(sys.Psi, sys.tol.rank).values;
}

/// Psi (Psi'Psi)^- Psi' formed directly from Psi.
inline Matrix hat_matrix(const HybridSystem& sys) {
    return sys.Psi * psi_gram_ginv(sys) * sys.Psi.transpose();
}

/// Partitioned generalized inverse of Psi'Psi built blockwise from (X'X)^{-1} and
/// Q^- = (Z'Z)^-, Q = Y'Y - Y'X (X'X)^{-1} X'Y.
inline Matrix partitioned_ginv(const HybridSystem& sys) {
    const Index p1 = sys.terms();
    const Matrix& g_inv = sys.xtx_inv;
    const Matrix b = sys.X().transpose() * sys.Y;
    const Matrix& q_inv = sys.ztz_ginv;
    const Matrix gb = g_inv * b;

    Matrix out(2 * p1, 2 * p1);
    out.topLeftCorner(p1, p1) = g_inv + gb * q_inv * gb.transpose();
    out.topRightCorner(p1, p1) = -gb * q_inv;
    out.bottomLeftCorner(p1, p1) = -q_inv * gb.transpose();
    out.bottomRightCorner(p1, p1) = q_inv;
    return out;
}

/// J = (Psi'Psi)^- Psi'Psi; E(b) = J beta. Exposed for inspection only.
inline Matrix estimability(const HybridSystem& sys) {
    const Matrix gram = sys.Psi.transpose() * sys.Psi;
    return psi_gram_ginv(sys) * gram;
}

/// Bias operator of the naive MLR estimator: E(q) = theta + A theta, A = (X'X)^{-1} X' (D - I) X.
inline Matrix alias_matrix(const HybridSystem& sys) { return sys.xtx_inv * sys.X().transpose() * sys.Y; }

struct SolutionCovariance {
    Matrix var_b1;
    Matrix var_b2;
    Matrix cov_b1_b2;
    Matrix full;  ///< 2(p+1) square, blocks [[var_b1, cov], [cov', var_b2]]
};

/// Variance-covariance of the partitioned solution, evaluated blockwise as
/// (M S) M sigma^2 with M the partitioned g-inverse and S = Psi'Psi:
///   M S = [[I, W], [0, Q^- Q]],  W = (X'X)^{-1} X' (I - Y Q^- Z') Y,
/// so var(b2) = Q^- Z'Y Q^- sigma^2. W vanishes whenever Q is invertible.
inline SolutionCovariance covariance_of_solution(const HybridSystem& sys, double sigma2) {
    if (!(sigma2 >= 0.0)) throw ContractError("covariance_of_solution: sigma^2 must be non-negative");
    const Index p1 = sys.terms();
    const Index n = sys.n();
    const Matrix& g_inv = sys.xtx_inv;
    const Matrix& q_inv = sys.ztz_ginv;
    const Matrix& x = sys.X();
    const Matrix& y = sys.Y;
    const Matrix& z = sys.Z;
    const Matrix gb = g_inv * x.transpose() * y;
    const Matrix w = g_inv * x.transpose() * (Matrix::Identity(n, n) - y * q_inv * z.transpose()) * y;

    SolutionCovariance c;
    c.var_b1 = (g_inv + gb * q_inv * gb.transpose() - w * q_inv * gb.transpose()) * sigma2;
    c.cov_b1_b2 = (-gb * q_inv + w * q_inv) * sigma2;
    c.var_b2 = (q_inv * z.transpose() * y * q_inv) * sigma2;
    c.full.resize(2 * p1, 2 * p1);
    c.full.topLeftCorner(p1, p1) = c.var_b1;
    c.full.topRightCorner(p1, p1) = c.cov_b1_b2;
    c.full.bottomLeftCorner(p1, p1) = c.cov_b1_b2.transpose();
    c.full.bottomRightCorner(p1, p1) = c.var_b2;
    return c;
}

/// var(y_hat) = {X (X'X)^{-1} X' + Z (Z'Z)^- Z'} sigma^2.
inline Matrix variance_of_fit(const HybridSystem& sys, double sigma2) {
    if (!(sigma2 >= 0.0)) throw ContractError("variance_of_fit: sigma^2 must be non-negative");
    return (sys.hat_x + sys.hat_z) * sigma2;
}

struct HybridFit {
    Vector b1;
    Vector b2;
    Vector b;         ///< stacked (b1, b2); the canonical coefficient vector
    Vector b_direct;  ///< (Psi'Psi)^- Psi' y, kept as a cross-check
    Vector fitted;
    Vector residuals;
    double ss_e = 0.0;
    Index n = 0;
    Index m = 0;
    Index df_e = 0;
    /// SS_E / (n - m); absent when the model is saturated (n == m).
    std::optional<double> sigma2_hat;
    Matrix var_b;     ///< empty when sigma2_hat is absent
    Matrix var_yhat;  ///< empty when sigma2_hat is absent
    double route_discrepancy = 0.0;  ///< max |Psi b - Psi b_direct|

    bool sigma2_available() const { return sigma2_hat.has_value(); }
};

/// Solves the hybrid normal equations through the partitioned route
///   b2 = (Z'Z)^- Z'y,   b1 = (X'X)^{-1} X' (y - Y b2),
/// and verifies the fitted values against the direct route (Psi'Psi)^- Psi'y.
inline HybridFit solve(const HybridSystem& sys, const Vector& y) {
    const Index n = sys.n();
    if (y.size() != n)
        throw ShapeError("solve: response has " + std::to_string(y.size()) + " entries, system has " +
                         std::to_string(n) + " rows");
    if (n < sys.rank_x) throw UnderdeterminedError("solve: fewer observations than rank(X)");

    HybridFit fit;
    fit.n = n;
    fit.m = sys.m;
    fit.df_e = n - sys.m;
    fit.b2 = sys.ztz_ginv * (sys.Z.transpose() * y);
    fit.b1 = sys.xtx_inv * (sys.X().transpose() * (y - sys.Y * fit.b2));
    fit.b.resize(2 * sys.terms());
    fit.b << fit.b1, fit.b2;
    fit.fitted = sys.Psi * fit.b;
    fit.residuals = y - fit.fitted;
    fit.ss_e = fit.residuals.squaredNorm();

    fit.b_direct = psi_gram_ginv(sys) * (sys.Psi.transpose() * y);
    const Vector fitted_direct = sys.Psi * fit.b_direct;
    fit.route_discrepancy = (fitted_direct - fit.fitted).cwiseAbs().maxCoeff();
    const double y_scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    if (fit.route_discrepancy > 1e-6 * y_scale)
        throw InconsistencyError("solve: partitioned and direct solutions give different fitted values (max diff " +
                                 std::to_string(fit.route_discrepancy) + ")");

    if (fit.df_e > 0) {
        fit.sigma2_hat = fit.ss_e / static_cast<double>(fit.df_e);
        fit.var_b = covariance_of_solution(sys, *fit.sigma2_hat).full;
        fit.var_yhat = variance_of_fit(sys, *fit.sigma2_hat);
    }
    return fit;
}

/// y_hat = Psi b.
inline Vector fitted_values(const HybridSystem& sys, const HybridFit& fit) { return sys.Psi * fit.b; }

/// y_hat = Psi (Psi'Psi)^- Psi' y, independent of any particular solution vector.
inline Vector fitted_values(const HybridSystem& sys, const Vector& y) { return hat_matrix(sys) * y; }

}  // namespace hybreg
