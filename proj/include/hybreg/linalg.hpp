#pragma once

// Rank-aware dense linear algebra shared by every fitting routine:
// Moore-Penrose generalized inverses, orthogonal projectors and OLS.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "hybreg/errors.hpp"

namespace hybreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Tolerances {
    /// Singular values below rank * sigma_max are treated as zero.
    double rank = 1e-10;
    double symmetry = 1e-8;
    double idempotency = 1e-8;
    double ginverse = 1e-8;
};

inline constexpr Tolerances default_tolerances{};

struct RankedMatrix {
    Matrix values;
    Index rank = 0;
    double rank_tolerance = default_tolerances.rank;
};

namespace detail {

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline Eigen::JacobiSVD<Matrix> thin_svd(const Matrix& m) {
    return Eigen::JacobiSVD<Matrix>(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

/// Cut-off below which singular values count as zero. `scale` lets a caller
/// measure rank against a parent matrix when `m` is itself a projection residue
/// whose own largest singular value may be pure round-off.
inline double rank_cutoff(double sigma_max, double rank_tol, double scale) {
    return rank_tol * std::max(sigma_max, scale);
}

}  // namespace detail

/// Numerical rank via singular values; `scale` (if > 0) replaces sigma_max as the reference magnitude
/// when it is larger.
inline Index numerical_rank(const Matrix& m, double rank_tol = default_tolerances.rank, double scale = 0.0) {
    if (m.size() == 0) return 0;
    const Vector s = Eigen::JacobiSVD<Matrix>(m).singularValues();
    const double cut = detail::rank_cutoff(s.size() ? s(0) : 0.0, rank_tol, scale);
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return r;
}

/// Moore-Penrose pseudoinverse of an arbitrary matrix, returned with the rank it detected.
inline RankedMatrix pseudo_inverse(const Matrix& m, double rank_tol = default_tolerances.rank, double scale = 0.0) {
    RankedMatrix out;
    out.rank_tolerance = rank_tol;
    out.values = Matrix::Zero(m.cols(), m.rows());
    if (m.size() == 0) return out;

    const auto svd = detail::thin_svd(m);
    const Vector& s = svd.singularValues();
    const double cut = detail::rank_cutoff(s(0), rank_tol, scale);
    Vector inv_s = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cut) {
            inv_s(i) = 1.0 / s(i);
            ++out.rank;
        }
    }
    out.values = svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose();
    return out;
}

/// (M'M)^+ formed from the SVD of M (V S^-2 V'), so rank decisions are made on the
/// singular values of M rather than on their squares.
inline RankedMatrix gram_pseudo_inverse(const Matrix& m, double rank_tol = default_tolerances.rank,
                                        double scale = 0.0) {
    RankedMatrix out;
    out.rank_tolerance = rank_tol;
    out.values = Matrix::Zero(m.cols(), m.cols());
    if (m.size() == 0) return out;
    const Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cut = detail::rank_cutoff(s(0), rank_tol, scale);
    Vector inv_s2 = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cut) {
            inv_s2(i) = 1.0 / (s(i) * s(i));
            ++out.rank;
        }
    }
    const Matrix& v = svd.matrixV();
    out.values = v * inv_s2.asDiagonal() * v.transpose();
    out.values = 0.5 * (out.values + out.values.transpose()).eval();
    return out;
}

/// Largest singular value (spectral norm).
inline double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

/// Generalized inverse of a symmetric matrix, realized as its Moore-Penrose pseudoinverse.
/// Throws ContractError for non-square or asymmetric input.
inline Matrix generalized_inverse(const Matrix& m, const Tolerances& tol = default_tolerances, double scale = 0.0) {
    if (m.rows() != m.cols())
        throw ContractError("generalized_inverse: matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected square");
    const double mag = std::max(1.0, detail::max_abs(m));
    if (detail::max_abs(m - m.transpose()) > tol.symmetry * mag)
        throw ContractError("generalized_inverse: matrix is not symmetric");
    Matrix g = pseudo_inverse(m, tol.rank, scale).values;
    return 0.5 * (g + g.transpose());
}

/// Orthogonal projector onto a column space. Symmetric and idempotent.
class Projector {
public:
    Projector() = default;
    explicit Projector(Matrix p) : p_(std::move(p)) {}

    const Matrix& matrix() const noexcept { return p_; }
    Index size() const noexcept { return p_.rows(); }
    double trace() const { return p_.trace(); }

    Vector apply(const Vector& v) const { return p_ * v; }
    Matrix apply(const Matrix& m) const { return p_ * m; }
    /// I - P, the projector onto the orthogonal complement.
    Projector complement() const {
        return Projector(Matrix::Identity(p_.rows(), p_.cols()) - p_);
    }

    double symmetry_defect() const { return detail::max_abs(p_ - p_.transpose()); }
    double idempotency_defect() const { return detail::max_abs(p_ * p_ - p_); }

    bool is_valid(const Tolerances& tol = default_tolerances) const {
        return symmetry_defect() <= tol.symmetry && idempotency_defect() <= tol.idempotency;
    }

private:
    Matrix p_;
};

/// P = M (M'M)^- M'. Computed through the thin SVD of M (P = U_r U_r'), which is the same
/// matrix for every choice of generalized inverse and better conditioned than forming M'M.
inline Projector projector_onto_columns(const Matrix& m, double rank_tol = default_tolerances.rank,
                                        double scale = 0.0) {
    if (m.cols() < 1) throw ShapeError("projector_onto_columns: matrix has no columns");
    const auto svd = detail::thin_svd(m);
    const Vector& s = svd.singularValues();
    const double cut = detail::rank_cutoff(s(0), rank_tol, scale);
    Index r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    const Matrix u = svd.matrixU().leftCols(r);
    Matrix p = u * u.transpose();
    return Projector(0.5 * (p + p.transpose()));
}

/// Ordinary least squares q = (X'X)^{-1} X'y. Requires full column rank.
inline Vector ols_solve(const Matrix& x, const Vector& y, double rank_tol = default_tolerances.rank) {
    if (x.rows() != y.size()) throw ShapeError("ols_solve: X has " + std::to_string(x.rows()) +
                                               " rows but y has " + std::to_string(y.size()));
    if (x.rows() < x.cols())
        throw RankError("ols_solve: fewer rows than columns, X'X is singular");
    const Index r = numerical_rank(x, rank_tol);
    if (r < x.cols())
        throw RankError("ols_solve: X has rank " + std::to_string(r) + " < " + std::to_string(x.cols()) +
                        " columns; use the generalized-inverse path");
    return x.colPivHouseholderQr().solve(y);
}

/// (X'X)^{-1} for a full-column-rank X.
inline Matrix gram_inverse(const Matrix& x, double rank_tol = default_tolerances.rank) {
    const Index r = numerical_rank(x, rank_tol);
    if (r < x.cols())
        throw RankError("X'X is singular: rank " + std::to_string(r) + " < " + std::to_string(x.cols()));
    const Matrix g = x.transpose() * x;
    Matrix inv = g.ldlt().solve(Matrix::Identity(g.rows(), g.cols()));
    return 0.5 * (inv + inv.transpose());
}

}  // namespace hybreg
