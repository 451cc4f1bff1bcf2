#pragma once

// Sums of squares, F statistics, pure error / lack of fit, R^2 and residual
// diagnostics for hybrid (and, with z = 1, ordinary) regression fits.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "hybreg/dataset.hpp"
#include "hybreg/distributions.hpp"
#include "hybreg/errors.hpp"
#include "hybreg/hybrid.hpp"

namespace hybreg {

struct SSPartition {
    double ss_t = 0.0;   ///< y'y
    double ss_r = 0.0;   ///< SS_T - SS_E
    double ss_rx = 0.0;  ///< y' P_X y
    double ss_rc = 0.0;  ///< b2' Z' y
    double ss_e = 0.0;   ///< y' (I - P_X - P_Z) y
    double ss_tc = 0.0;  ///< v'v, v = (I - P_X) y
    double ss_mean = 0.0;  ///< n ybar^2
    Index n = 0;
    Index df_r = 0;   ///< m
    Index df_rx = 0;  ///< p + 1
    Index df_rc = 0;  ///< m - p - 1
    Index df_e = 0;   ///< n - m

    /// Total SS about the mean, y'y - n ybar^2.
    double ss_about_mean() const { return ss_t - ss_mean; }
};

inline SSPartition partition(const HybridSystem& sys, const Vector& y) {
    if (y.size() != sys.n()) throw ShapeError("partition: response length does not match the system");
    SSPartition p;
    p.n = sys.n();
    const Vector fit_x = sys.hat_x * y;
    const Vector zty = sys.Z.transpose() * y;
    const Vector b2 = sys.ztz_ginv * zty;
    const Vector v = y - fit_x;
    const Vector resid = v - sys.Z * b2;

    p.ss_t = y.squaredNorm();
    p.ss_rx = y.dot(fit_x);
    p.ss_rc = b2.dot(zty);
    p.ss_e = resid.squaredNorm();
    p.ss_r = p.ss_t - p.ss_e;
    p.ss_tc = v.squaredNorm();
    const double ybar = y.size() ? y.mean() : 0.0;
    p.ss_mean = static_cast<double>(p.n) * ybar * ybar;

    p.df_r = sys.m;
    p.df_rx = sys.rank_x;
    p.df_rc = sys.m - sys.rank_x;
    p.df_e = p.n - sys.m;
    return p;
}

struct FStatistics {
    double f_r = 0.0;
    double f_rx = 0.0;
    std::optional<double> f_rc;  ///< absent when m == p + 1
};

inline double residual_mean_square(const SSPartition& part) {
    if (part.df_e <= 0)
        throw SaturatedModelError(
            "model is saturated (rank(Psi) = n): residual SS has no degrees of freedom and sigma^2 cannot be "
            "estimated; add replicate runs at repeated factor settings");
    if (!(part.ss_e > 0.0))
        throw UndefinedStatisticError("residual sum of squares is zero; F statistics are undefined");
    return part.ss_e / static_cast<double>(part.df_e);
}

inline FStatistics f_statistics(const SSPartition& part) {
    const double ms_e = residual_mean_square(part);
    FStatistics f;
    f.f_r = (part.ss_r / static_cast<double>(part.df_r)) / ms_e;
    f.f_rx = (part.ss_rx / static_cast<double>(part.df_rx)) / ms_e;
    if (part.df_rc > 0) f.f_rc = (part.ss_rc / static_cast<double>(part.df_rc)) / ms_e;
    return f;
}

/// Overall regression F about the mean, (SS_R - n ybar^2)/(m - 1) over MS_E. This is the
/// F_0 printed in classical MLR tables.
inline double f_regression_about_mean(const SSPartition& part) {
    const double ms_e = residual_mean_square(part);
    if (part.df_r < 2) throw TestUnavailableError("regression about the mean has no degrees of freedom");
    return ((part.ss_r - part.ss_mean) / static_cast<double>(part.df_r - 1)) / ms_e;
}

struct PureErrorDecomposition {
    double ss_pe = 0.0;
    Index df_pe = 0;
    double ss_lof = 0.0;
    Index df_lof = 0;
};

/// Splits SS_E = ||y - fitted||^2 into within-replicate-group scatter and lack of fit.
inline PureErrorDecomposition pure_error(const Vector& y, const ReplicateGroups& groups, const Vector& fitted,
                                         Index df_e) {
    if (y.size() != fitted.size()) throw ShapeError("pure_error: fitted values not aligned with observations");
    PureErrorDecomposition pe;
    std::size_t covered = 0;
    for (const auto& g : groups) {
        covered += g.size();
        if (g.size() < 2) continue;
        double mean = 0.0;
        for (auto i : g) mean += y(static_cast<Index>(i));
        mean /= static_cast<double>(g.size());
        for (auto i : g) {
            const double d = y(static_cast<Index>(i)) - mean;
            pe.ss_pe += d * d;
        }
        pe.df_pe += static_cast<Index>(g.size()) - 1;
    }
    if (covered != static_cast<std::size_t>(y.size()))
        throw ContractError("pure_error: replicate groups do not cover every row");

    const double ss_e = (y - fitted).squaredNorm();
    pe.ss_lof = ss_e - pe.ss_pe;
    pe.df_lof = df_e - pe.df_pe;
    const double tol = 1e-8 * std::max(1.0, ss_e);
    if (pe.ss_lof < -tol)
        throw InconsistencyError("pure_error: pure-error SS exceeds residual SS by " + std::to_string(-pe.ss_lof));
    if (pe.df_lof < 0)
        throw InconsistencyError("pure_error: pure-error degrees of freedom exceed residual degrees of freedom");
    pe.ss_lof = std::max(pe.ss_lof, 0.0);
    return pe;
}

struct LackOfFitTest {
    double f = 0.0;
    double p_value = 1.0;
    Index df_lof = 0;
    Index df_pe = 0;
};

inline LackOfFitTest lack_of_fit_test(const PureErrorDecomposition& pe) {
    if (pe.df_pe <= 0 || !(pe.ss_pe > 0.0))
        throw TestUnavailableError("lack-of-fit test needs replicate runs with non-zero pure error");
    if (pe.df_lof <= 0) throw TestUnavailableError("lack-of-fit test has no lack-of-fit degrees of freedom");
    LackOfFitTest t;
    t.df_lof = pe.df_lof;
    t.df_pe = pe.df_pe;
    t.f = (pe.ss_lof / static_cast<double>(pe.df_lof)) / (pe.ss_pe / static_cast<double>(pe.df_pe));
    t.p_value = f_sf(t.f, pe.df_lof, pe.df_pe);
    return t;
}

struct RSquared {
    double r2 = 0.0;
    double r2_max = 1.0;
};

/// R^2 = (b'Psi'y - n ybar^2)/(y'y - n ybar^2) and its pure-error ceiling.
inline RSquared r_squared(const HybridFit& fit, const Vector& y, double ss_pe = 0.0) {
    const Index n = y.size();
    if (n < 2) throw UndefinedStatisticError("R^2 needs at least two observations");
    const double ybar = y.mean();
    const double about_mean = (y.array() - ybar).matrix().squaredNorm();
    if (!(about_mean > 0.0)) throw UndefinedStatisticError("R^2 is undefined for a constant response");
    const double nybar2 = static_cast<double>(n) * ybar * ybar;
    // b'Psi'y = y_hat'y
    const double explained = fit.fitted.dot(y) - nybar2;
    RSquared r;
    r.r2 = explained / about_mean;
    r.r2_max = (about_mean - ss_pe) / about_mean;
    return r;
}

struct NormalPlotPoint {
    std::size_t run = 0;  ///< 0-based row index
    double probability = 0.0;
    double quantile = 0.0;
    double residual = 0.0;
};

struct ScatterPoint {
    std::size_t run = 0;
    double fitted = 0.0;
    double residual = 0.0;
};

struct ResidualDiagnostics {
    std::vector<NormalPlotPoint> normal_plot;
    std::vector<ScatterPoint> scatter;
};

/// Blom plotting position (i - 3/8)/(n + 1/4), i 1-based.
inline double blom_position(std::size_t i, std::size_t n) {
    return (static_cast<double>(i) - 0.375) / (static_cast<double>(n) + 0.25);
}

inline ResidualDiagnostics residual_diagnostics(const HybridFit& fit) {
    const auto n = static_cast<std::size_t>(fit.residuals.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fit.residuals(static_cast<Index>(a)) < fit.residuals(static_cast<Index>(b));
    });
    ResidualDiagnostics d;
    d.normal_plot.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double p = blom_position(k + 1, n);
        d.normal_plot.push_back({order[k], p, normal_quantile(p), fit.residuals(static_cast<Index>(order[k]))});
    }
    d.scatter.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        d.scatter.push_back({i, fit.fitted(static_cast<Index>(i)), fit.residuals(static_cast<Index>(i))});
    return d;
}

struct BoxWetz {
    double ratio = 0.0;
    bool useful_predictor = false;
};

/// Box-Wetz rule of thumb: a ratio of at least four marks a useful predictor.
inline BoxWetz box_wetz_ratio(double f_observed, double f_critical) {
    if (!(f_critical > 0.0)) throw ContractError("box_wetz_ratio: critical value must be positive");
    BoxWetz bw;
    bw.ratio = f_observed / f_critical;
    bw.useful_predictor = bw.ratio >= 4.0;
    return bw;
}

// ---------------------------------------------------------------------------
// ANOVA tables

enum class AnovaLayout {
    full,           ///< Regression / Residual / Total
    partitioned,    ///< Linear regression / Corrected regression / Residual / Total
    corrected,      ///< Corrected regression / Residual / Corrected total
    about_mean,     ///< classical MLR table: regression and total about the mean
};

inline std::string layout_name(AnovaLayout l) {
    switch (l) {
        case AnovaLayout::full: return "full";
        case AnovaLayout::partitioned: return "partitioned";
        case AnovaLayout::corrected: return "corrected";
        case AnovaLayout::about_mean: return "about_mean";
    }
    return "?";
}

struct AnovaRow {
    std::string source;
    double ss = 0.0;
    Index df = 0;
    std::optional<double> ms;
    std::optional<double> f;
    std::optional<double> p_value;
};

struct AnovaReport {
    AnovaLayout layout = AnovaLayout::full;
    std::vector<AnovaRow> rows;

    const AnovaRow* find(const std::string& source) const {
        for (const auto& r : rows)
            if (r.source == source) return &r;
        return nullptr;
    }
};

namespace detail {

inline AnovaRow make_row(std::string source, double ss, Index df) {
    AnovaRow r;
    r.source = std::move(source);
    r.ss = ss;
    r.df = df;
    if (df > 0) r.ms = ss / static_cast<double>(df);
    return r;
}

inline void add_f(AnovaRow& row, const std::optional<double>& ms_den, Index df_den) {
    if (!row.ms || !ms_den || !(*ms_den > 0.0) || df_den <= 0) return;
    row.f = *row.ms / *ms_den;
    row.p_value = f_sf(*row.f, row.df, df_den);
}

}  // namespace detail

/// Lays out an ANOVA table. Regression-type rows are tested against the residual mean
/// square; the lack-of-fit row (present when `pe` is given) is tested against pure error.
inline AnovaReport anova_table(const SSPartition& part, const std::optional<PureErrorDecomposition>& pe,
                               AnovaLayout layout) {
    AnovaReport rep;
    rep.layout = layout;
    AnovaRow resid = detail::make_row(layout == AnovaLayout::about_mean ? "Error" : "Residual", part.ss_e, part.df_e);
    std::optional<double> ms_e;
    if (resid.ms && *resid.ms > 0.0) ms_e = resid.ms;

    auto push_regression = [&](std::string name, double ss, Index df) {
        AnovaRow r = detail::make_row(std::move(name), ss, df);
        detail::add_f(r, ms_e, part.df_e);
        rep.rows.push_back(std::move(r));
    };

    switch (layout) {
        case AnovaLayout::full:
            push_regression("Regression", part.ss_r, part.df_r);
            break;
        case AnovaLayout::partitioned:
            push_regression("Linear regression", part.ss_rx, part.df_rx);
            push_regression("Corrected regression", part.ss_rc, part.df_rc);
            break;
        case AnovaLayout::corrected:
            push_regression("Corrected regression", part.ss_rc, part.df_rc);
            break;
        case AnovaLayout::about_mean:
            push_regression("Regression", part.ss_r - part.ss_mean, part.df_r - 1);
            break;
    }
    rep.rows.push_back(resid);
    if (pe) {
        AnovaRow lof = detail::make_row("Lack of fit", pe->ss_lof, pe->df_lof);
        AnovaRow pure = detail::make_row("Pure error", pe->ss_pe, pe->df_pe);
        detail::add_f(lof, pure.ms, pe->df_pe);
        rep.rows.push_back(std::move(lof));
        rep.rows.push_back(std::move(pure));
    }
    switch (layout) {
        case AnovaLayout::full:
        case AnovaLayout::partitioned:
            rep.rows.push_back(detail::make_row("Total", part.ss_t, part.n));
            break;
        case AnovaLayout::corrected:
            rep.rows.push_back(detail::make_row("Corrected total", part.ss_tc, part.n - part.df_rx));
            break;
        case AnovaLayout::about_mean:
            rep.rows.push_back(detail::make_row("Total", part.ss_about_mean(), part.n - 1));
            break;
    }
    // Totals carry no mean square.
    rep.rows.back().ms.reset();
    return rep;
}

}  // namespace hybreg
