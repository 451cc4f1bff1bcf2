#pragma once

// End-to-end analysis of one dataset: design, theory column, hybrid solve,
// sums of squares, lack of fit and adequacy verdicts.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hybreg/dataset.hpp"
#include "hybreg/gauge.hpp"
#include "hybreg/hybrid.hpp"
#include "hybreg/inference.hpp"

namespace hybreg {

enum class ModelKind { mlr1, mlr2, hybrid };

inline std::string model_kind_name(ModelKind m) {
    switch (m) {
        case ModelKind::mlr1: return "mlr1";
        case ModelKind::mlr2: return "mlr2";
        case ModelKind::hybrid: return "hybrid";
    }
    return "?";
}

inline ModelKind parse_model_kind(const std::string& s) {
    if (s == "mlr1") return ModelKind::mlr1;
    if (s == "mlr2") return ModelKind::mlr2;
    if (s == "hybrid") return ModelKind::hybrid;
    throw ContractError("unknown model '" + s + "' (expected mlr1, mlr2 or hybrid)");
}

struct TheorySource {
    enum class Kind { none, adiabatic, isochoric, column };
    Kind kind = Kind::none;
    std::string column;

    static TheorySource parse(const std::string& s) {
        if (s.empty() || s == "none") return {Kind::none, {}};
        if (s == "adiabatic") return {Kind::adiabatic, {}};
        if (s == "isochoric") return {Kind::isochoric, {}};
        if (detail::starts_with(s, "column:") && s.size() > 7) return {Kind::column, s.substr(7)};
        throw ContractError("unknown theory '" + s + "' (expected adiabatic, isochoric, column:<name> or none)");
    }

    std::string describe() const {
        switch (kind) {
            case Kind::none: return "none";
            case Kind::adiabatic: return "adiabatic";
            case Kind::isochoric: return "isochoric";
            case Kind::column: return "column:" + column;
        }
        return "?";
    }
};

struct AnalysisOptions {
    ModelKind model = ModelKind::mlr1;
    TheorySource theory;
    double alpha = 0.05;
    gauge::GaugeConstants constants;
    std::optional<gauge::GaugeColumns> gauge_columns;
};

enum class Verdict { adequate, inadequate, untestable };

inline std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::adequate: return "adequate";
        case Verdict::inadequate: return "inadequate";
        case Verdict::untestable: return "untestable";
    }
    return "?";
}

struct Analysis {
    AnalysisOptions options;
    Dataset data;
    Matrix coded;
    DesignMatrix design;
    HybridSystem system;
    HybridFit fit;
    SSPartition ss;
    ReplicateGroups groups;
    std::optional<PureErrorDecomposition> pure;
    std::optional<LackOfFitTest> lof;
    FStatistics f;
    double f_about_mean = 0.0;  ///< F_0 of the classical table
    RSquared r2;
    double alpha = 0.05;
    double f_crit_regression = 0.0;                ///< F_{alpha; m-1, n-m}
    std::optional<double> f_crit_corrected;        ///< F_{alpha; m-p-1, n-m}
    std::optional<double> f_crit_lof;              ///< F_{alpha; df_lof, df_pe}
    Verdict lack_of_fit_verdict = Verdict::untestable;
    std::optional<BoxWetz> box_wetz_lof;           ///< critical LoF F over observed LoF F
    std::optional<BoxWetz> box_wetz_corrected;     ///< observed F_Rc over its critical value
    double residual_sd = 0.0;                      ///< sqrt(SS_E / (n - 1))
    std::vector<CodingDiscrepancy> coding_notes;

    bool is_hybrid() const { return options.model == ModelKind::hybrid; }
};

inline TheoryVector resolve_theory(const Dataset& ds, const AnalysisOptions& opt) {
    const auto n = static_cast<Index>(ds.rows());
    switch (opt.theory.kind) {
        case TheorySource::Kind::none:
            return unit_theory(n);
        case TheorySource::Kind::adiabatic:
        case TheorySource::Kind::isochoric: {
            const auto model = opt.theory.kind == TheorySource::Kind::adiabatic ? gauge::FlowModel::adiabatic
                                                                                : gauge::FlowModel::isochoric;
            if (opt.gauge_columns) return gauge::simulate_design(ds, model, opt.constants, *opt.gauge_columns);
            return gauge::simulate_design(ds, model, opt.constants);
        }
        case TheorySource::Kind::column: {
            auto col = ds.column(opt.theory.column);
            if (!col) throw SchemaError("theory column '" + opt.theory.column + "' not found in table");
            return make_theory(std::move(*col), opt.theory.column);
        }
    }
    throw ContractError("unreachable theory kind");
}

inline Analysis run_analysis(const Dataset& ds, const AnalysisOptions& opt) {
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw ContractError("alpha must lie in (0, 1)");
    if (opt.model == ModelKind::hybrid && opt.theory.kind == TheorySource::Kind::none)
        throw ContractError("model 'hybrid' requires a theory source");

    Analysis a;
    a.options = opt;
    a.alpha = opt.alpha;
    a.data = ds;
    a.coded = coded_levels(ds);
    a.coding_notes = coding_discrepancies(ds);
    std::vector<std::string> names;
    for (const auto& f : ds.factors) names.push_back(f.name);
    a.design = build_design(a.coded, opt.model == ModelKind::mlr2 ? ModelOrder::second : ModelOrder::first, names);

    const TheoryVector theory =
        opt.model == ModelKind::hybrid ? resolve_theory(ds, opt) : unit_theory(static_cast<Index>(ds.rows()));
    a.system = assemble(a.design, theory);
    const Vector& y = ds.response;
    a.fit = solve(a.system, y);
    a.ss = partition(a.system, y);
    a.groups = replicate_groups(a.coded);

    if (a.ss.df_e <= 0)
        throw SaturatedModelError(
            "model is saturated: rank(Psi) = n = " + std::to_string(a.ss.n) +
            ", so the residual sum of squares is structurally zero and sigma^2 cannot be estimated. "
            "Add replicate runs at repeated factor settings.");

    a.pure = pure_error(y, a.groups, a.fit.fitted, a.ss.df_e);
    try {
        a.lof = lack_of_fit_test(*a.pure);
    } catch (const TestUnavailableError&) {
        a.lof.reset();
    }
    a.r2 = r_squared(a.fit, y, a.pure->ss_pe);
    a.f = f_statistics(a.ss);
    a.f_about_mean = a.ss.df_r >= 2 ? f_regression_about_mean(a.ss) : 0.0;
    a.f_crit_regression = a.ss.df_r >= 2 ? f_critical(opt.alpha, a.ss.df_r - 1, a.ss.df_e) : 0.0;
    if (a.ss.df_rc > 0) {
        a.f_crit_corrected = f_critical(opt.alpha, a.ss.df_rc, a.ss.df_e);
        if (a.f.f_rc) a.box_wetz_corrected = box_wetz_ratio(*a.f.f_rc, *a.f_crit_corrected);
    }
    if (a.lof) {
        a.f_crit_lof = f_critical(opt.alpha, a.lof->df_lof, a.lof->df_pe);
        a.lack_of_fit_verdict = a.lof->f < *a.f_crit_lof ? Verdict::adequate : Verdict::inadequate;
        if (a.lof->f > 0.0) a.box_wetz_lof = box_wetz_ratio(*a.f_crit_lof, a.lof->f);
    }
    a.residual_sd = std::sqrt(a.fit.ss_e / static_cast<double>(a.ss.n - 1));
    return a;
}

}  // namespace hybreg
