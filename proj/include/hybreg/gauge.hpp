#pragma once

// Steady-flow back-pressure of a pneumatic gauge: an orifice (area B, supply P_s)
// in series with a nozzle-workpiece restriction (area A, outlet P_a). The solver
// finds the intermediate pressure at which the two weight flow rates balance.
// The common factor sqrt(2g/RT) cancels, so only dimensionless flow factors appear.

#include <cmath>
#include <string>

#include "hybreg/config.hpp"
#include "hybreg/dataset.hpp"
#include "hybreg/errors.hpp"
#include "hybreg/hybrid.hpp"

namespace hybreg::gauge {

struct GaugeConstants {
    double gamma = 1.4;       ///< ratio of specific heats
    double p_atm = 101.325;   ///< outlet pressure, kPa
    double c_orifice = 1.0;   ///< orifice discharge coefficient
    double c_sensor = 1.0;    ///< sensor discharge coefficient

    void validate() const {
        if (!(gamma > 1.0)) throw ContractError("gauge: gamma must exceed 1");
        if (!(p_atm > 0.0)) throw ContractError("gauge: outlet pressure must be positive");
        if (!(c_orifice > 0.0 && c_orifice <= 1.0) || !(c_sensor > 0.0 && c_sensor <= 1.0))
            throw ContractError("gauge: discharge coefficients must lie in (0, 1]");
    }
};

struct GaugeInputs {
    double area_sensor = 0.0;      ///< A, mm^2
    double pressure_supply = 0.0;  ///< P_s, MPa absolute
    double area_orifice = 0.0;     ///< B, mm^2
};

enum class FlowModel { adiabatic, isochoric };

inline std::string model_name(FlowModel m) { return m == FlowModel::adiabatic ? "adiabatic" : "isochoric"; }

inline constexpr double kpa_per_mpa = 1000.0;

/// Pressure ratio below which adiabatic flow is choked: (2/(gamma+1))^(gamma/(gamma-1)).
inline double critical_pressure_ratio(double gamma) { return std::pow(2.0 / (gamma + 1.0), gamma / (gamma - 1.0)); }

inline double flow_factor_subsonic(double ratio, double gamma) {
    const double v = gamma / (gamma - 1.0) * (std::pow(ratio, 2.0 / gamma) - std::pow(ratio, (gamma + 1.0) / gamma));
    return std::sqrt(std::max(v, 0.0));
}

inline double flow_factor_choked(double gamma) {
    return std::sqrt(gamma / (gamma + 1.0) * std::pow(2.0 / (gamma + 1.0), 2.0 / (gamma - 1.0)));
}

/// Adiabatic flow factor for downstream/upstream pressure ratio in (0, 1].
inline double flow_factor_adiabatic(double pressure_ratio, double gamma) {
    if (!(pressure_ratio > 0.0 && pressure_ratio <= 1.0))
        throw DomainError("flow_factor_adiabatic: pressure ratio " + std::to_string(pressure_ratio) +
                          " outside (0, 1]");
    if (pressure_ratio >= critical_pressure_ratio(gamma)) return flow_factor_subsonic(pressure_ratio, gamma);
    return flow_factor_choked(gamma);
}

/// Isochoric flow factor: sqrt(p_down (p_up - p_down)) above ratio 0.5, p_up / 2 below.
inline double flow_factor_isochoric(double p_up, double p_down) {
    if (!(p_down > 0.0 && p_down <= p_up))
        throw DomainError("flow_factor_isochoric: need 0 < p_down <= p_up");
    if (p_down / p_up >= 0.5) return std::sqrt(p_down * (p_up - p_down));
    return 0.5 * p_up;
}

/// Orifice flow minus sensor flow at trial back-pressure `p` (kPa). Positive below the root.
inline double flow_balance(FlowModel model, double p, const GaugeInputs& in, const GaugeConstants& k) {
    const double ps = in.pressure_supply * kpa_per_mpa;
    if (model == FlowModel::adiabatic) {
        const double orifice = k.c_orifice * in.area_orifice * ps * flow_factor_adiabatic(p / ps, k.gamma);
        const double sensor = k.c_sensor * in.area_sensor * p * flow_factor_adiabatic(k.p_atm / p, k.gamma);
        return orifice - sensor;
    }
    const double orifice = k.c_orifice * in.area_orifice * flow_factor_isochoric(ps, p);
    const double sensor = k.c_sensor * in.area_sensor * flow_factor_isochoric(p, k.p_atm);
    return orifice - sensor;
}

/// Orifice-side flow, the reference magnitude for relative residuals.
inline double orifice_flow(FlowModel model, double p, const GaugeInputs& in, const GaugeConstants& k) {
    const double ps = in.pressure_supply * kpa_per_mpa;
    if (model == FlowModel::adiabatic)
        return k.c_orifice * in.area_orifice * ps * flow_factor_adiabatic(p / ps, k.gamma);
    return k.c_orifice * in.area_orifice * flow_factor_isochoric(ps, p);
}

struct BackPressure {
    double pressure = 0.0;           ///< kPa
    double relative_residual = 0.0;  ///< |balance| / orifice flow at the root
    int iterations = 0;
};

/// Bisection on (p_atm + 1e-6, P_s - 1e-6). Stops once the bracket is below 1e-10 relative
/// and the balance residual is below 1e-9 of the orifice flow.
inline BackPressure solve_backpressure(FlowModel model, const GaugeInputs& in, const GaugeConstants& k) {
    k.validate();
    if (!(in.area_sensor > 0.0 && in.area_orifice > 0.0 && in.pressure_supply > 0.0))
        throw ContractError("gauge: areas and supply pressure must be positive");
    const double ps = in.pressure_supply * kpa_per_mpa;
    if (!(ps > k.p_atm))
        throw ContractError("gauge: supply pressure " + std::to_string(ps) + " kPa does not exceed outlet pressure " +
                            std::to_string(k.p_atm) + " kPa");

    constexpr double edge = 1e-6;
    double lo = k.p_atm + edge;
    double hi = ps - edge;
    const double f_lo = flow_balance(model, lo, in, k);
    const double f_hi = flow_balance(model, hi, in, k);
    if (!(f_lo > 0.0 && f_hi < 0.0))
        throw NoSolutionError("gauge: flow balance does not change sign on (" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "); residuals " + std::to_string(f_lo) + ", " +
                                  std::to_string(f_hi),
                              f_lo, f_hi);

    BackPressure out;
    double mid = 0.5 * (lo + hi);
    for (out.iterations = 0; out.iterations < 400; ++out.iterations) {
        mid = 0.5 * (lo + hi);
        const double f_mid = flow_balance(model, mid, in, k);
        const double ref = orifice_flow(model, mid, in, k);
        if (hi - lo <= 1e-10 * mid && std::abs(f_mid) <= 1e-9 * ref) break;
        if (mid <= lo || mid >= hi) break;
        if (f_mid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    out.pressure = mid;
    const double ref = orifice_flow(model, mid, in, k);
    out.relative_residual = ref > 0.0 ? std::abs(flow_balance(model, mid, in, k)) / ref : 0.0;
    if (out.relative_residual > 1e-9)
        throw InconsistencyError("gauge: flow balance residual " + std::to_string(out.relative_residual) +
                                 " exceeds 1e-9 at the bracketed root");
    return out;
}

inline double solve_backpressure_adiabatic(const GaugeInputs& in, const GaugeConstants& k) {
    return solve_backpressure(FlowModel::adiabatic, in, k).pressure;
}

inline double solve_backpressure_isochoric(const GaugeInputs& in, const GaugeConstants& k) {
    return solve_backpressure(FlowModel::isochoric, in, k).pressure;
}

/// Which dataset factors feed the gauge inputs. Defaults to the first three factors (A, P_s, B).
struct GaugeColumns {
    std::string area_sensor;
    std::string pressure_supply;
    std::string area_orifice;
};

inline GaugeConstants constants_from_config(const KeyValueConfig& cfg) {
    GaugeConstants k;
    if (auto v = cfg.get_double("gauge.gamma")) k.gamma = *v;
    if (auto v = cfg.get_double("gauge.p_atm")) k.p_atm = *v;
    if (auto v = cfg.get_double("gauge.c_orifice")) k.c_orifice = *v;
    if (auto v = cfg.get_double("gauge.c_sensor")) k.c_sensor = *v;
    k.validate();
    return k;
}

inline GaugeColumns columns_from_config(const KeyValueConfig& cfg, const std::vector<FactorSpec>& factors) {
    GaugeColumns c;
    auto pick = [&](const char* key, std::size_t fallback) -> std::string {
        if (auto v = cfg.get(key)) return *v;
        if (fallback < factors.size()) return factors[fallback].name;
        return {};
    };
    c.area_sensor = pick("gauge.area_sensor", 0);
    c.pressure_supply = pick("gauge.pressure_supply", 1);
    c.area_orifice = pick("gauge.area_orifice", 2);
    return c;
}

namespace detail {
inline Index factor_index(const Dataset& ds, const std::string& name) {
    for (std::size_t j = 0; j < ds.factors.size(); ++j)
        if (ds.factors[j].name == name) return static_cast<Index>(j);
    throw SchemaError("gauge: dataset has no factor named '" + name + "'");
}
}  // namespace detail

/// One back-pressure per design row. Deterministic: equal rows give bit-identical outputs.
inline TheoryVector simulate_design(const Dataset& ds, FlowModel model, const GaugeConstants& k,
                                    const GaugeColumns& columns) {
    const Index ja = detail::factor_index(ds, columns.area_sensor);
    const Index jp = detail::factor_index(ds, columns.pressure_supply);
    const Index jb = detail::factor_index(ds, columns.area_orifice);
    Vector z(ds.natural.rows());
    for (Index i = 0; i < ds.natural.rows(); ++i) {
        const GaugeInputs in{ds.natural(i, ja), ds.natural(i, jp), ds.natural(i, jb)};
        try {
            z(i) = solve_backpressure(model, in, k).pressure;
        } catch (const Error& e) {
            throw RowError(static_cast<std::size_t>(i + 1), e.what());
        }
    }
    return make_theory(std::move(z), model_name(model));
}

inline TheoryVector simulate_design(const Dataset& ds, FlowModel model, const GaugeConstants& k) {
    return simulate_design(ds, model, k, GaugeColumns{ds.factors.size() > 0 ? ds.factors[0].name : "",
                                                      ds.factors.size() > 1 ? ds.factors[1].name : "",
                                                      ds.factors.size() > 2 ? ds.factors[2].name : ""});
}

}  // namespace hybreg::gauge
