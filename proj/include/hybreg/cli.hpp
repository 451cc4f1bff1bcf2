#pragma once

// Command-line front end: simulate, fit and validate.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "hybreg/analysis.hpp"
#include "hybreg/report.hpp"
#include "hybreg/validation.hpp"

#ifndef HYBREG_DATA_DIR
#define HYBREG_DATA_DIR "data"
#endif

namespace hybreg::cli {

/// Everything a subcommand needs, after merging the config file with flags.
struct RunConfig {
    std::string data_path;
    std::string spec_path;
    std::string config_path;
    std::string model = "mlr1";
    std::string theory = "none";
    double alpha = 0.05;
    std::string output_dir;
    std::string formats = "text,rows,plots";
    std::string data_dir = HYBREG_DATA_DIR;
};

namespace detail {

struct Flags {
    std::optional<std::string> data, spec, model, theory, out, format;
    std::optional<double> alpha;
    std::string config;
};

// Flag > config file > built-in default.
inline RunConfig merge(const Flags& f, RunConfig base) {
    KeyValueConfig cfg;
    if (!f.config.empty()) {
        cfg = KeyValueConfig::parse(validation::read_file(f.config));
        base.config_path = f.config;
    }
    auto pick = [&](const std::optional<std::string>& flag, const char* key, std::string& dst) {
        if (flag)
            dst = *flag;
        else if (auto v = cfg.get(key))
            dst = *v;
    };
    pick(f.data, "data", base.data_path);
    pick(f.spec, "spec", base.spec_path);
    pick(f.model, "model", base.model);
    pick(f.theory, "theory", base.theory);
    pick(f.out, "out", base.output_dir);
    pick(f.format, "format", base.formats);
    if (f.alpha)
        base.alpha = *f.alpha;
    else if (auto a = cfg.get_double("alpha"))
        base.alpha = *a;
    if (!(base.alpha > 0.0 && base.alpha < 1.0)) throw ContractError("alpha must lie in (0, 1)");
    return base;
}

inline std::string default_spec_for(const std::string& data) {
    std::filesystem::path p(data);
    p.replace_extension(".spec");
    return p.string();
}

struct Loaded {
    Dataset data;
    KeyValueConfig spec;
};

inline Loaded load(RunConfig& rc) {
    if (rc.data_path.empty()) throw ContractError("--data is required");
    if (rc.spec_path.empty()) rc.spec_path = default_spec_for(rc.data_path);
    Loaded l;
    l.spec = KeyValueConfig::parse(validation::read_file(rc.spec_path));
    // gauge.* keys in the run config override the dataset spec
    if (!rc.config_path.empty()) {
        const auto cfg = KeyValueConfig::parse(validation::read_file(rc.config_path));
        for (const auto& [k, v] : cfg.entries())
            if (hybreg::detail::starts_with(k, "gauge.")) l.spec.set(k, v);
    }
    l.data = load_table(validation::read_file(rc.data_path), schema_from_config(l.spec));
    return l;
}

inline std::string constants_line(const gauge::GaugeConstants& k) {
    std::ostringstream s;
    s << "gauge constants: gamma=" << report::full(k.gamma) << " p_atm=" << report::full(k.p_atm)
      << " kPa c_orifice=" << report::full(k.c_orifice) << " c_sensor=" << report::full(k.c_sensor);
    return s.str();
}

}  // namespace detail

inline int cmd_simulate(RunConfig rc, std::ostream& out) {
    const auto theory = TheorySource::parse(rc.theory);
    if (theory.kind != TheorySource::Kind::adiabatic && theory.kind != TheorySource::Kind::isochoric)
        throw ContractError("simulate needs --theory adiabatic or isochoric");
    auto l = detail::load(rc);
    const auto k = gauge::constants_from_config(l.spec);
    const auto cols = gauge::columns_from_config(l.spec, l.data.factors);
    const auto model =
        theory.kind == TheorySource::Kind::adiabatic ? gauge::FlowModel::adiabatic : gauge::FlowModel::isochoric;
    const auto z = gauge::simulate_design(l.data, model, k, cols);

    std::ostringstream table;
    for (const auto& name : l.data.column_names) table << name << '\t';
    table << "z_" << gauge::model_name(model) << '\n';
    for (Index i = 0; i < l.data.table.rows(); ++i) {
        for (Index j = 0; j < l.data.table.cols(); ++j) table << report::full(l.data.table(i, j)) << '\t';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", z.z(i));
        table << buf << '\n';
    }

    out << detail::constants_line(k) << "\n";
    out << "flow model: " << gauge::model_name(model) << "\n";
    if (rc.output_dir.empty()) {
        out << table.str();
    } else {
        std::filesystem::create_directories(rc.output_dir);
        const auto path = std::filesystem::path(rc.output_dir) / "simulated.tsv";
        report::write_file(path, table.str());
        out << "wrote " << path.string() << "\n";
    }
    return 0;
}

inline int cmd_fit(RunConfig rc, std::ostream& out) {
    if (rc.output_dir.empty()) throw ContractError("--out is required for fit");
    const auto formats = report::parse_formats(rc.formats);
    auto l = detail::load(rc);
    AnalysisOptions opt;
    opt.model = parse_model_kind(rc.model);
    opt.theory = TheorySource::parse(rc.theory);
    opt.alpha = rc.alpha;
    opt.constants = gauge::constants_from_config(l.spec);
    opt.gauge_columns = gauge::columns_from_config(l.spec, l.data.factors);
    if (opt.model != ModelKind::hybrid && opt.theory.kind != TheorySource::Kind::none)
        throw ContractError("--theory applies only to --model hybrid");
    const Analysis a = run_analysis(l.data, opt);
    const auto files = report::write_outputs(a, rc.output_dir, formats);
    out << report::summary_text(a);
    out << "\nwrote";
    for (const auto& f : files) out << ' ' << f;
    out << " to " << rc.output_dir << "\n";
    return 0;
}

inline int cmd_validate(const RunConfig& rc, std::ostream& out) {
    const std::filesystem::path dir(rc.data_dir);
    for (const char* f : {"factorial.tsv", "factorial.spec", "box_behnken.tsv", "box_behnken.spec"})
        if (!std::filesystem::exists(dir / f)) throw Error("bundled data missing: " + (dir / f).string());
    const auto rep = validation::run_validation(dir);
    const std::string text = validation::render(rep);
    out << text;
    if (!rc.output_dir.empty()) {
        std::filesystem::create_directories(rc.output_dir);
        report::write_file(std::filesystem::path(rc.output_dir) / "validation.tsv", text);
    }
    return rep.all_passed() ? 0 : 1;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid-data multiple regression for physical and simulated experiments", "hybreg"};
    app.require_subcommand(1);

    detail::Flags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--data", flags.data, "observation table (tab, comma or space separated)");
        sub->add_option("--spec", flags.spec, "factor/response spec; defaults to the data path with .spec");
        sub->add_option("--config", flags.config, "key = value run config; flags take precedence");
        sub->add_option("--out", flags.out, "output directory");
    };

    auto* sim = app.add_subcommand("simulate", "append gauge back-pressure simulated for every design row");
    add_common(sim);
    sim->add_option("--theory", flags.theory, "adiabatic or isochoric");

    auto* fit = app.add_subcommand("fit", "fit a regression and write ANOVA, coefficients and residual plots");
    add_common(fit);
    fit->add_option("--model", flags.model, "mlr1, mlr2 or hybrid");
    fit->add_option("--theory", flags.theory, "adiabatic, isochoric, column:<name> or none");
    fit->add_option("--alpha", flags.alpha, "significance level (default 0.05)");
    fit->add_option("--format", flags.format, "comma list of text, rows, plots or all");

    std::string data_dir = HYBREG_DATA_DIR;
    std::string validate_out;
    auto* val = app.add_subcommand("validate", "reproduce the gauge case study from the bundled tables");
    val->add_option("--data-dir", data_dir, "directory holding factorial and box_behnken .tsv/.spec pairs");
    val->add_option("--out", validate_out, "also write validation.tsv here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (val->parsed()) {
            RunConfig rc;
            rc.data_dir = data_dir;
            rc.output_dir = validate_out;
            return cmd_validate(rc, out);
        }
        const RunConfig rc = detail::merge(flags, RunConfig{});
        if (sim->parsed()) return cmd_simulate(rc, out);
        return cmd_fit(rc, out);
    } catch (const RowError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const SaturatedModelError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const UndefinedStatisticError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hybreg::cli
