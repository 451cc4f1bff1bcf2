#pragma once

// Plain-text, delimited and SVG renderings of an Analysis. All output is
// deterministic: identical analyses give byte-identical text.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hybreg/analysis.hpp"

namespace hybreg::report {

/// Four significant figures; switches to exponent form outside [1e-3, 1e4).
inline std::string sig4(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    if (v == 0.0) return "0";
    char buf[64];
    const double a = std::abs(v);
    if (a >= 1e4 || a < 1e-3)
        std::snprintf(buf, sizeof buf, "%.3e", v);
    else
        std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    if (s == "-0.000") s = "0.000";
    return s;
}

inline std::string full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string anova_title(AnovaLayout l) {
    switch (l) {
        case AnovaLayout::full: return "Analysis of variance for fitting the regression";
        case AnovaLayout::partitioned: return "Analysis of variance showing the linear regression term";
        case AnovaLayout::corrected: return "Analysis of variance corrected for the linear regression term";
        case AnovaLayout::about_mean: return "Analysis of variance about the mean";
    }
    return {};
}

inline std::string render_text(const AnovaReport& rep, const std::string& units) {
    const std::string u2 = units.empty() ? "" : ", (" + units + ")^2";
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Source of variation", "Sum of squares" + u2, "df", "Mean square" + u2, "F", "p-value"});
    for (const auto& r : rep.rows)
        cells.push_back({r.source, sig4(r.ss), std::to_string(r.df), r.ms ? sig4(*r.ms) : "", r.f ? sig4(*r.f) : "",
                         r.p_value ? sig4(*r.p_value) : ""});
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& row : cells)
        for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());

    std::ostringstream out;
    out << anova_title(rep.layout) << "\n\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::string line;
        for (std::size_t j = 0; j < cells[i].size(); ++j) {
            std::string c = cells[i][j];
            const std::size_t pad = width[j] - c.size();
            if (j == 0)
                c += std::string(pad, ' ');
            else
                c = std::string(pad, ' ') + c;
            line += (j ? "  " : "") + c;
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << "\n";
        if (i == 0) out << std::string(line.size(), '-') << "\n";
    }
    return out.str();
}

/// Machine-readable rows: layout, source, ss, df, ms, f, p_value (tab separated).
inline std::string render_rows(const std::vector<AnovaReport>& reports) {
    std::ostringstream out;
    out << "layout\tsource\tss\tdf\tms\tf\tp_value\n";
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            out << layout_name(rep.layout) << '\t' << r.source << '\t' << full(r.ss) << '\t' << r.df << '\t'
                << (r.ms ? full(*r.ms) : "") << '\t' << (r.f ? full(*r.f) : "") << '\t'
                << (r.p_value ? full(*r.p_value) : "") << '\n';
    return out.str();
}

inline std::string coefficients_tsv(const Analysis& a) {
    std::ostringstream out;
    out << "index\tblock\tterm\testimate\tstd_error\testimate_full\n";
    const Index p1 = a.design.cols();
    const Index count = a.is_hybrid() ? 2 * p1 : p1;
    for (Index i = 0; i < count; ++i) {
        const bool second = i >= p1;
        const std::string term = a.design.labels[static_cast<std::size_t>(second ? i - p1 : i)];
        const double est = a.fit.b(i);
        std::string se;
        if (a.fit.var_b.size() > 0) se = fixed3(std::sqrt(std::max(a.fit.var_b(i, i), 0.0)));
        out << i << '\t' << (second ? "b2" : "b1") << '\t' << (second ? "(z-1)*" + term : term) << '\t' << fixed3(est)
            << '\t' << se << '\t' << full(est) << '\n';
    }
    return out.str();
}

inline std::string normal_plot_tsv(const ResidualDiagnostics& d) {
    std::ostringstream out;
    out << "rank\trun\tprobability\tnormal_quantile\tresidual\n";
    for (std::size_t k = 0; k < d.normal_plot.size(); ++k) {
        const auto& p = d.normal_plot[k];
        out << k + 1 << '\t' << p.run + 1 << '\t' << full(p.probability) << '\t' << full(p.quantile) << '\t'
            << full(p.residual) << '\n';
    }
    return out.str();
}

inline std::string scatter_tsv(const ResidualDiagnostics& d) {
    std::ostringstream out;
    out << "run\tfitted\tresidual\n";
    for (const auto& p : d.scatter) out << p.run + 1 << '\t' << full(p.fitted) << '\t' << full(p.residual) << '\n';
    return out.str();
}

namespace detail {

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
};

inline Axis pad_axis(double lo, double hi) {
    if (!(hi > lo)) {
        const double c = lo;
        const double w = std::max(1.0, std::abs(c) * 0.1);
        return {c - w, c + w};
    }
    const double pad = 0.08 * (hi - lo);
    return {lo - pad, hi + pad};
}

inline std::vector<double> ticks(const Axis& ax, int target = 5) {
    const double span = ax.hi - ax.lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(ax.lo / step) * step; t <= ax.hi + 1e-12 * span; t += step)
        out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return out;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace detail

/// Standalone SVG scatter plot with labelled axes and an optional horizontal zero line.
inline std::string scatter_svg(const std::vector<std::pair<double, double>>& pts, const std::string& title,
                               const std::string& x_label, const std::string& y_label, bool zero_line) {
    constexpr double w = 640, h = 480, ml = 80, mr = 30, mt = 50, mb = 70;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    if (!pts.empty()) {
        xmin = xmax = pts[0].first;
        ymin = ymax = pts[0].second;
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (zero_line) {
        ymin = std::min(ymin, 0.0);
        ymax = std::max(ymax, 0.0);
    }
    const auto ax = detail::pad_axis(xmin, xmax);
    const auto ay = detail::pad_axis(ymin, ymax);
    auto sx = [&](double x) { return ml + (x - ax.lo) / (ax.hi - ax.lo) * (w - ml - mr); };
    auto sy = [&](double y) { return h - mb - (y - ay.lo) / (ay.hi - ay.lo) * (h - mt - mb); };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    auto tick_label = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return std::string(buf);
    };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    s << "<text x=\"" << w / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">" << detail::escape(title)
      << "</text>\n";
    s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr << "\" height=\"" << h - mt - mb
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : detail::ticks(ax)) {
        s << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << h - mb << "\" x2=\"" << num(sx(t)) << "\" y2=\""
          << h - mb + 5 << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << num(sx(t)) << "\" y=\"" << h - mb + 20 << "\" text-anchor=\"middle\">" << tick_label(t)
          << "</text>\n";
    }
    for (double t : detail::ticks(ay)) {
        s << "<line x1=\"" << ml - 5 << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << ml << "\" y2=\"" << num(sy(t))
          << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << ml - 8 << "\" y=\"" << num(sy(t) + 4) << "\" text-anchor=\"end\">" << tick_label(t)
          << "</text>\n";
    }
    if (zero_line)
        s << "<line x1=\"" << ml << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << w - mr << "\" y2=\"" << num(sy(0))
          << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    for (const auto& [x, y] : pts)
        s << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"4\" fill=\"steelblue\"/>\n";
    s << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 22 << "\" text-anchor=\"middle\">"
      << detail::escape(x_label) << "</text>\n";
    s << "<text x=\"20\" y=\"" << (mt + h - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << (mt + h - mb) / 2 << ")\">" << detail::escape(y_label) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

inline std::string with_units(const std::string& label, const std::string& units) {
    return units.empty() ? label : label + ", " + units;
}

inline std::string normal_plot_svg(const ResidualDiagnostics& d, const std::string& units) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : d.normal_plot) pts.emplace_back(p.quantile, p.residual);
    return scatter_svg(pts, "Normal probability plot of residuals", "Standard normal quantile",
                       with_units("Residual", units), false);
}

inline std::string fitted_plot_svg(const ResidualDiagnostics& d, const std::string& units) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : d.scatter) pts.emplace_back(p.fitted, p.residual);
    return scatter_svg(pts, "Residuals versus predicted values", with_units("Predicted response", units),
                       with_units("Residual", units), true);
}

inline std::string summary_text(const Analysis& a) {
    std::ostringstream out;
    const auto& ss = a.ss;
    const std::string& units = a.data.response_units;
    out << "model: " << model_kind_name(a.options.model) << "\n";
    out << "theory: " << (a.is_hybrid() ? a.options.theory.describe() : "none") << "\n";
    out << "response: " << a.data.response_name << (units.empty() ? "" : " (" + units + ")") << "\n";
    out << "alpha: " << a.alpha << "\n";
    {
        const auto& k = a.options.constants;
        out << "gauge constants: gamma=" << full(k.gamma) << " p_atm=" << full(k.p_atm) << " kPa"
            << " c_orifice=" << full(k.c_orifice) << " c_sensor=" << full(k.c_sensor) << "\n";
    }
    out << "observations: " << ss.n << "\n";
    out << "terms p+1: " << ss.df_rx << "\n";
    out << "rank m: " << ss.df_r << "\n";
    out << "\ncoefficients:";
    const Index count = a.is_hybrid() ? a.fit.b.size() : a.fit.b1.size();
    for (Index i = 0; i < count; ++i) out << ' ' << fixed3(a.fit.b(i));
    out << "\n\n";
    out << "SS_T = " << sig4(ss.ss_t) << "   SS_Rx = " << sig4(ss.ss_rx) << "   SS_Rc = " << sig4(ss.ss_rc)
        << "   SS_E = " << sig4(ss.ss_e) << "\n";
    out << "sigma2_hat = " << (a.fit.sigma2_hat ? sig4(*a.fit.sigma2_hat) : std::string("unavailable")) << "\n";
    out << "residual standard deviation sqrt(SS_E/(n-1)) = " << fixed3(a.residual_sd) << "\n";
    out << "R^2 = " << sig4(a.r2.r2) << "   R^2_max = " << sig4(a.r2.r2_max) << "\n";
    out << "F_0 (about mean) = " << sig4(a.f_about_mean) << "   critical = " << sig4(a.f_crit_regression) << "\n";
    out << "F_R = " << sig4(a.f.f_r) << "   F_Rx = " << sig4(a.f.f_rx);
    if (a.f.f_rc) out << "   F_Rc = " << sig4(*a.f.f_rc);
    out << "\n";
    if (a.pure)
        out << "SS_PE = " << sig4(a.pure->ss_pe) << " (df " << a.pure->df_pe << ")   SS_LoF = " << sig4(a.pure->ss_lof)
            << " (df " << a.pure->df_lof << ")\n";
    if (a.lof)
        out << "F_LoF = " << sig4(a.lof->f) << "   critical = " << sig4(*a.f_crit_lof)
            << "   p = " << sig4(a.lof->p_value) << "\n";
    out << "lack of fit verdict: " << verdict_name(a.lack_of_fit_verdict) << "\n";
    if (a.box_wetz_lof)
        out << "Box-Wetz lack-of-fit margin (critical / observed F_LoF) = " << sig4(a.box_wetz_lof->ratio) << " -> "
            << (a.box_wetz_lof->useful_predictor ? "useful predictor" : "not a useful predictor") << "\n";
    if (a.box_wetz_corrected)
        out << "F_Rc / critical = " << sig4(a.box_wetz_corrected->ratio) << "\n";
    for (const auto& c : a.coding_notes)
        out << "note: row " << c.row + 1 << " factor " << c.factor << " natural " << full(c.natural) << " codes to "
            << sig4(c.computed) << " but the table declares " << sig4(c.declared) << "; declared level used\n";
    return out.str();
}

enum class Format { text, rows, plots };

inline std::set<Format> parse_formats(const std::string& csv) {
    std::set<Format> out;
    for (const auto& tok : hybreg::detail::split_list(csv)) {
        if (tok == "text")
            out.insert(Format::text);
        else if (tok == "rows")
            out.insert(Format::rows);
        else if (tok == "plots")
            out.insert(Format::plots);
        else if (tok == "all")
            out = {Format::text, Format::rows, Format::plots};
        else
            throw ContractError("unknown format '" + tok + "' (expected text, rows, plots or all)");
    }
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << content;
}

/// Writes the report files under `dir` and returns their names in write order.
inline std::vector<std::string> write_outputs(const Analysis& a, const std::filesystem::path& dir,
                                              const std::set<Format>& formats) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    auto put = [&](const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        written.push_back(name);
    };
    put("coefficients.tsv", coefficients_tsv(a));
    std::vector<AnovaReport> reps;
    for (auto l : {AnovaLayout::full, AnovaLayout::partitioned, AnovaLayout::corrected, AnovaLayout::about_mean})
        reps.push_back(anova_table(a.ss, a.pure, l));
    if (formats.count(Format::text)) {
        put("anova_table2.txt", render_text(reps[0], a.data.response_units));
        put("anova_table3.txt", render_text(reps[1], a.data.response_units));
        put("anova_table4.txt", render_text(reps[2], a.data.response_units));
        put("anova_about_mean.txt", render_text(reps[3], a.data.response_units));
    }
    if (formats.count(Format::rows)) put("anova_rows.tsv", render_rows(reps));
    if (formats.count(Format::plots)) {
        const auto d = residual_diagnostics(a.fit);
        put("residuals_normal.tsv", normal_plot_tsv(d));
        put("residuals_normal.svg", normal_plot_svg(d, a.data.response_units));
        put("residuals_fitted.tsv", scatter_tsv(d));
        put("residuals_fitted.svg", fitted_plot_svg(d, a.data.response_units));
    }
    put("summary.txt", summary_text(a));
    return written;
}

}  // namespace hybreg::report
