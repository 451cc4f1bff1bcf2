#include <gtest/gtest.h>

#include <filesystem>

#include "hybreg/report.hpp"
#include "hybreg/validation.hpp"

using namespace hybreg;
namespace fs = std::filesystem;

namespace {

Analysis factorial_analysis(const std::string& model, const std::string& theory) {
    const auto bundle = validation::load_bundle(HYBREG_DATA_DIR);
    AnalysisOptions o;
    o.model = parse_model_kind(model);
    o.theory = TheorySource::parse(theory);
    return run_analysis(bundle.factorial, o);
}

}  // namespace

TEST(Format, SignificantFigures) {
    EXPECT_EQ(report::sig4(22869.82), "2.287e+04");
    EXPECT_EQ(report::sig4(2990.0145), "2990");
    EXPECT_EQ(report::sig4(0.949033), "0.949");
    EXPECT_EQ(report::sig4(17.847), "17.85");
    EXPECT_EQ(report::sig4(0.0), "0");
    EXPECT_EQ(report::sig4(7.6e-8), "7.600e-08");
}

TEST(Format, Fixed3) {
    EXPECT_EQ(report::fixed3(208.4225454), "208.423");
    EXPECT_EQ(report::fixed3(-0.0001), "0.000");
    EXPECT_EQ(report::fixed3(-34.408875), "-34.409");
}

TEST(Report, ClassicTableText) {
    const auto a = factorial_analysis("mlr1", "none");
    const auto rep = anova_table(a.ss, a.pure, AnovaLayout::about_mean);
    const std::string t = report::render_text(rep, "kPa");
    EXPECT_NE(t.find("2.287e+04"), std::string::npos);
    EXPECT_NE(t.find("17.85"), std::string::npos);
    EXPECT_NE(t.find("1260"), std::string::npos);
    EXPECT_NE(t.find("(kPa)^2"), std::string::npos);
}

TEST(Report, CoefficientsFile) {
    const auto a = factorial_analysis("hybrid", "column:Pv");
    const std::string c = report::coefficients_tsv(a);
    EXPECT_NE(c.find("b1\t1\t15.426"), std::string::npos);
    EXPECT_NE(c.find("b2\t(z-1)*1\t0.971"), std::string::npos);
    // header plus eight coefficients
    EXPECT_EQ(std::count(c.begin(), c.end(), '\n'), 9);
}

TEST(Report, SvgIsSelfContained) {
    const auto a = factorial_analysis("mlr1", "none");
    const auto d = residual_diagnostics(a.fit);
    const std::string s = report::fitted_plot_svg(d, "kPa");
    EXPECT_EQ(s.rfind("<svg", 0), 0u);
    EXPECT_NE(s.find("</svg>"), std::string::npos);
    std::size_t circles = 0;
    for (auto pos = s.find("<circle"); pos != std::string::npos; pos = s.find("<circle", pos + 1)) ++circles;
    EXPECT_EQ(circles, 11u);
    EXPECT_NE(s.find("Predicted response, kPa"), std::string::npos);
    EXPECT_EQ(report::detail::escape("a<b&c"), "a&lt;b&amp;c");
}

TEST(Report, OutputsAreDeterministic) {
    const auto a = factorial_analysis("hybrid", "column:Plambda");
    const fs::path base = fs::temp_directory_path() / "hybreg_report_test";
    fs::remove_all(base);
    const auto all = report::parse_formats("all");
    const auto f1 = report::write_outputs(a, base / "one", all);
    const auto f2 = report::write_outputs(a, base / "two", all);
    ASSERT_EQ(f1, f2);
    for (const char* required : {"coefficients.tsv", "anova_table2.txt", "anova_table3.txt", "anova_table4.txt",
                                 "residuals_normal.tsv", "residuals_normal.svg", "residuals_fitted.tsv",
                                 "residuals_fitted.svg", "summary.txt"})
        EXPECT_NE(std::find(f1.begin(), f1.end(), required), f1.end()) << required;
    for (const auto& f : f1)
        EXPECT_EQ(validation::read_file(base / "one" / f), validation::read_file(base / "two" / f)) << f;
    fs::remove_all(base);
}

TEST(Report, FormatSelection) {
    EXPECT_EQ(report::parse_formats("text").size(), 1u);
    EXPECT_EQ(report::parse_formats("text,rows plots").size(), 3u);
    EXPECT_THROW(report::parse_formats("pdf"), ContractError);
}

TEST(Report, SummaryCarriesVerdicts) {
    const auto adia = report::summary_text(factorial_analysis("hybrid", "column:Plambda"));
    EXPECT_NE(adia.find("not a useful predictor"), std::string::npos);
    EXPECT_NE(adia.find("gamma=1.4"), std::string::npos);
    const auto mlr = report::summary_text(factorial_analysis("mlr1", "none"));
    EXPECT_NE(mlr.find("lack of fit verdict: inadequate"), std::string::npos);
}
