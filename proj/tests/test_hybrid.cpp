#include <gtest/gtest.h>

#include <random>

#include "hybreg/hybrid.hpp"
#include "random_systems.hpp"

using namespace hybreg;
using hybreg::detail::max_abs;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST(Hybrid, AssembleShapes) {
    std::mt19937 rng(31);
    const auto c = fixtures::random_case(rng);
    const auto sys = assemble(c.design, c.theory);
    const Index n = c.design.rows(), p1 = c.design.cols();
    EXPECT_EQ(sys.Psi.rows(), n);
    EXPECT_EQ(sys.Psi.cols(), 2 * p1);
    EXPECT_EQ(max_abs(sys.Psi.leftCols(p1) - c.design.x), 0.0);
    EXPECT_LT(max_abs(sys.Y - (sys.D() - Matrix::Identity(n, n)) * c.design.x), 1e-12 * max_abs(sys.Y));
    EXPECT_EQ(sys.m, sys.rank_psi);
}

TEST(Hybrid, AssembleErrors) {
    DesignMatrix d{Matrix::Ones(3, 2), {"1", "x"}};
    d.x(1, 1) = 2;
    d.x(2, 1) = 3;
    EXPECT_THROW(assemble(d, make_theory(Vector::Ones(4), "z")), ShapeError);
    DesignMatrix wide{Matrix::Ones(2, 3), {"1", "a", "b"}};
    EXPECT_THROW(assemble(wide, make_theory(Vector::Ones(2), "z")), UnderdeterminedError);
    Vector bad = Vector::Ones(3);
    bad(1) = std::nan("");
    EXPECT_THROW(make_theory(bad, "z"), ContractError);
}

// P_Psi = P_X + P_Z, both summands symmetric idempotent and mutually orthogonal.
TEST(HybridProperty, ProjectorIdentity) {
    std::mt19937 rng(32);
    for (int t = 0; t < 120; ++t) {
        const auto c = fixtures::random_case(rng);
        const auto sys = assemble(c.design, c.theory);
        const Matrix h = hat_matrix(sys);
        EXPECT_LT(max_abs(h - sys.hat_x - sys.hat_z), 1e-8) << "case " << t;
        EXPECT_LT(max_abs(sys.hat_x * sys.hat_z), 1e-8);
        EXPECT_LT(max_abs(h * h - h), 1e-8);
        EXPECT_NEAR(h.trace(), static_cast<double>(sys.m), 1e-8);
    }
}

// Partitioned (Rohde) and Moore-Penrose routes give the same fitted values and SS_E.
TEST(HybridProperty, GinverseRouteInvariance) {
    std::mt19937 rng(33);
    for (int t = 0; t < 120; ++t) {
        const auto c = fixtures::random_case(rng);
        const auto sys = assemble(c.design, c.theory);
        const auto fit = solve(sys, c.y);
        const Vector direct = sys.Psi * fit.b_direct;
        const Vector rohde = sys.Psi * (partitioned_ginv(sys) * (sys.Psi.transpose() * c.y));
        const double ys = c.y.cwiseAbs().maxCoeff();
        EXPECT_LT((fit.fitted - direct).cwiseAbs().maxCoeff(), 1e-8 * ys);
        EXPECT_LT((fit.fitted - rohde).cwiseAbs().maxCoeff(), 1e-8 * ys);
        EXPECT_LT(rel(fit.ss_e, (c.y - direct).squaredNorm()), 1e-8);
        EXPECT_LT((fit.fitted - fitted_values(sys, c.y)).cwiseAbs().maxCoeff(), 1e-8 * ys);
    }
}

// The partitioned g-inverse really is a g-inverse of Psi'Psi.
TEST(HybridProperty, PartitionedGinverseCondition) {
    std::mt19937 rng(34);
    for (int t = 0; t < 100; ++t) {
        const auto c = fixtures::random_case(rng);
        const auto sys = assemble(c.design, c.theory);
        const Matrix s = sys.Psi.transpose() * sys.Psi;
        const Matrix g = partitioned_ginv(sys);
        EXPECT_LT(max_abs(s * g * s - s) / max_abs(s), 1e-8);
    }
}

// D = I gives Y = 0, Z = 0: the hybrid solve collapses to ordinary least squares.
TEST(HybridProperty, UnitTheoryReducesToOls) {
    std::mt19937 rng(35);
    for (int t = 0; t < 100; ++t) {
        const auto c = fixtures::random_case(rng);
        const auto sys = assemble(c.design, unit_theory(c.design.rows()));
        const auto fit = solve(sys, c.y);
        const Vector q = ols_solve(c.design.x, c.y);
        EXPECT_EQ(sys.rank_z, 0);
        EXPECT_EQ(sys.m, c.design.cols());
        EXPECT_LT((fit.b1 - q).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, q.cwiseAbs().maxCoeff()));
        EXPECT_EQ(fit.b2.cwiseAbs().maxCoeff(), 0.0);
    }
}

// Block covariance equals the sandwich M (Psi'Psi) M sigma^2 for the partitioned g-inverse M.
TEST(HybridProperty, CovarianceMatchesSandwich) {
    std::mt19937 rng(36);
    for (int t = 0; t < 120; ++t) {
        const auto c = fixtures::random_case(rng);
        const auto sys = assemble(c.design, c.theory);
        const double s2 = 0.7;
        const auto cov = covariance_of_solution(sys, s2);
        const Matrix m = partitioned_ginv(sys);
        const Matrix sandwich = m * (sys.Psi.transpose() * sys.Psi) * m * s2;
        EXPECT_LT(max_abs(cov.full - sandwich) / std::max(1.0, max_abs(sandwich)), 1e-8) << "case " << t;
        EXPECT_LT(max_abs(cov.full - cov.full.transpose()) / std::max(1.0, max_abs(sandwich)), 1e-8);
    }
}

// Var(y_hat) = Psi Var(b) Psi' = (P_X + P_Z) sigma^2.
TEST(HybridProperty, VarianceOfFit) {
    std::mt19937 rng(37);
    for (int t = 0; t < 100; ++t) {
        const auto c = fixtures::random_case(rng);
        const auto sys = assemble(c.design, c.theory);
        const auto cov = covariance_of_solution(sys, 1.0);
        EXPECT_LT(max_abs(sys.Psi * cov.full * sys.Psi.transpose() - variance_of_fit(sys, 1.0)), 1e-8);
    }
}

TEST(Hybrid, ConstantTheoryIsAliasedAway) {
    // z = c makes Y = (c - 1) X, so Z = 0 and the extra block carries no information
    std::mt19937 rng(38);
    const auto c = fixtures::random_case(rng);
    const auto sys = assemble(c.design, make_theory(Vector::Constant(c.design.rows(), 3.0), "const"));
    EXPECT_EQ(sys.rank_z, 0);
    const auto fit = solve(sys, c.y);
    EXPECT_LT((fit.fitted - sys.X() * ols_solve(sys.X(), c.y)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Hybrid, EstimabilityIsIdempotent) {
    std::mt19937 rng(39);
    const auto c = fixtures::random_case(rng);
    const auto sys = assemble(c.design, c.theory);
    const Matrix j = estimability(sys);
    EXPECT_LT(max_abs(j * j - j), 1e-8);
    EXPECT_NEAR(j.trace(), static_cast<double>(sys.m), 1e-8);
}

TEST(Hybrid, AliasMatrixIsBiasOfNaiveFit) {
    std::mt19937 rng(40);
    const auto c = fixtures::random_case(rng);
    const auto sys = assemble(c.design, c.theory);
    Vector theta = Vector::LinSpaced(c.design.cols(), 0.5, 1.5);
    const Vector noiseless = sys.D() * sys.X() * theta;
    const Vector q = ols_solve(sys.X(), noiseless);
    EXPECT_LT((q - (theta + alias_matrix(sys) * theta)).cwiseAbs().maxCoeff(), 1e-8 * q.cwiseAbs().maxCoeff());
}

TEST(Hybrid, SaturatedHasNoSigma) {
    // n == m: the fit interpolates and sigma^2 is not estimable
    Matrix x(4, 2);
    x << 1, -1, 1, 1, 1, -0.5, 1, 0.5;
    Vector z(4);
    z << 2, 3, 5, 7;
    Vector y(4);
    y << 1, 4, 2, 8;
    const auto sys = assemble(DesignMatrix{x, {"1", "x"}}, make_theory(z, "z"));
    const auto fit = solve(sys, y);
    EXPECT_EQ(fit.df_e, 0);
    EXPECT_FALSE(fit.sigma2_available());
    EXPECT_LT(fit.ss_e, 1e-18 * y.squaredNorm() + 1e-20);
}

TEST(Hybrid, SolveShapeError) {
    std::mt19937 rng(41);
    const auto c = fixtures::random_case(rng);
    const auto sys = assemble(c.design, c.theory);
    EXPECT_THROW(solve(sys, Vector::Ones(c.y.size() + 1)), ShapeError);
}
