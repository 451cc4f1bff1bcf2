#include <gtest/gtest.h>

#include <random>

#include "hybreg/linalg.hpp"

using namespace hybreg;

namespace {

Matrix random_matrix(std::mt19937& rng, Index r, Index c) {
    std::normal_distribution<double> d(0.0, 1.0);
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

// rank-k matrix as a product of random factors
Matrix random_rank(std::mt19937& rng, Index r, Index c, Index k) {
    return random_matrix(rng, r, k) * random_matrix(rng, k, c);
}

}  // namespace

TEST(Linalg, PenroseConditionsOnRankDeficientMatrices) {
    std::mt19937 rng(11);
    for (int t = 0; t < 100; ++t) {
        std::uniform_int_distribution<int> dim(2, 8);
        const Index r = dim(rng), c = dim(rng);
        const Index k = std::uniform_int_distribution<int>(1, static_cast<int>(std::min(r, c)))(rng);
        const Matrix a = random_rank(rng, r, c, k);
        const auto g = pseudo_inverse(a);
        EXPECT_EQ(g.rank, k);
        const Matrix& x = g.values;
        const double s = std::max(1.0, detail::max_abs(a)) * std::max(1.0, detail::max_abs(x));
        EXPECT_LT(detail::max_abs(a * x * a - a), 1e-8 * s * s);
        EXPECT_LT(detail::max_abs(x * a * x - x), 1e-8 * s * s);
        EXPECT_LT(detail::max_abs((a * x).transpose() - a * x), 1e-8 * s);
        EXPECT_LT(detail::max_abs((x * a).transpose() - x * a), 1e-8 * s);
    }
}

TEST(Linalg, GramPseudoInverseMatchesDirect) {
    std::mt19937 rng(12);
    for (int t = 0; t < 50; ++t) {
        const Matrix a = random_rank(rng, 9, 5, 3);
        const Matrix gram = a.transpose() * a;
        const Matrix direct = pseudo_inverse(gram).values;
        const auto via_svd = gram_pseudo_inverse(a);
        EXPECT_EQ(via_svd.rank, 3);
        EXPECT_LT(detail::max_abs(direct - via_svd.values), 1e-8 * std::max(1.0, detail::max_abs(direct)));
    }
}

TEST(Linalg, GeneralizedInverseContract) {
    EXPECT_THROW(generalized_inverse(Matrix::Ones(2, 3)), ContractError);
    Matrix asym(2, 2);
    asym << 1, 2, 0, 1;
    EXPECT_THROW(generalized_inverse(asym), ContractError);

    std::mt19937 rng(13);
    const Matrix a = random_rank(rng, 6, 4, 2);
    const Matrix m = a.transpose() * a;
    const Matrix g = generalized_inverse(m);
    EXPECT_LT(detail::max_abs(m * g * m - m), 1e-8 * detail::max_abs(m));
    EXPECT_EQ(detail::max_abs(g - g.transpose()), 0.0);
}

TEST(Linalg, ZeroMatrixHasZeroInverseAndRank) {
    const Matrix z = Matrix::Zero(4, 3);
    const auto g = pseudo_inverse(z);
    EXPECT_EQ(g.rank, 0);
    EXPECT_EQ(detail::max_abs(g.values), 0.0);
    EXPECT_EQ(g.values.rows(), 3);
}

TEST(Linalg, RankScaleSuppressesTinyColumns) {
    // a column that is negligible against the reference magnitude counts as rank zero
    Matrix tiny = Matrix::Zero(5, 1);
    tiny(0, 0) = 1e-13;
    EXPECT_EQ(numerical_rank(tiny), 1);
    EXPECT_EQ(numerical_rank(tiny, 1e-10, 10.0), 0);
}

TEST(Linalg, ProjectorProperties) {
    std::mt19937 rng(14);
    for (int t = 0; t < 100; ++t) {
        const Index n = std::uniform_int_distribution<int>(4, 15)(rng);
        const Index k = std::uniform_int_distribution<int>(1, 3)(rng);
        const Matrix a = random_rank(rng, n, k + 1, k);
        const Projector p = projector_onto_columns(a);
        EXPECT_TRUE(p.is_valid());
        EXPECT_NEAR(p.trace(), static_cast<double>(k), 1e-8);
        // P a = a and the complement annihilates the column space
        EXPECT_LT(detail::max_abs(p.matrix() * a - a), 1e-8 * detail::max_abs(a));
        EXPECT_LT(detail::max_abs(p.complement().matrix() * a), 1e-8 * detail::max_abs(a));
    }
}

TEST(Linalg, OlsAgreesWithNormalEquations) {
    std::mt19937 rng(15);
    for (int t = 0; t < 50; ++t) {
        const Matrix x = random_matrix(rng, 12, 4);
        const Vector y = random_matrix(rng, 12, 1);
        const Vector b = ols_solve(x, y);
        const Vector ref = (x.transpose() * x).inverse() * x.transpose() * y;
        EXPECT_LT((b - ref).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT(detail::max_abs(gram_inverse(x) - (x.transpose() * x).inverse()), 1e-9);
    }
}

TEST(Linalg, OlsErrors) {
    EXPECT_THROW(ols_solve(Matrix::Ones(4, 2), Vector::Ones(3)), ShapeError);
    EXPECT_THROW(ols_solve(Matrix::Ones(4, 2), Vector::Ones(4)), RankError);
    EXPECT_THROW(gram_inverse(Matrix::Ones(4, 2)), RankError);
}
