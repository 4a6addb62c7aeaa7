#include <mgqda/error.hpp>
#include <mgqda/linalg.hpp>

#include "support.hpp"

#include <Eigen/LU>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace mgqda;

namespace {

SymMatrix diag(std::initializer_list<double> d)
{
    Vector v(static_cast<Index>(d.size()));
    Index k = 0;
    for (double x : d) v(k++) = x;
    return SymMatrix(v.asDiagonal().toDenseMatrix());
}

} // namespace

TEST(SymMatrix, ReflectsLowerTriangle)
{
    Matrix m(2, 2);
    m << 1, 7, 2, 3;
    const SymMatrix s(m);
    EXPECT_EQ(s(0, 1), 2.0);
    EXPECT_EQ(s(1, 0), 2.0);
    EXPECT_THROW(SymMatrix(Matrix(2, 3)), InvalidInput);
}

TEST(SymEigen, DiagonalInput)
{
    const auto e = sym_eigen(diag({3, 1}));
    EXPECT_DOUBLE_EQ(e.values(0), 3.0);
    EXPECT_DOUBLE_EQ(e.values(1), 1.0);
    EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(e.vectors(1, 1)), 1.0, 1e-15);
}

TEST(SymEigen, Identity)
{
    const auto e = sym_eigen(SymMatrix::identity(4));
    for (Index k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(e.values(k), 1.0);
}

TEST(SymEigen, TwoByTwoByHand)
{
    Matrix m(2, 2);
    m << 2, 1, 1, 2;
    const auto e = sym_eigen(SymMatrix(m));
    EXPECT_NEAR(e.values(0), 3.0, 1e-14);
    EXPECT_NEAR(e.values(1), 1.0, 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    // eigenvectors are unique up to sign
    EXPECT_NEAR(std::abs(e.vectors.col(0).dot(Vector::Constant(2, r))), 1.0, 1e-14);
    Vector minus(2);
    minus << r, -r;
    EXPECT_NEAR(std::abs(e.vectors.col(1).dot(minus)), 1.0, 1e-14);
}

TEST(SymEigen, RejectsNonFinite)
{
    Matrix m = Matrix::Identity(3, 3);
    m(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(sym_eigen(SymMatrix(m)), InvalidInput);
}

TEST(SymEigen, ReconstructionAndOrthogonality)
{
    std::mt19937_64 rng(11);
    for (Index dim : {1, 3, 8, 25}) {
        const Matrix g = fixture::gaussian(rng, dim, dim);
        const SymMatrix a(g + g.transpose());
        const auto e = sym_eigen(a);
        for (Index k = 1; k < dim; ++k) EXPECT_GE(e.values(k - 1), e.values(k));
        const Matrix back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        EXPECT_LE((back - a.matrix()).norm(), 1e-10 * (1.0 + a.matrix().norm()));
        EXPECT_LE((e.vectors.transpose() * e.vectors - Matrix::Identity(dim, dim)).norm(), 1e-10 * dim);
    }
}

TEST(PseudoInverse, Diagonal)
{
    const auto inv = pseudo_inverse(diag({2, 0}));
    EXPECT_NEAR(inv(0, 0), 0.5, 1e-15);
    EXPECT_EQ(inv(0, 1), 0.0);
    EXPECT_NEAR(inv(1, 1), 0.0, 1e-15);
}

TEST(PseudoInverse, ZeroMatrix)
{
    EXPECT_EQ(pseudo_inverse(SymMatrix::zero(3)).matrix(), Matrix::Zero(3, 3));
}

TEST(PseudoInverse, MatchesLinearSolve)
{
    std::mt19937_64 rng(5);
    const auto a = fixture::random_psd(rng, 6, 10);
    const Matrix direct = a.matrix().partialPivLu().solve(Matrix::Identity(6, 6));
    const auto inv = pseudo_inverse(a);
    EXPECT_LE((inv.matrix() - direct).norm(), 1e-8 * direct.norm());
}

TEST(PseudoInverse, MoorePenroseIdentities)
{
    std::mt19937_64 rng(17);
    for (Index rank : {1, 3, 7, 9}) {
        const auto a = fixture::random_psd(rng, 9, rank);
        const Matrix& m = a.matrix();
        const Matrix p = pseudo_inverse(a).matrix();
        EXPECT_LE((m * p * m - m).norm(), 1e-8 * m.norm());
        EXPECT_LE((p * m * p - p).norm(), 1e-8 * p.norm());
        EXPECT_LE(((m * p).transpose() - m * p).norm(), 1e-8 * (m * p).norm());
        EXPECT_LE(((p * m).transpose() - p * m).norm(), 1e-8 * (p * m).norm());
    }
}

TEST(LogPseudoDet, Examples)
{
    EXPECT_NEAR(log_pseudo_det(diag({2, 3, 0})), std::log(6.0), 1e-14);
    EXPECT_NEAR(log_pseudo_det(SymMatrix::identity(5)), 0.0, 1e-14);
    // 1e-30 is below tau = 1e-12 * 2 * 2
    EXPECT_NEAR(log_pseudo_det(diag({2, 1e-30})), std::log(2.0), 1e-14);
    EXPECT_EQ(log_pseudo_det(SymMatrix::zero(3)), 0.0);
}

TEST(LogPseudoDet, MatchesLuDeterminant)
{
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        const auto a = fixture::random_psd(rng, 5, 8);
        const double det = a.matrix().partialPivLu().determinant();
        EXPECT_NEAR(std::exp(log_pseudo_det(a)), det, 1e-8 * det);
    }
}

TEST(SpectralInverse, FlagsRankDeficiency)
{
    std::mt19937_64 rng(29);
    const auto full = spectral_inverse(fixture::random_psd(rng, 4, 6));
    EXPECT_TRUE(full.invertible);
    EXPECT_EQ(full.rank, 4);
    const auto low = spectral_inverse(fixture::random_psd(rng, 4, 2));
    EXPECT_FALSE(low.invertible);
    EXPECT_EQ(low.rank, 2);
}

TEST(PsdFactor, Examples)
{
    const Matrix l = psd_factor(SymMatrix::identity(4));
    EXPECT_LE((l * l.transpose() - Matrix::Identity(4, 4)).norm(), 1e-14);
    const Matrix d = psd_factor(diag({4, 9}));
    EXPECT_LE((d * d.transpose() - diag({4, 9}).matrix()).norm(), 1e-13);
}

TEST(PsdFactor, WishartReconstruction)
{
    std::mt19937_64 rng(31);
    for (Index rank : {2, 5, 12}) {
        const auto a = fixture::random_psd(rng, 5, rank);
        const Matrix l = psd_factor(a);
        EXPECT_LE((l * l.transpose() - a.matrix()).norm(), 1e-8 * (1.0 + a.matrix().norm()));
    }
}

TEST(PsdFactor, RejectsIndefinite)
{
    EXPECT_THROW(psd_factor(diag({1, -1})), NotPSD);
    EXPECT_NO_THROW(psd_factor(diag({1, -1e-12})));
}
