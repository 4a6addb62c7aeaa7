#include <mgqda/classifier.hpp>
#include <mgqda/error.hpp>

#include "support.hpp"

#include <Eigen/LU>
#include <gtest/gtest.h>

#include <cmath>

using namespace mgqda;

namespace {

// Full-dimensional discriminant values with an invertible projected covariance.
Vector score_oracle(const Matrix& omega, const GroupStats& s, const Vector& x)
{
    Vector out(s.g_count);
    for (int g = 0; g < s.g_count; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        const Matrix a = omega.transpose() * s.covariances[gi].matrix() * omega;
        const auto lu = a.partialPivLu();
        const Vector d = omega.transpose() * (x - s.means[gi]);
        out(g) = d.dot(lu.solve(d)) + std::log(lu.determinant()) - 2.0 * std::log(s.priors(g));
    }
    return out;
}

GroupStats separated_stats(std::uint64_t seed, Index p, std::vector<Index> counts, double shift)
{
    std::mt19937_64 rng(seed);
    return compute_group_stats(fixture::random_dataset(rng, counts, p, shift));
}

} // namespace

TEST(BuildModel, NearestCentroidWhenEverythingIsIdentity)
{
    // two groups in two dimensions, so omega = I_2 is a square basis
    Matrix x(8, 2);
    x << 1, 0, -1, 0, 0, 1, 0, -1,    // group 0 around (0, 0)
        5, 0, 3, 0, 4, 1, 4, -1;       // group 1 around (4, 0)
    // scale so each group's ML covariance is the identity
    x *= std::sqrt(2.0);
    const auto s = compute_group_stats(make_dataset(x, {0, 0, 0, 0, 1, 1, 1, 1}));
    ASSERT_LE((s.covariances[0].matrix() - Matrix::Identity(2, 2)).norm(), 1e-12);
    ASSERT_LE((s.covariances[1].matrix() - Matrix::Identity(2, 2)).norm(), 1e-12);

    const Coefficients omega(Matrix::Identity(2, 2), 2);
    const auto model = build_model(omega, s, PenaltySpec{});
    std::mt19937_64 rng(1);
    const Matrix pts = 4.0 * fixture::gaussian(rng, 200, 2);
    for (Index i = 0; i < pts.rows(); ++i) {
        const Vector p = pts.row(i).transpose();
        const int expected = (p - s.means[0]).squaredNorm() <= (p - s.means[1]).squaredNorm() ? 0 : 1;
        EXPECT_EQ(model.predict_one(p), expected);
    }
}

TEST(BuildModel, ZeroBasisIsPriorOnly)
{
    const auto s = separated_stats(2, 4, {5, 9, 6}, 1.0);
    const auto model = build_model(Coefficients(4, 3), s, PenaltySpec{});
    EXPECT_TRUE(model.prior_only());
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const Vector x = fixture::gaussian(rng, 4, 1).col(0);
        const Vector sc = model.score(x);
        for (int g = 0; g < 3; ++g) EXPECT_DOUBLE_EQ(sc(g), -2.0 * std::log(s.priors(g)));
        EXPECT_EQ(model.predict_one(x), 1);
    }
}

TEST(Score, MatchesDefinitionOnFullRankFits)
{
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        const auto s = separated_stats(30 + rep, 7, {20, 25, 18}, 1.0);
        const auto r = fit(s, PenaltySpec{0.0, 0.5});
        const auto model = build_model(r.omega, s, PenaltySpec{});
        ASSERT_EQ(model.parts().support.size(), 7u);
        for (int t = 0; t < 20; ++t) {
            const Vector x = 2.0 * fixture::gaussian(rng, 7, 1).col(0);
            const Vector oracle = score_oracle(r.omega.matrix(), s, x);
            const Vector got = model.score(x);
            for (int g = 0; g < 3; ++g) EXPECT_NEAR(got(g), oracle(g), 1e-8 * (1.0 + std::abs(oracle(g))));
        }
    }
}

TEST(Score, QuadraticTermVanishesAtGroupMean)
{
    const auto s = separated_stats(4, 10, {15, 12, 14}, 1.5);
    const auto r = fit(s, PenaltySpec{0.3 * lambda_max(s, 0.5), 0.5});
    const auto model = build_model(r.omega, s, PenaltySpec{});
    ASSERT_FALSE(model.prior_only());
    std::mt19937_64 rng(4);
    for (int g = 0; g < 3; ++g) {
        Vector x = 100.0 * fixture::gaussian(rng, 10, 1).col(0);  // arbitrary off the support
        for (int j : model.parts().support) x(j) = s.means[static_cast<std::size_t>(g)](j);
        const auto& pg = model.projected()[static_cast<std::size_t>(g)];
        EXPECT_NEAR(model.score(x)(g), pg.log_det - 2.0 * std::log(s.priors(g)), 1e-10);
    }
}

TEST(Score, BoundaryIsBisectorForEqualCovariances)
{
    // two groups, identical within-group scatter, equal counts
    std::mt19937_64 rng(5);
    const Matrix base = fixture::gaussian(rng, 30, 3);
    Matrix x(60, 3);
    Vector shift(3);
    shift << 3, -1, 2;
    x.topRows(30) = base;
    x.bottomRows(30) = base.rowwise() + shift.transpose();
    std::vector<int> g(60, 0);
    std::fill(g.begin() + 30, g.end(), 1);
    const auto s = compute_group_stats(make_dataset(x, g));
    const auto r = fit(s, PenaltySpec{0.0, 0.5});
    const auto model = build_model(r.omega, s, PenaltySpec{});
    const Vector mid = 0.5 * (s.means[0] + s.means[1]);
    const Vector dir = s.means[1] - s.means[0];
    auto diff = [&](double t) {
        const Vector sc = model.score(mid + t * dir);
        return sc(0) - sc(1);
    };
    EXPECT_NEAR(diff(0.0), 0.0, 1e-9);
    EXPECT_LT(diff(-0.1), 0.0);
    EXPECT_GT(diff(0.1), 0.0);
}

TEST(Predict, EmptyInputAndTies)
{
    const auto s = separated_stats(6, 3, {5, 5}, 1.0);
    const auto model = build_model(Coefficients(3, 2), s, PenaltySpec{});
    EXPECT_TRUE(model.predict(Matrix(0, 3)).empty());
    // equal priors and a prior-only model: every point is a tie
    EXPECT_EQ(model.predict_one(Vector::Zero(3)), 0);
    Vector tie(3);
    tie << 1.0, 1.0, 1.5;
    EXPECT_EQ(argmin_first(tie), 0);
    tie << 2.0, 1.0, 1.0;
    EXPECT_EQ(argmin_first(tie), 1);
}

TEST(Predict, WellSeparatedTrainingPoints)
{
    std::mt19937_64 rng(7);
    Matrix x = fixture::gaussian(rng, 80, 5);
    std::vector<int> g(80, 0);
    for (Index i = 0; i < 80; ++i) {
        const bool second = i >= 40;
        g[static_cast<std::size_t>(i)] = second;
        x.row(i).array() += second ? 10.0 : -10.0;
    }
    const auto s = compute_group_stats(make_dataset(x, g));
    const auto r = fit(s, PenaltySpec{0.1 * lambda_max(s, 0.5), 0.5});
    const auto model = build_model(r.omega, s, PenaltySpec{});
    EXPECT_EQ(model.predict(x), g);
}

TEST(Predict, RejectsBadInput)
{
    const auto s = separated_stats(8, 3, {5, 5}, 1.0);
    const auto model = build_model(Coefficients(Matrix::Identity(3, 2).eval(), 2), s, PenaltySpec{});
    EXPECT_THROW(model.score(Vector::Zero(4)), InvalidInput);
    Vector nan = Vector::Zero(3);
    nan(1) = std::nan("");
    EXPECT_THROW(model.score(nan), InvalidInput);
    EXPECT_THROW(model.predict(Matrix::Zero(2, 4)), InvalidInput);
}

TEST(ProjectedGroup, PseudoInverseIdentitiesWhenSingular)
{
    // p < G(G-1): every projected covariance is rank deficient
    const auto s = separated_stats(9, 3, {6, 7, 8, 6}, 1.0);
    const auto r = fit(s, PenaltySpec{0.0, 0.5});
    const auto model = build_model(r.omega, s, PenaltySpec{});
    for (const auto& pg : model.projected()) {
        EXPECT_FALSE(pg.invertible);
        const Matrix& a = pg.a.matrix();
        const Matrix& p = pg.a_inv.matrix();
        EXPECT_LE((a * p * a - a).norm(), 1e-8 * a.norm());
        EXPECT_LE((p * a * p - p).norm(), 1e-8 * p.norm());
    }
    std::mt19937_64 rng(9);
    const Matrix pts = fixture::gaussian(rng, 50, 3);
    EXPECT_NO_THROW(model.predict(pts));
}

TEST(Invariance, IdentityAndPermutation)
{
    const auto s = separated_stats(10, 8, {20, 22, 19}, 1.0);
    const auto r = fit(s, PenaltySpec{0.0, 0.5});
    std::mt19937_64 rng(10);
    const Matrix pts = 3.0 * fixture::gaussian(rng, 300, 8);
    EXPECT_TRUE(basis_invariance_check(r.omega, s, PenaltySpec{}, Matrix::Identity(6, 6), pts));
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(6);
    perm.indices() << 4, 2, 0, 5, 1, 3;
    EXPECT_TRUE(basis_invariance_check(r.omega, s, PenaltySpec{}, Matrix(perm), pts));
}

TEST(Invariance, RandomWellConditionedTransform)
{
    const auto s = separated_stats(11, 12, {30, 25, 35}, 1.0);
    const auto r = fit(s, PenaltySpec{0.0, 0.5});
    std::mt19937_64 rng(11);
    const Matrix pts = 3.0 * fixture::gaussian(rng, 1000, 12);
    const Matrix rot = Matrix::Identity(6, 6) + 0.2 * fixture::gaussian(rng, 6, 6);
    EXPECT_TRUE(basis_invariance_check(r.omega, s, PenaltySpec{}, rot, pts));
    EXPECT_THROW(basis_invariance_check(r.omega, s, PenaltySpec{}, Matrix::Identity(5, 5), pts), InvalidInput);
}

TEST(Priors, LargerGroupClaimsMorePoints)
{
    const auto s = separated_stats(12, 5, {20, 20, 20}, 1.0);
    const auto r = fit(s, PenaltySpec{0.2 * lambda_max(s, 0.5), 0.5});
    const auto model = build_model(r.omega, s, PenaltySpec{});
    auto parts = model.parts();
    parts.priors << 0.5, 0.25, 0.25;
    const FittedModel boosted(parts);
    std::mt19937_64 rng(12);
    const Matrix pts = 2.0 * fixture::gaussian(rng, 500, 5);
    const auto before = model.predict(pts);
    const auto after = boosted.predict(pts);
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (before[i] == 0) EXPECT_EQ(after[i], 0);
    }
}

TEST(FittedModel, ValidatesParts)
{
    const auto s = separated_stats(13, 4, {6, 6}, 1.0);
    const auto model = build_model(Coefficients(Matrix::Identity(4, 2).eval(), 2), s, PenaltySpec{});
    auto bad = model.parts();
    bad.support = {2, 1};
    EXPECT_THROW(FittedModel{bad}, InvalidInput);
    bad = model.parts();
    bad.labels.pop_back();
    EXPECT_THROW(FittedModel{bad}, InvalidInput);
    bad = model.parts();
    bad.priors(0) = 0.0;
    EXPECT_THROW(FittedModel{bad}, InvalidInput);
}
