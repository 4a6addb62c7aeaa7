#pragma once

#include <mgqda/linalg.hpp>
#include <mgqda/stats.hpp>

#include <random>
#include <vector>

namespace mgqda::fixture {

inline Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols)
{
    std::normal_distribution<double> z;
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = z(rng);
    }
    return m;
}

// Random PSD matrix of the given rank (Wishart-like).
inline SymMatrix random_psd(std::mt19937_64& rng, Index dim, Index rank)
{
    const Matrix f = gaussian(rng, dim, rank);
    return SymMatrix(f * f.transpose());
}

// Groups with the given counts; group g is shifted by `shift * g` in a random direction.
inline Dataset random_dataset(std::mt19937_64& rng, const std::vector<Index>& counts, Index p, double shift = 1.0)
{
    Index n = 0;
    for (auto c : counts) n += c;
    Matrix x = gaussian(rng, n, p);
    std::vector<int> group;
    Index at = 0;
    for (std::size_t g = 0; g < counts.size(); ++g) {
        const Vector mu = shift * gaussian(rng, p, 1).col(0);
        for (Index i = 0; i < counts[g]; ++i) {
            x.row(at + i) += mu.transpose();
            group.push_back(static_cast<int>(g));
        }
        at += counts[g];
    }
    return make_dataset(std::move(x), std::move(group));
}

} // namespace mgqda::fixture
