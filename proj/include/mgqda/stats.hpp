#pragma once

#include <mgqda/linalg.hpp>

#include <span>
#include <string>
#include <vector>

namespace mgqda {

/// Covariance divisor: Sample uses n_g - 1, ML uses n_g.
enum class CovMode { Sample, ML };

const char* to_string(CovMode mode);
CovMode cov_mode_from_string(const std::string& s);

/*
 * Labeled observations. Rows of `x` are observations; `group` holds
 * 0-based group indices in [0, g_count). Group order is the ascending
 * index order, which fixes the column order of the gamma factor.
 */
struct Dataset
{
    Matrix x;
    std::vector<int> group;
    int g_count = 0;
    std::vector<std::string> feature_names;

    Index n() const { return x.rows(); }
    Index p() const { return x.cols(); }

    /// Rows `rows` of this dataset, same g_count and feature names.
    Dataset subset(std::span<const int> rows) const;
};

/// Builds a Dataset with g_count inferred as max(group) + 1.
Dataset make_dataset(Matrix x, std::vector<int> group, std::vector<std::string> feature_names = {});

struct GroupStats
{
    int g_count = 0;
    Index n = 0;
    Index p = 0;
    CovMode cov_mode = CovMode::ML;
    std::vector<Index> counts;
    Vector priors;
    std::vector<Vector> means;
    Vector grand_mean;
    std::vector<SymMatrix> covariances;
    SymMatrix between;   // sum_g (n_g/n) (mean_g - grand)(mean_g - grand)^T
    Matrix gamma;        // p x (G-1), gamma * gamma^T == between
};

/*
 * Per-group counts, means and covariances plus the between-group
 * covariance and its gamma factor.
 *
 * Throws InvalidInput for non-finite features, bad labels or G < 2, and
 * InsufficientGroupSize when some group has fewer than two rows.
 */
GroupStats compute_group_stats(const Dataset& data, CovMode cov_mode = CovMode::ML);

/*
 * Gamma factor with columns
 *   gamma_r = sqrt(n_{r+1}) * sum_{i<=r} n_i (mean_i - mean_{r+1})
 *             / sqrt(n * N_r * N_{r+1}),   N_r = n_1 + ... + n_r,
 * for r = 1..G-1 (1-based), so that gamma * gamma^T equals the
 * count-weighted between-group covariance.
 */
Matrix compute_gamma(std::span<const Index> counts, std::span<const Vector> means);

/// M_g = Sigma_g + gamma * gamma^T for every group.
std::vector<SymMatrix> gram_products(const GroupStats& stats);

} // namespace mgqda
