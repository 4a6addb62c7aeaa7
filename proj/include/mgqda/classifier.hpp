#pragma once

#include <mgqda/linalg.hpp>
#include <mgqda/solver.hpp>
#include <mgqda/stats.hpp>

#include <string>
#include <vector>

namespace mgqda {

/*
 * Everything the projected quadratic rule needs, restricted to the
 * selected features S. Rows of Omega outside S are zero, so
 * Omega^T (x - mean_g) == omega_s^T (x_S - means_s[g]) exactly.
 */
struct ModelParts
{
    Index p_full = 0;
    int g_count = 0;
    std::vector<std::string> labels;           // output label of each group
    Vector priors;                             // n_g / n
    std::vector<int> support;                  // 0-based, strictly increasing
    std::vector<std::vector<int>> group_supports;
    Matrix omega_s;                            // |S| x G(G-1)
    std::vector<Vector> means_s;               // G vectors of length |S|
    std::vector<SymMatrix> cov_s;              // G matrices of dim |S|
    double alpha = 0.5;
    double lambda = 0.0;
    CovMode cov_mode = CovMode::ML;
    std::vector<std::string> feature_names;    // empty, or p_full names
};

/// Cached projected covariance A_g = omega_s^T cov_s[g] omega_s and its (pseudo)inverse.
struct ProjectedGroup
{
    SymMatrix a;
    SymMatrix a_inv;
    double log_det = 0.0;   // log det, or log pdet when singular
    Index rank = 0;
    bool invertible = false;
    Vector projected_mean;  // omega_s^T means_s[g]
};

class FittedModel
{
public:
    /// Validates `parts` (throws InvalidInput) and caches the projected groups.
    explicit FittedModel(ModelParts parts);

    const ModelParts& parts() const { return parts_; }
    const std::vector<ProjectedGroup>& projected() const { return projected_; }

    /// True when no feature was selected; every score is then -2 log prior.
    bool prior_only() const { return parts_.support.empty(); }

    Index p_full() const { return parts_.p_full; }
    int g_count() const { return parts_.g_count; }

    /*
     * Discriminant values, one per group:
     *   d^T A_g^+ d + log pdet(A_g) - 2 log prior_g,  d = omega_s^T (x_S - mean_{g,S}).
     * Throws InvalidInput when x has the wrong length or non-finite entries.
     */
    Vector score(const Eigen::Ref<const Vector>& x) const;

    /// 0-based group with the smallest score; ties go to the smaller index.
    int predict_one(const Eigen::Ref<const Vector>& x) const;

    /// One 0-based group per row of `x` (m x p_full).
    std::vector<int> predict(const Matrix& x) const;

private:
    ModelParts parts_;
    std::vector<ProjectedGroup> projected_;
};

/*
 * Restricts a fitted basis and the group statistics to the basis' support
 * and builds the classifier. An empty support yields a prior-only model.
 * `labels` defaults to "1".."G".
 */
FittedModel build_model(const Coefficients& omega, const GroupStats& stats, const PenaltySpec& pen,
                        std::vector<std::string> labels = {},
                        std::vector<std::string> feature_names = {});

/// Index of the smallest entry; ties resolve to the smaller index.
int argmin_first(const Eigen::Ref<const Vector>& scores);

/*
 * Builds classifiers from `basis` and from `basis * r` and reports whether
 * they predict the same group for every row of `points`.
 */
bool basis_invariance_check(const Coefficients& basis, const GroupStats& stats, const PenaltySpec& pen,
                            const Matrix& r, const Matrix& points);

} // namespace mgqda
