#pragma once

#include <mgqda/stats.hpp>

#include <vector>

namespace mgqda {

/*
 * Diagonal LDA reference classifier:
 *   argmin_g sum_j (x_j - mean_gj)^2 / var_j - 2 log prior_g
 * with pooled within-group variances (divisor n - G) floored at 1e-12.
 */
class DiagonalLda
{
public:
    static DiagonalLda fit(const Dataset& train);

    Vector score(const Eigen::Ref<const Vector>& x) const;
    int predict_one(const Eigen::Ref<const Vector>& x) const;
    std::vector<int> predict(const Matrix& x) const;

    const Vector& pooled_variance() const { return variance_; }

private:
    std::vector<Vector> means_;
    Vector variance_;
    Vector priors_;
};

} // namespace mgqda
