#pragma once

#include <mgqda/linalg.hpp>
#include <mgqda/stats.hpp>

#include <optional>
#include <vector>

namespace mgqda {

/*
 * Penalty and stopping parameters of the sparse basis problem
 *
 *   1/2 sum_g { tr(W_g^T S_g W_g) + ||Gamma^T W_g - I||_F^2 }
 *     + alpha * lambda * sum_j ||w_j||
 *     + (1 - alpha) / sqrt(G) * lambda * sum_{j,g} ||w_jg||
 *
 * where W_g is group g's p x (G-1) column block, w_j row j and w_jg the
 * (G-1)-vector where they meet.
 */
struct PenaltySpec
{
    double lambda = 0.0;
    double alpha = 0.5;
    double tol = 1e-6;         // max block l2 change per sweep
    int max_sweeps = 1000;
    double root_tol = 1e-10;   // |f(x)| for the scalar block equation

    /// Throws InvalidInput when any field is out of range.
    void validate() const;

    /// Weight of the per-block norm: (1 - alpha) * lambda / sqrt(G).
    double block_weight(int g_count) const;
    /// Weight of the row norm: alpha * lambda.
    double row_weight() const { return alpha * lambda; }
};

/*
 * p x G(G-1) coefficient matrix. Columns [g(G-1), (g+1)(G-1)) hold group
 * g's basis (0-based g), so block (j, g) is a length G-1 piece of row j.
 */
class Coefficients
{
public:
    Coefficients() = default;
    Coefficients(Index p, int g_count);
    Coefficients(Matrix omega, int g_count);

    Index p() const { return omega_.rows(); }
    int g_count() const { return g_count_; }
    Index block_width() const { return g_count_ - 1; }

    const Matrix& matrix() const { return omega_; }
    Matrix& matrix() { return omega_; }

    auto block(Index j, int g) { return omega_.row(j).segment(g * block_width(), block_width()); }
    auto block(Index j, int g) const { return omega_.row(j).segment(g * block_width(), block_width()); }

    /// Columns of group g: the p x (G-1) basis for that group.
    auto group_block(int g) const { return omega_.middleCols(g * block_width(), block_width()); }

private:
    Matrix omega_;
    int g_count_ = 0;
};

struct Support
{
    std::vector<int> overall;                 // S: union of group supports, ascending
    std::vector<std::vector<int>> per_group;  // S_g, ascending
};

struct SolveReport
{
    std::vector<double> objective_trace;  // one value per completed sweep
    int sweeps_used = 0;
    bool converged = false;
    double kkt_residual = 0.0;
    Support support;
    std::vector<int> degenerate_features;  // features with a <= 0 in some group, forced to zero
};

struct FitResult
{
    Coefficients omega;
    SolveReport report;
};

/// Full penalized objective. Throws InvalidInput on dimension mismatch.
double objective(const Coefficients& omega, const GroupStats& stats, const PenaltySpec& pen);

/*
 * Partial gradient pieces of the smooth part excluding block (j, g) itself:
 *   v_jg = sum_{i != j} (S_g + Gamma Gamma^T)_{ji} w_ig - Gamma_j.
 * Computed from scratch in O(p G); the solver keeps a cached version.
 */
Vector block_gradient_v(Index j, int g, const Coefficients& omega, const GroupStats& stats);

/*
 * Norm x of the minimizer of the one-block problem
 *   a/2 x^2 - c x + alpha*lambda*sqrt(b^2 + x^2) + beta*lambda*x,   beta = (1-alpha)/sqrt(G).
 * For b > 0: 0 when c <= beta*lambda, else the root of
 *   a x + alpha*lambda x / sqrt(b^2 + x^2) + beta*lambda = c
 * in [0, (c - beta*lambda)/a], by Newton with bisection fallback.
 * For b == 0: 0 when c <= (alpha + beta)*lambda, else (c - (alpha+beta)*lambda)/a.
 * Requires a > 0.
 */
double solve_block_norm(double a, double b, double c, double alpha, double lambda, int g_count,
                        double root_tol = 1e-10);

/// New value of block (j, g) with every other block held fixed.
Vector block_update(Index j, int g, const Coefficients& omega, const GroupStats& stats,
                    const PenaltySpec& pen);

/*
 * Cyclic block-coordinate descent (row-major over j, then g). Converged
 * means the largest block change of a sweep is <= tol and the KKT residual
 * is <= tol as well. Starts from
 * `init` when given, else from zero. A currently-zero row whose joint
 * subgradient condition fails is first moved to its exact row minimizer,
 * so zero rows are never stuck at a non-stationary point.
 */
FitResult fit(const GroupStats& stats, const PenaltySpec& pen,
              const std::optional<Coefficients>& init = std::nullopt);

/// Precomputed M_g = S_g + Gamma Gamma^T, reusable across many fits on the same stats.
FitResult fit(const GroupStats& stats, const std::vector<SymMatrix>& gram, const PenaltySpec& pen,
              const std::optional<Coefficients>& init = std::nullopt);

/*
 * Smallest lambda at which zero is the minimizer: sqrt(G) * max_j ||Gamma_j||,
 * for every alpha in (0, 1], raised by a relative 1e-12 so a fit at exactly
 * this value is zero despite rounding.
 */
double lambda_max(const GroupStats& stats, double alpha);

/// Geometric grid from lambda_max down to lambda_max * ratio; {0} when lambda_max is 0.
std::vector<double> lambda_path(const GroupStats& stats, double alpha, int n_lambda = 30,
                                double ratio = 0.01);

/// S_g = {j : ||w_jg|| > zero_tol}, S = union of S_g.
Support extract_support(const Coefficients& omega, double zero_tol = 0.0);

/*
 * Largest stationarity violation over all blocks: residual norm for
 * nonzero blocks, excess of the dual-norm bound for zero blocks and for
 * rows that are entirely zero.
 */
double kkt_residual(const Coefficients& omega, const GroupStats& stats, const PenaltySpec& pen);

} // namespace mgqda
