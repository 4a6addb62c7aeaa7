#pragma once

#include <mgqda/classifier.hpp>
#include <mgqda/cv.hpp>
#include <mgqda/linalg.hpp>
#include <mgqda/rng.hpp>
#include <mgqda/solver.hpp>
#include <mgqda/stats.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mgqda {

/// diag{rho I_b + (1 - rho) 1 1^T, I_{p-b}}.
struct BlockEquicorrelation
{
    Index b = 0;
    double rho = 0.0;
};

/// diag{T_b, I_{p-b}} with T_ij = rho^|i-j|.
struct BlockAutocorrelation
{
    Index b = 0;
    double rho = 0.0;
};

/// a1 q1 q1^T + a2 q2 q2^T + I_p; q1 and q2 are normalized before use.
struct Spiked
{
    Vector q1;
    Vector q2;
    double a1 = 0.0;
    double a2 = 0.0;
};

/// diag{U^T L U, I_{p-b}}, U standard normal b x b, L diagonal Unif[1, 2], drawn from `seed`.
struct BlockModel
{
    Index b = 0;
    std::uint64_t seed = 0;
};

using CovarianceFamily = std::variant<BlockEquicorrelation, BlockAutocorrelation, Spiked, BlockModel>;

/// Throws InvalidInput for bad parameters and ConstructionError when the result is not PSD.
SymMatrix make_covariance(const CovarianceFamily& family, Index p);

/// q1 proportional to (1, 2, ..., b, 0, ...) and q2 to (b, ..., 1, 0, ...).
Spiked linear_spikes(Index b, Index p, double a1, double a2);
/// q1 proportional to (sqrt 1, ..., sqrt b, 0, ...) and q2 to (sqrt b, ..., sqrt 1, 0, ...).
Spiked sqrt_spikes(Index b, Index p, double a1, double a2);

/// Means, covariances and true supports of one benchmark model.
struct ModelDesign
{
    int model_id = 0;
    int g_count = 0;
    Index block_size = 0;
    std::vector<Vector> means;
    std::vector<SymMatrix> covariances;
    Support truth;
};

/*
 * Benchmark models 1-8 at dimension p >= 50. Block-model covariances
 * (models 3 and 6-8) are drawn from streams derived from `block_seed`.
 * True support S_g holds the features where group g's mean differs from
 * some other group's mean plus the features touched by a non-identity
 * part of Sigma_g.
 */
ModelDesign model_spec(int model_id, Index p, std::uint64_t block_seed = 0);

struct SimulationSpec
{
    int model_id = 1;
    Index p = 200;
    Index n_per_group = 100;
    Index n_test = 1000;
    std::uint64_t seed = 0;
    int reps = 1;

    void validate() const;
};

struct Replication
{
    ModelDesign design;
    Dataset train;
    Dataset test;
};

/// n draws of N(mean, factor factor^T) as rows.
Matrix sample_mvn(const Vector& mean, const Matrix& factor, Index n, Rng& rng);

/*
 * Training and test data of replication `rep`. Train has n_per_group rows
 * per group; the test set splits n_test as evenly as possible (earlier
 * groups take the remainder). Fully determined by (spec.seed, rep).
 */
Replication sample(const SimulationSpec& spec, int rep);

struct Metrics
{
    double error_rate = 0.0;
    std::optional<double> tpr;  // missing when |S| = 0
    std::optional<double> fpr;  // missing when |S| = p
    std::vector<std::optional<double>> tpr_g;
    std::vector<std::optional<double>> fpr_g;
};

/// Selection rates of `estimated` against `truth` over p features.
void selection_rates(const Support& estimated, const Support& truth, Index p, Metrics& out);

Metrics evaluate(const FittedModel& model, const Dataset& test, const Support& truth);

struct BenchmarkOptions
{
    std::optional<double> lambda;  // fixed lambda; cross-validation when empty
    CvConfig cv;                   // also carries alpha and solver tolerances for fixed-lambda runs
    bool baseline = false;
    bool timing = false;
    int threads = 1;
};

struct BenchmarkRow
{
    int rep = 0;
    std::uint64_t seed = 0;
    int model_id = 0;
    Index p = 0;
    int g_count = 0;
    double lambda = 0.0;
    double alpha = 0.0;
    Metrics metrics;
    double fit_ms = 0.0;
    std::string status = "ok";
    std::optional<double> baseline_error;
};

/// One row per replication, ordered by rep. Failed replications carry status "error".
std::vector<BenchmarkRow> run_benchmark(const SimulationSpec& spec, const BenchmarkOptions& options);

/*
 * Header rep,seed,model_id,p,lambda,alpha,error_rate,tpr,fpr,tpr_g1..tpr_gG,
 * fpr_g1..fpr_gG,fit_ms,status[,baseline_error]. Missing rates print as NA;
 * fit_ms is left empty unless `timing` is set so repeated runs stay identical.
 */
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows, int g_count,
                         bool baseline, bool timing);

} // namespace mgqda
