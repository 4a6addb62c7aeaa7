#pragma once

#include <mgqda/classifier.hpp>
#include <mgqda/solver.hpp>
#include <mgqda/stats.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mgqda {

struct CvConfig
{
    int folds = 5;
    int n_lambda = 30;
    double ratio = 0.01;
    double alpha = 0.5;
    bool stratified = true;
    std::uint64_t seed = 0;       // fold shuffling
    CovMode cov_mode = CovMode::ML;
    double tol = 1e-6;
    int max_sweeps = 1000;

    void validate() const;
};

struct CvPathPoint
{
    double lambda = 0.0;
    double mean_error = 0.0;
    std::vector<double> fold_errors;
    double mean_support = 0.0;  // average |S| over the fold fits
};

struct CvResult
{
    std::vector<CvPathPoint> path;  // descending lambda
    std::size_t selected = 0;
    PenaltySpec penalty;            // penalty of the refit
    FitResult refit;                // full-data fit at the selected lambda
    std::optional<FittedModel> model;
};

/*
 * Fold id per row. Stratified assignment shuffles each group with its own
 * stream and deals rows round-robin, continuing the deal across groups so
 * fold sizes differ by at most one. Throws InvalidInput when a training
 * fold would leave some group with fewer than two rows.
 */
std::vector<int> assign_folds(const Dataset& data, int folds, bool stratified, std::uint64_t seed);

/*
 * K-fold cross-validation over the lambda path of the full data. Folds fit
 * the path with warm starts; the lambda with the smallest mean validation
 * error wins, ties going to the larger lambda. The winner is refit on all
 * rows by walking the path down to it.
 */
CvResult cross_validate(const Dataset& data, const CvConfig& config, int threads = 1,
                        std::vector<std::string> labels = {});

/// CSV with columns index,lambda,mean_error,mean_support,selected.
void write_cv_report(std::ostream& out, const CvResult& result);

} // namespace mgqda
