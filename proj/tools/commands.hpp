#pragma once

#include <mgqda/stats.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mgqda::cli {

// An empty output path means stdout.

struct FitArgs
{
    std::string train;
    std::string label_col;
    std::vector<std::string> features;
    double lambda = 0.0;
    double alpha = 0.5;
    std::string cov_mode = "ml";
    double tol = 1e-6;
    int max_sweeps = 1000;
    std::string out;
};

struct CvArgs
{
    std::string train;
    std::string label_col;
    std::vector<std::string> features;
    int folds = 5;
    int n_lambda = 30;
    double ratio = 0.01;
    double alpha = 0.5;
    std::uint64_t seed = 0;
    bool unstratified = false;
    std::string cov_mode = "ml";
    double tol = 1e-6;
    int max_sweeps = 1000;
    std::string out;
    std::string report;
};

struct PredictArgs
{
    std::string model;
    std::string data;
    bool scores = false;
    std::string out;
};

struct SimulateArgs
{
    int model_id = 1;
    long p = 200;
    int reps = 1;
    std::uint64_t seed = 0;
    long n_test = 1000;
    long n_per_group = 100;
    bool cv = false;
    std::optional<double> lambda;
    double alpha = 0.5;
    int folds = 5;
    int n_lambda = 30;
    double ratio = 0.01;
    bool baseline = false;
    bool timing = false;
    std::string out;
};

int run_fit(const FitArgs& args);
int run_cv(const CvArgs& args);
int run_predict(const PredictArgs& args);
int run_simulate(const SimulateArgs& args);

} // namespace mgqda::cli
