#include "commands.hpp"

#include <mgqda/error.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_fit(CLI::App& app, mgqda::cli::FitArgs& a)
{
    auto* cmd = app.add_subcommand("fit", "fit a sparse projected QDA model at one lambda");
    cmd->add_option("--train", a.train, "training CSV with a header row")->required();
    cmd->add_option("--label-col", a.label_col, "name of the label column")->required();
    cmd->add_option("--features", a.features, "feature columns to use (default: every numeric column)")
        ->delimiter(',');
    cmd->add_option("--lambda", a.lambda, "overall penalty level")->required()->check(CLI::NonNegativeNumber);
    cmd->add_option("--alpha", a.alpha, "share of the row penalty")->capture_default_str();
    cmd->add_option("--cov-mode", a.cov_mode, "covariance divisor")
        ->check(CLI::IsMember({"ml", "sample"}))
        ->capture_default_str();
    cmd->add_option("--tol", a.tol, "convergence threshold")->capture_default_str();
    cmd->add_option("--max-sweeps", a.max_sweeps, "sweep limit")->capture_default_str();
    cmd->add_option("--out", a.out, "model JSON (default stdout)");
}

void add_cv(CLI::App& app, mgqda::cli::CvArgs& a)
{
    auto* cmd = app.add_subcommand("cv", "choose lambda by K-fold cross-validation and refit");
    cmd->add_option("--train", a.train, "training CSV with a header row")->required();
    cmd->add_option("--label-col", a.label_col, "name of the label column")->required();
    cmd->add_option("--features", a.features, "feature columns to use")->delimiter(',');
    cmd->add_option("--folds", a.folds, "number of folds")->capture_default_str();
    cmd->add_option("--n-lambda", a.n_lambda, "length of the lambda path")->capture_default_str();
    cmd->add_option("--ratio", a.ratio, "smallest lambda as a fraction of lambda_max")->capture_default_str();
    cmd->add_option("--alpha", a.alpha, "share of the row penalty")->capture_default_str();
    cmd->add_option("--seed", a.seed, "fold shuffling seed")->capture_default_str();
    cmd->add_flag("--unstratified", a.unstratified, "assign folds ignoring the groups");
    cmd->add_option("--cov-mode", a.cov_mode, "covariance divisor")
        ->check(CLI::IsMember({"ml", "sample"}))
        ->capture_default_str();
    cmd->add_option("--tol", a.tol, "convergence threshold")->capture_default_str();
    cmd->add_option("--max-sweeps", a.max_sweeps, "sweep limit")->capture_default_str();
    cmd->add_option("--out", a.out, "model JSON (default stdout)");
    cmd->add_option("--report", a.report, "per-lambda CSV report");
}

void add_predict(CLI::App& app, mgqda::cli::PredictArgs& a)
{
    auto* cmd = app.add_subcommand("predict", "label rows of a CSV with a saved model");
    cmd->add_option("--model", a.model, "model JSON")->required();
    cmd->add_option("--data", a.data, "CSV with a header row")->required();
    cmd->add_flag("--scores", a.scores, "append one discriminant score column per group");
    cmd->add_option("--out", a.out, "predictions CSV (default stdout)");
}

void add_simulate(CLI::App& app, mgqda::cli::SimulateArgs& a)
{
    auto* cmd = app.add_subcommand("simulate", "run a synthetic benchmark model");
    cmd->add_option("--model", a.model_id, "benchmark model 1-8")->required();
    cmd->add_option("--p", a.p, "dimension")->capture_default_str();
    cmd->add_option("--reps", a.reps, "replications")->capture_default_str();
    cmd->add_option("--seed", a.seed, "base seed")->required();
    cmd->add_option("--n-test", a.n_test, "test rows per replication")->capture_default_str();
    cmd->add_option("--n-per-group", a.n_per_group, "training rows per group")->capture_default_str();
    auto* cv = cmd->add_flag("--cv", a.cv, "tune lambda by cross-validation (default)");
    auto* lambda = cmd->add_option("--lambda", a.lambda, "fixed lambda")->check(CLI::NonNegativeNumber);
    cv->excludes(lambda);
    cmd->add_option("--alpha", a.alpha, "share of the row penalty")->capture_default_str();
    cmd->add_option("--folds", a.folds, "cross-validation folds")->capture_default_str();
    cmd->add_option("--n-lambda", a.n_lambda, "length of the lambda path")->capture_default_str();
    cmd->add_option("--ratio", a.ratio, "smallest lambda as a fraction of lambda_max")->capture_default_str();
    cmd->add_flag("--baseline", a.baseline, "add a diagonal-LDA baseline_error column");
    cmd->add_flag("--timing", a.timing, "fill the fit_ms column (makes output run-dependent)");
    cmd->add_option("--out", a.out, "benchmark CSV (default stdout); metadata goes to <out>.meta.json");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse multi-group quadratic discriminant analysis"};
    app.set_config("--config", "", "TOML config file; command-line flags take precedence");
    app.require_subcommand(1);

    mgqda::cli::FitArgs fit;
    mgqda::cli::CvArgs cv;
    mgqda::cli::PredictArgs predict;
    mgqda::cli::SimulateArgs simulate;
    add_fit(app, fit);
    add_cv(app, cv);
    add_predict(app, predict);
    add_simulate(app, simulate);

    try {
        app.parse(argc, argv);
        if (app.got_subcommand("fit")) return mgqda::cli::run_fit(fit);
        if (app.got_subcommand("cv")) return mgqda::cli::run_cv(cv);
        if (app.got_subcommand("predict")) return mgqda::cli::run_predict(predict);
        return mgqda::cli::run_simulate(simulate);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const mgqda::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const mgqda::InsufficientGroupSize& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const mgqda::NotPSD& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
