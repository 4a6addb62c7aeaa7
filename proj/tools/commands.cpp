#include "commands.hpp"

#include <mgqda/baseline.hpp>
#include <mgqda/csv.hpp>
#include <mgqda/cv.hpp>
#include <mgqda/error.hpp>
#include <mgqda/model_io.hpp>
#include <mgqda/parallel.hpp>
#include <mgqda/rng.hpp>
#include <mgqda/simgen.hpp>
#include <mgqda/solver.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mgqda::cli {

namespace {

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw Error("write to '" + path + "' failed");
}

void print_support(const FittedModel& model)
{
    const auto& parts = model.parts();
    std::cerr << fmt::format("selected features: {} of {}\n", parts.support.size(), parts.p_full);
    for (int g = 0; g < parts.g_count; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        const auto size = gi < parts.group_supports.size() ? parts.group_supports[gi].size() : 0;
        std::cerr << fmt::format("  group {}: {}\n", parts.labels[gi], size);
    }
    if (model.prior_only()) {
        std::cerr << "warning: no feature selected (lambda at or above lambda_max); predictions use the priors only\n";
    }
}

LabeledData load_training(const std::string& path, const std::string& label_col,
                          const std::vector<std::string>& features)
{
    return dataset_from_csv(read_csv(path), label_col, features);
}

std::optional<double> median(std::vector<double> v)
{
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const auto h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string show(const std::optional<double>& v)
{
    return v ? fmt::format("{:.4f}", *v) : std::string("NA");
}

} // namespace

int run_fit(const FitArgs& args)
{
    const auto input = load_training(args.train, args.label_col, args.features);
    const auto stats = compute_group_stats(input.data, cov_mode_from_string(args.cov_mode));

    PenaltySpec pen;
    pen.lambda = args.lambda;
    pen.alpha = args.alpha;
    pen.tol = args.tol;
    pen.max_sweeps = args.max_sweeps;
    pen.validate();

    const auto result = fit(stats, pen);
    const auto model = build_model(result.omega, stats, pen, input.labels, input.data.feature_names);
    emit(args.out, model_to_json(model));

    print_support(model);
    std::cerr << fmt::format("objective: {:.10g}\n", objective(result.omega, stats, pen));
    std::cerr << fmt::format("sweeps: {}{}\n", result.report.sweeps_used,
                             result.report.converged ? "" : " (max_sweeps reached before convergence)");
    return 0;
}

int run_cv(const CvArgs& args)
{
    const auto input = load_training(args.train, args.label_col, args.features);

    CvConfig cfg;
    cfg.folds = args.folds;
    cfg.n_lambda = args.n_lambda;
    cfg.ratio = args.ratio;
    cfg.alpha = args.alpha;
    cfg.stratified = !args.unstratified;
    cfg.seed = args.seed;
    cfg.cov_mode = cov_mode_from_string(args.cov_mode);
    cfg.tol = args.tol;
    cfg.max_sweeps = args.max_sweeps;
    cfg.validate();

    auto result = cross_validate(input.data, cfg, default_thread_count(), input.labels);
    const FittedModel& model = *result.model;
    // cross_validate labels the model but knows nothing about column names
    auto parts = model.parts();
    parts.feature_names = input.data.feature_names;
    const FittedModel named(std::move(parts));
    emit(args.out, model_to_json(named));

    if (!args.report.empty()) {
        std::ostringstream report;
        write_cv_report(report, result);
        emit(args.report, report.str());
    }

    const auto& chosen = result.path[result.selected];
    std::cerr << fmt::format("selected lambda: {:.6g} (path index {} of {}), cv error: {:.4f}\n", chosen.lambda,
                             result.selected, result.path.size(), chosen.mean_error);
    print_support(named);
    return 0;
}

int run_predict(const PredictArgs& args)
{
    const auto model = load_model(args.model);
    const auto& parts = model.parts();
    const auto x = features_for_prediction(read_csv(args.data), parts.p_full, parts.feature_names);

    std::string text = "row,predicted_label";
    if (args.scores) {
        for (const auto& label : parts.labels) text += "," + csv_field("score_" + label);
    }
    text += '\n';
    for (Index i = 0; i < x.rows(); ++i) {
        const Vector s = model.score(x.row(i).transpose());
        const auto g = static_cast<std::size_t>(argmin_first(s));
        text += fmt::format("{},{}", i + 1, csv_field(parts.labels[g]));
        if (args.scores) {
            for (Index k = 0; k < s.size(); ++k) text += fmt::format(",{:.17g}", s(k));
        }
        text += '\n';
    }
    emit(args.out, text);
    return 0;
}

int run_simulate(const SimulateArgs& args)
{
    SimulationSpec spec;
    spec.model_id = args.model_id;
    spec.p = args.p;
    spec.reps = args.reps;
    spec.seed = args.seed;
    spec.n_test = args.n_test;
    spec.n_per_group = args.n_per_group;
    spec.validate();

    BenchmarkOptions options;
    options.lambda = args.lambda;
    options.cv.alpha = args.alpha;
    options.cv.folds = args.folds;
    options.cv.n_lambda = args.n_lambda;
    options.cv.ratio = args.ratio;
    options.baseline = args.baseline;
    options.timing = args.timing;
    options.threads = default_thread_count();
    if (options.lambda) {
        PenaltySpec pen;
        pen.lambda = *options.lambda;
        pen.alpha = args.alpha;
        pen.validate();
    }

    const auto rows = run_benchmark(spec, options);
    const int g_count = model_spec(spec.model_id, spec.p).g_count;
    std::ostringstream csv;
    write_benchmark_csv(csv, rows, g_count, options.baseline, options.timing);
    emit(args.out, csv.str());

    if (!args.out.empty() && args.out != "-") {
        nlohmann::ordered_json meta;
        meta["rng"] = kRngDescription;
        meta["model"] = spec.model_id;
        meta["p"] = spec.p;
        meta["reps"] = spec.reps;
        meta["seed"] = spec.seed;
        meta["n_per_group"] = spec.n_per_group;
        meta["n_test"] = spec.n_test;
        meta["tuning"] = options.lambda ? "fixed" : "cv";
        if (options.lambda) meta["lambda"] = *options.lambda;
        meta["alpha"] = args.alpha;
        if (!options.lambda) {
            meta["folds"] = args.folds;
            meta["n_lambda"] = args.n_lambda;
            meta["ratio"] = args.ratio;
        }
        meta["baseline"] = args.baseline;
        emit(args.out + ".meta.json", meta.dump(2) + "\n");
    }

    std::vector<double> errors;
    std::vector<double> base;
    std::size_t failed = 0;
    for (const auto& row : rows) {
        if (row.status != "ok") {
            ++failed;
            continue;
        }
        errors.push_back(row.metrics.error_rate);
        if (row.baseline_error) base.push_back(*row.baseline_error);
    }
    std::cerr << fmt::format("replications: {} ok, {} failed; median error {}", errors.size(), failed,
                             show(median(errors)));
    if (args.baseline) std::cerr << fmt::format(", baseline median error {}", show(median(base)));
    std::cerr << '\n';
    return 0;
}

} // namespace mgqda::cli
