#include <mgqda/cv.hpp>

#include <mgqda/error.hpp>
#include <mgqda/parallel.hpp>
#include <mgqda/rng.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <ostream>

namespace mgqda {

namespace {

constexpr double kErrorTieTol = 1e-12;

void shuffle(std::vector<int>& v, Rng& rng)
{
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto k = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[k]);
    }
}

double error_rate(const std::vector<int>& predicted, const std::vector<int>& truth)
{
    if (truth.empty()) return 0.0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) wrong += predicted[i] != truth[i];
    return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

} // namespace

void CvConfig::validate() const
{
    if (folds < 2) throw InvalidInput("cv: folds must be >= 2");
    if (n_lambda < 2) throw InvalidInput("cv: n_lambda must be >= 2");
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("cv: ratio must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("cv: alpha must lie in (0, 1]");
    if (!(tol > 0.0) || max_sweeps < 1) throw InvalidInput("cv: invalid solver tolerances");
}

std::vector<int> assign_folds(const Dataset& data, int folds, bool stratified, std::uint64_t seed)
{
    if (folds < 2) throw InvalidInput("cv: folds must be >= 2");
    const auto n = static_cast<std::size_t>(data.n());
    std::vector<int> fold(n, 0);

    std::vector<std::vector<int>> strata;
    if (stratified) {
        strata.resize(static_cast<std::size_t>(data.g_count));
        for (std::size_t i = 0; i < n; ++i) strata[static_cast<std::size_t>(data.group[i])].push_back(static_cast<int>(i));
    } else {
        strata.emplace_back(n);
        std::iota(strata[0].begin(), strata[0].end(), 0);
    }

    std::size_t offset = 0;
    for (std::size_t s = 0; s < strata.size(); ++s) {
        auto rng = make_stream(seed, 0, s, StreamPurpose::CvFolds);
        shuffle(strata[s], rng);
        for (std::size_t k = 0; k < strata[s].size(); ++k) {
            fold[static_cast<std::size_t>(strata[s][k])] = static_cast<int>((offset + k) % static_cast<std::size_t>(folds));
        }
        offset += strata[s].size();
    }

    // every training fold must keep >= 2 rows per group
    for (int f = 0; f < folds; ++f) {
        std::vector<int> kept(static_cast<std::size_t>(data.g_count), 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (fold[i] != f) ++kept[static_cast<std::size_t>(data.group[i])];
        }
        for (int g = 0; g < data.g_count; ++g) {
            if (kept[static_cast<std::size_t>(g)] < 2) {
                throw InvalidInput(fmt::format("cv: cannot build {} folds: training fold {} keeps {} row(s) of group {}",
                                               folds, f + 1, kept[static_cast<std::size_t>(g)], g + 1));
            }
        }
    }
    return fold;
}

CvResult cross_validate(const Dataset& data, const CvConfig& config, int threads, std::vector<std::string> labels)
{
    config.validate();
    if (config.stratified) {
        std::vector<int> counts(static_cast<std::size_t>(data.g_count), 0);
        for (int g : data.group) ++counts[static_cast<std::size_t>(g)];
        const int smallest = *std::min_element(counts.begin(), counts.end());
        if (config.folds > smallest) {
            throw InvalidInput(fmt::format("cv: {} folds exceed the smallest group size {}", config.folds, smallest));
        }
    }

    const GroupStats full = compute_group_stats(data, config.cov_mode);
    const auto lambdas = lambda_path(full, config.alpha, config.n_lambda, config.ratio);
    const auto fold_of = assign_folds(data, config.folds, config.stratified, config.seed);

    PenaltySpec base;
    base.alpha = config.alpha;
    base.tol = config.tol;
    base.max_sweeps = config.max_sweeps;

    const std::size_t n_lambda = lambdas.size();
    const auto n_folds = static_cast<std::size_t>(config.folds);
    std::vector<std::vector<double>> errors(n_folds, std::vector<double>(n_lambda, 0.0));
    std::vector<std::vector<double>> sizes(n_folds, std::vector<double>(n_lambda, 0.0));

    parallel_for(n_folds, threads, [&](std::size_t f) {
        std::vector<int> train_rows;
        std::vector<int> valid_rows;
        for (std::size_t i = 0; i < fold_of.size(); ++i) {
            (static_cast<std::size_t>(fold_of[i]) == f ? valid_rows : train_rows).push_back(static_cast<int>(i));
        }
        const Dataset train = data.subset(train_rows);
        const Dataset valid = data.subset(valid_rows);
        const GroupStats stats = compute_group_stats(train, config.cov_mode);
        const auto gram = gram_products(stats);

        std::optional<Coefficients> warm;
        for (std::size_t k = 0; k < n_lambda; ++k) {
            PenaltySpec pen = base;
            pen.lambda = lambdas[k];
            auto result = fit(stats, gram, pen, warm);
            const auto model = build_model(result.omega, stats, pen);
            errors[f][k] = error_rate(model.predict(valid.x), valid.group);
            sizes[f][k] = static_cast<double>(result.report.support.overall.size());
            warm = std::move(result.omega);
        }
    });

    CvResult out;
    out.path.resize(n_lambda);
    for (std::size_t k = 0; k < n_lambda; ++k) {
        auto& pt = out.path[k];
        pt.lambda = lambdas[k];
        for (std::size_t f = 0; f < n_folds; ++f) {
            pt.fold_errors.push_back(errors[f][k]);
            pt.mean_error += errors[f][k];
            pt.mean_support += sizes[f][k];
        }
        pt.mean_error /= static_cast<double>(n_folds);
        pt.mean_support /= static_cast<double>(n_folds);
    }
    double best = out.path[0].mean_error;
    for (const auto& pt : out.path) best = std::min(best, pt.mean_error);
    for (std::size_t k = 0; k < n_lambda; ++k) {
        if (out.path[k].mean_error <= best + kErrorTieTol) {
            out.selected = k;
            break;
        }
    }

    const auto gram = gram_products(full);
    std::optional<Coefficients> warm;
    for (std::size_t k = 0; k <= out.selected; ++k) {
        PenaltySpec pen = base;
        pen.lambda = lambdas[k];
        out.refit = fit(full, gram, pen, warm);
        out.penalty = pen;
        warm = out.refit.omega;
    }
    out.model.emplace(build_model(out.refit.omega, full, out.penalty, std::move(labels), data.feature_names));
    return out;
}

void write_cv_report(std::ostream& out, const CvResult& result)
{
    out << "index,lambda,mean_error,mean_support,selected\n";
    for (std::size_t k = 0; k < result.path.size(); ++k) {
        const auto& pt = result.path[k];
        out << fmt::format("{},{:.17g},{:.17g},{:.17g},{}\n", k, pt.lambda, pt.mean_error, pt.mean_support,
                           k == result.selected ? 1 : 0);
    }
}

} // namespace mgqda
