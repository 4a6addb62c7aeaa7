#include <mgqda/simgen.hpp>

#include <mgqda/baseline.hpp>
#include <mgqda/error.hpp>
#include <mgqda/parallel.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

namespace mgqda {

namespace {

constexpr Index kMinDimension = 50;

void check_block(Index b, Index p, double rho)
{
    if (b < 1 || b > p) throw InvalidInput("covariance block size must lie in [1, p]");
    if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidInput("covariance rho must lie in [0, 1]");
}

Vector normalized(const Vector& q, Index p)
{
    if (q.size() != p) throw InvalidInput("spike vector length must equal p");
    const double norm = q.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidInput("spike vector must be nonzero and finite");
    return q / norm;
}

Matrix covariance_matrix(const BlockEquicorrelation& f, Index p)
{
    check_block(f.b, p, f.rho);
    Matrix m = Matrix::Identity(p, p);
    m.topLeftCorner(f.b, f.b) = f.rho * Matrix::Identity(f.b, f.b) + (1.0 - f.rho) * Matrix::Ones(f.b, f.b);
    return m;
}

Matrix covariance_matrix(const BlockAutocorrelation& f, Index p)
{
    check_block(f.b, p, f.rho);
    Matrix m = Matrix::Identity(p, p);
    for (Index i = 0; i < f.b; ++i) {
        for (Index j = 0; j < f.b; ++j) m(i, j) = std::pow(f.rho, static_cast<double>(std::abs(i - j)));
    }
    return m;
}

Matrix covariance_matrix(const Spiked& f, Index p)
{
    const Vector q1 = normalized(f.q1, p);
    const Vector q2 = normalized(f.q2, p);
    return f.a1 * q1 * q1.transpose() + f.a2 * q2 * q2.transpose() + Matrix::Identity(p, p);
}

Matrix covariance_matrix(const BlockModel& f, Index p)
{
    if (f.b < 1 || f.b > p) throw InvalidInput("covariance block size must lie in [1, p]");
    Rng rng(f.seed);
    Vector scales(f.b);
    for (Index i = 0; i < f.b; ++i) scales(i) = uniform_real(rng, 1.0, 2.0);
    const Matrix u = standard_normal_matrix(rng, f.b, f.b);
    Matrix m = Matrix::Identity(p, p);
    m.topLeftCorner(f.b, f.b) = u.transpose() * scales.asDiagonal() * u;
    return m;
}

Vector block_vector(Index p, std::initializer_list<std::pair<Index, double>> runs)
{
    // consecutive runs of (length, value) from index 0; the rest stays zero
    Vector v = Vector::Zero(p);
    Index at = 0;
    for (const auto& [len, value] : runs) {
        v.segment(at, len).setConstant(value);
        at += len;
    }
    return v;
}

std::vector<Vector> shifted_unit_means(int g_count, Index p, double level)
{
    // group g has `level` on features [10g, 10g + 10)
    std::vector<Vector> means;
    for (int g = 0; g < g_count; ++g) {
        Vector m = Vector::Zero(p);
        m.segment(10 * g, 10).setConstant(level);
        means.push_back(std::move(m));
    }
    return means;
}

Support true_support(const std::vector<Vector>& means, const std::vector<SymMatrix>& covs, Index p)
{
    const auto g_count = means.size();
    Support s;
    s.per_group.resize(g_count);
    std::vector<char> any(static_cast<std::size_t>(p), 0);
    for (std::size_t g = 0; g < g_count; ++g) {
        for (Index j = 0; j < p; ++j) {
            bool active = false;
            for (std::size_t h = 0; h < g_count && !active; ++h) active = means[g](j) != means[h](j);
            if (!active) {
                for (Index i = 0; i < p && !active; ++i) active = covs[g](j, i) != (i == j ? 1.0 : 0.0);
            }
            if (active) {
                s.per_group[g].push_back(static_cast<int>(j));
                any[static_cast<std::size_t>(j)] = 1;
            }
        }
    }
    for (Index j = 0; j < p; ++j) {
        if (any[static_cast<std::size_t>(j)]) s.overall.push_back(static_cast<int>(j));
    }
    return s;
}

std::string rate(const std::optional<double>& v)
{
    return v ? fmt::format("{}", *v) : std::string("NA");
}

} // namespace

SymMatrix make_covariance(const CovarianceFamily& family, Index p)
{
    if (p < 1) throw InvalidInput("covariance dimension must be positive");
    SymMatrix out(std::visit([p](const auto& f) { return covariance_matrix(f, p); }, family));
    const auto eig = sym_eigen(out);
    const double top = std::max(eig.values(0), 0.0);
    if (eig.values(eig.values.size() - 1) < -1e-8 * top) {
        throw ConstructionError("covariance family produced a matrix that is not PSD");
    }
    return out;
}

Spiked linear_spikes(Index b, Index p, double a1, double a2)
{
    Spiked s{Vector::Zero(p), Vector::Zero(p), a1, a2};
    for (Index i = 0; i < b; ++i) {
        s.q1(i) = static_cast<double>(i + 1);
        s.q2(i) = static_cast<double>(b - i);
    }
    return s;
}

Spiked sqrt_spikes(Index b, Index p, double a1, double a2)
{
    Spiked s{Vector::Zero(p), Vector::Zero(p), a1, a2};
    for (Index i = 0; i < b; ++i) {
        s.q1(i) = std::sqrt(static_cast<double>(i + 1));
        s.q2(i) = std::sqrt(static_cast<double>(b - i));
    }
    return s;
}

ModelDesign model_spec(int model_id, Index p, std::uint64_t block_seed)
{
    if (model_id < 1 || model_id > 8) throw InvalidInput("model id must lie in 1..8");
    if (p < kMinDimension) throw InvalidInput("benchmark models need p >= 50");

    ModelDesign d;
    d.model_id = model_id;
    d.g_count = model_id <= 5 ? 3 : 5;
    d.block_size = model_id <= 4 ? 30 : 50;
    const Index b = d.block_size;
    auto block_model = [&](int group) {
        return BlockModel{b, stream_seed(block_seed, 0, static_cast<std::uint64_t>(group), StreamPurpose::Covariance)};
    };

    std::vector<CovarianceFamily> families;
    switch (model_id) {
    case 1:
    case 2: {
        const double m = model_id == 1 ? 1.0 : 0.5;
        d.means = {Vector::Zero(p), block_vector(p, {{10, m}, {10, -m}}), block_vector(p, {{10, -m}, {10, m}})};
        families = {BlockEquicorrelation{b, 0.8}, BlockAutocorrelation{b, 0.8}, linear_spikes(b, p, 100.0, 10.0)};
        break;
    }
    case 3:
        d.means = {Vector::Zero(p), block_vector(p, {{10, 1.0}, {10, -1.0}}), block_vector(p, {{10, -1.0}, {10, 1.0}})};
        families = {BlockEquicorrelation{b, 0.3}, BlockAutocorrelation{b, 0.7}, block_model(2)};
        break;
    case 4:
        d.means = shifted_unit_means(3, p, 1.0);
        families = {BlockEquicorrelation{b, 0.3}, BlockAutocorrelation{b, 0.7}, sqrt_spikes(b, p, 30.0, 5.0)};
        break;
    case 5: {
        const double rho0 = 0.8;
        d.means = shifted_unit_means(3, p, 1.0);
        families = {BlockAutocorrelation{b, rho0}, BlockAutocorrelation{b, 0.7 * rho0}, BlockAutocorrelation{b, 0.3 * rho0}};
        break;
    }
    default: {
        families = {BlockEquicorrelation{b, 0.5}, BlockAutocorrelation{b, 0.5}, linear_spikes(b, p, 100.0, 10.0),
                    linear_spikes(b, p, 10.0, 100.0), block_model(4)};
        if (model_id == 6 || model_id == 7) {
            d.means = shifted_unit_means(5, p, model_id == 6 ? 1.0 : 0.5);
        } else {
            d.means = {Vector::Zero(p), block_vector(p, {{20, 1.0}}), block_vector(p, {{10, 0.2}, {10, -0.2}}),
                       block_vector(p, {{20, 0.0}, {2, 5.0}}), block_vector(p, {{25, 0.0}, {1, -10.0}, {1, 10.0}})};
        }
        break;
    }
    }

    for (const auto& f : families) d.covariances.push_back(make_covariance(f, p));
    d.truth = true_support(d.means, d.covariances, p);
    return d;
}

void SimulationSpec::validate() const
{
    if (model_id < 1 || model_id > 8) throw InvalidInput("model id must lie in 1..8");
    if (p < kMinDimension) throw InvalidInput("benchmark models need p >= 50");
    if (n_per_group < 2) throw InvalidInput("need at least 2 training rows per group");
    if (n_test < 0) throw InvalidInput("test size must be non-negative");
    if (reps < 1) throw InvalidInput("need at least one replication");
}

Matrix sample_mvn(const Vector& mean, const Matrix& factor, Index n, Rng& rng)
{
    if (factor.rows() != mean.size()) throw InvalidInput("sample_mvn: factor does not match the mean");
    const Matrix z = standard_normal_matrix(rng, n, factor.cols());
    Matrix x = z * factor.transpose();
    x.rowwise() += mean.transpose();
    return x;
}

Replication sample(const SimulationSpec& spec, int rep)
{
    spec.validate();
    const auto r = static_cast<std::uint64_t>(rep);
    Replication out;
    out.design = model_spec(spec.model_id, spec.p, stream_seed(spec.seed, r, 0, StreamPurpose::Covariance));
    const int g_count = out.design.g_count;

    std::vector<Index> test_counts(static_cast<std::size_t>(g_count), spec.n_test / g_count);
    for (Index k = 0; k < spec.n_test % g_count; ++k) ++test_counts[static_cast<std::size_t>(k)];

    const Index n_train = spec.n_per_group * g_count;
    out.train.x.resize(n_train, spec.p);
    out.test.x.resize(spec.n_test, spec.p);
    Index train_at = 0;
    Index test_at = 0;
    for (int g = 0; g < g_count; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        const Matrix factor = psd_factor(out.design.covariances[gi]);
        auto train_rng = make_stream(spec.seed, r, gi, StreamPurpose::Train);
        auto test_rng = make_stream(spec.seed, r, gi, StreamPurpose::Test);
        out.train.x.middleRows(train_at, spec.n_per_group) = sample_mvn(out.design.means[gi], factor, spec.n_per_group, train_rng);
        out.test.x.middleRows(test_at, test_counts[gi]) = sample_mvn(out.design.means[gi], factor, test_counts[gi], test_rng);
        out.train.group.insert(out.train.group.end(), static_cast<std::size_t>(spec.n_per_group), g);
        out.test.group.insert(out.test.group.end(), static_cast<std::size_t>(test_counts[gi]), g);
        train_at += spec.n_per_group;
        test_at += test_counts[gi];
    }
    out.train.g_count = g_count;
    out.test.g_count = g_count;
    return out;
}

void selection_rates(const Support& estimated, const Support& truth, Index p, Metrics& out)
{
    auto rates = [p](const std::vector<int>& est, const std::vector<int>& tru,
                     std::optional<double>& tpr, std::optional<double>& fpr) {
        std::vector<char> in_truth(static_cast<std::size_t>(p), 0);
        for (int j : tru) in_truth[static_cast<std::size_t>(j)] = 1;
        std::size_t hits = 0;
        for (int j : est) hits += in_truth[static_cast<std::size_t>(j)];
        const auto n_true = tru.size();
        const auto n_false = static_cast<std::size_t>(p) - n_true;
        tpr = n_true ? std::optional<double>(static_cast<double>(hits) / static_cast<double>(n_true)) : std::nullopt;
        fpr = n_false ? std::optional<double>(static_cast<double>(est.size() - hits) / static_cast<double>(n_false))
                      : std::nullopt;
    };
    rates(estimated.overall, truth.overall, out.tpr, out.fpr);
    const auto g_count = truth.per_group.size();
    out.tpr_g.assign(g_count, std::nullopt);
    out.fpr_g.assign(g_count, std::nullopt);
    for (std::size_t g = 0; g < g_count; ++g) {
        static const std::vector<int> none;
        const auto& est = g < estimated.per_group.size() ? estimated.per_group[g] : none;
        rates(est, truth.per_group[g], out.tpr_g[g], out.fpr_g[g]);
    }
}

Metrics evaluate(const FittedModel& model, const Dataset& test, const Support& truth)
{
    Metrics m;
    const auto predicted = model.predict(test.x);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) wrong += predicted[i] != test.group[i];
    m.error_rate = predicted.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(predicted.size());

    Support estimated{model.parts().support, model.parts().group_supports};
    if (estimated.per_group.empty()) estimated.per_group.resize(static_cast<std::size_t>(model.g_count()));
    selection_rates(estimated, truth, model.p_full(), m);
    return m;
}

std::vector<BenchmarkRow> run_benchmark(const SimulationSpec& spec, const BenchmarkOptions& options)
{
    spec.validate();
    options.cv.validate();
    const int g_count = spec.model_id <= 5 ? 3 : 5;
    std::vector<BenchmarkRow> rows(static_cast<std::size_t>(spec.reps));

    parallel_for(rows.size(), options.threads, [&](std::size_t k) {
        BenchmarkRow& row = rows[k];
        row.rep = static_cast<int>(k);
        row.seed = spec.seed;
        row.model_id = spec.model_id;
        row.p = spec.p;
        row.g_count = g_count;
        row.alpha = options.cv.alpha;
        try {
            const auto data = sample(spec, row.rep);
            const auto start = std::chrono::steady_clock::now();
            std::optional<FittedModel> model;
            if (options.lambda) {
                const auto stats = compute_group_stats(data.train, options.cv.cov_mode);
                PenaltySpec pen;
                pen.lambda = *options.lambda;
                pen.alpha = options.cv.alpha;
                pen.tol = options.cv.tol;
                pen.max_sweeps = options.cv.max_sweeps;
                const auto result = fit(stats, pen);
                model.emplace(build_model(result.omega, stats, pen));
                row.lambda = pen.lambda;
            } else {
                CvConfig cfg = options.cv;
                cfg.seed = stream_seed(spec.seed, k, 0, StreamPurpose::CvFolds);
                auto cv = cross_validate(data.train, cfg, 1);
                row.lambda = cv.penalty.lambda;
                model = std::move(cv.model);
            }
            row.fit_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            row.metrics = evaluate(*model, data.test, data.design.truth);
            if (options.baseline) {
                const auto base = DiagonalLda::fit(data.train);
                const auto predicted = base.predict(data.test.x);
                std::size_t wrong = 0;
                for (std::size_t i = 0; i < predicted.size(); ++i) wrong += predicted[i] != data.test.group[i];
                row.baseline_error = predicted.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(predicted.size());
            }
        } catch (const std::exception&) {
            row.status = "error";
        }
    });
    return rows;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows, int g_count,
                         bool baseline, bool timing)
{
    out << "rep,seed,model_id,p,lambda,alpha,error_rate,tpr,fpr";
    for (int g = 1; g <= g_count; ++g) out << ",tpr_g" << g;
    for (int g = 1; g <= g_count; ++g) out << ",fpr_g" << g;
    out << ",fit_ms,status";
    if (baseline) out << ",baseline_error";
    out << '\n';

    for (const auto& row : rows) {
        const bool ok = row.status == "ok";
        out << fmt::format("{},{},{},{},{},{}", row.rep, row.seed, row.model_id, row.p, row.lambda, row.alpha);
        if (ok) {
            out << fmt::format(",{},{},{}", row.metrics.error_rate, rate(row.metrics.tpr), rate(row.metrics.fpr));
        } else {
            out << ",NA,NA,NA";
        }
        for (int g = 0; g < g_count; ++g) {
            const auto gi = static_cast<std::size_t>(g);
            out << ',' << (ok && gi < row.metrics.tpr_g.size() ? rate(row.metrics.tpr_g[gi]) : "NA");
        }
        for (int g = 0; g < g_count; ++g) {
            const auto gi = static_cast<std::size_t>(g);
            out << ',' << (ok && gi < row.metrics.fpr_g.size() ? rate(row.metrics.fpr_g[gi]) : "NA");
        }
        out << ',' << (timing ? fmt::format("{:.3f}", row.fit_ms) : std::string()) << ',' << row.status;
        if (baseline) out << ',' << (row.baseline_error ? fmt::format("{}", *row.baseline_error) : std::string("NA"));
        out << '\n';
    }
}

} // namespace mgqda
