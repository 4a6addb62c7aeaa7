#include <mgqda/stats.hpp>

#include <mgqda/error.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace mgqda {

const char* to_string(CovMode mode)
{
    return mode == CovMode::Sample ? "sample" : "ml";
}

CovMode cov_mode_from_string(const std::string& s)
{
    if (s == "sample") return CovMode::Sample;
    if (s == "ml") return CovMode::ML;
    throw InvalidInput("unknown covariance mode '" + s + "' (expected sample|ml)");
}

Dataset Dataset::subset(std::span<const int> rows) const
{
    Dataset out;
    out.x.resize(static_cast<Index>(rows.size()), p());
    out.group.reserve(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.x.row(static_cast<Index>(k)) = x.row(rows[k]);
        out.group.push_back(group[static_cast<std::size_t>(rows[k])]);
    }
    out.g_count = g_count;
    out.feature_names = feature_names;
    return out;
}

Dataset make_dataset(Matrix x, std::vector<int> group, std::vector<std::string> feature_names)
{
    Dataset out;
    out.x = std::move(x);
    out.group = std::move(group);
    out.g_count = out.group.empty() ? 0 : *std::max_element(out.group.begin(), out.group.end()) + 1;
    out.feature_names = std::move(feature_names);
    return out;
}

Matrix compute_gamma(std::span<const Index> counts, std::span<const Vector> means)
{
    const auto g_count = static_cast<Index>(counts.size());
    if (g_count < 2 || means.size() != counts.size()) {
        throw InvalidInput("compute_gamma: need G >= 2 groups with one mean each");
    }
    const Index p = means[0].size();
    double n = 0.0;
    for (auto c : counts) n += static_cast<double>(c);

    Matrix gamma(p, g_count - 1);
    // weighted: running sum_{i<=r} n_i mean_i
    Vector weighted = Vector::Zero(p);
    double cum = 0.0;
    for (Index r = 0; r + 1 < g_count; ++r) {
        const double n_r = static_cast<double>(counts[static_cast<std::size_t>(r)]);
        const double n_next = static_cast<double>(counts[static_cast<std::size_t>(r + 1)]);
        weighted += n_r * means[static_cast<std::size_t>(r)];
        cum += n_r;
        const double cum_next = cum + n_next;
        const double scale = std::sqrt(n_next) / std::sqrt(n * cum * cum_next);
        gamma.col(r) = scale * (weighted - cum * means[static_cast<std::size_t>(r + 1)]);
    }
    return gamma;
}

GroupStats compute_group_stats(const Dataset& data, CovMode cov_mode)
{
    const Index n = data.n();
    const Index p = data.p();
    const int g_count = data.g_count;
    if (static_cast<Index>(data.group.size()) != n) {
        throw InvalidInput("compute_group_stats: label count does not match row count");
    }
    if (g_count < 2) {
        throw InvalidInput("compute_group_stats: need at least two groups");
    }
    if (p < 1) {
        throw InvalidInput("compute_group_stats: need at least one feature");
    }
    if (!data.x.allFinite()) {
        throw InvalidInput("compute_group_stats: non-finite feature values");
    }

    GroupStats s;
    s.g_count = g_count;
    s.n = n;
    s.p = p;
    s.cov_mode = cov_mode;
    s.counts.assign(static_cast<std::size_t>(g_count), 0);
    std::vector<std::vector<Index>> members(static_cast<std::size_t>(g_count));
    for (Index i = 0; i < n; ++i) {
        const int g = data.group[static_cast<std::size_t>(i)];
        if (g < 0 || g >= g_count) {
            throw InvalidInput("compute_group_stats: group index out of range");
        }
        members[static_cast<std::size_t>(g)].push_back(i);
    }
    for (int g = 0; g < g_count; ++g) {
        const auto count = static_cast<Index>(members[static_cast<std::size_t>(g)].size());
        if (count < 2) {
            throw InsufficientGroupSize("group " + std::to_string(g + 1) + " has "
                                        + std::to_string(count) + " observation(s); need at least 2");
        }
        s.counts[static_cast<std::size_t>(g)] = count;
    }

    s.priors.resize(g_count);
    s.grand_mean = Vector::Zero(p);
    for (int g = 0; g < g_count; ++g) {
        const auto& rows = members[static_cast<std::size_t>(g)];
        const auto n_g = static_cast<Index>(rows.size());
        Matrix xg(n_g, p);
        for (Index k = 0; k < n_g; ++k) xg.row(k) = data.x.row(rows[static_cast<std::size_t>(k)]);

        Vector mean = xg.colwise().mean();
        xg.rowwise() -= mean.transpose();
        const double divisor = cov_mode == CovMode::Sample ? static_cast<double>(n_g - 1)
                                                           : static_cast<double>(n_g);
        Matrix cov = Matrix::Zero(p, p);
        cov.selfadjointView<Eigen::Lower>().rankUpdate(xg.transpose(), 1.0 / divisor);

        s.priors(g) = static_cast<double>(n_g) / static_cast<double>(n);
        s.grand_mean += s.priors(g) * mean;
        s.means.push_back(std::move(mean));
        s.covariances.emplace_back(std::move(cov));
    }

    Matrix between = Matrix::Zero(p, p);
    for (int g = 0; g < g_count; ++g) {
        const Vector d = s.means[static_cast<std::size_t>(g)] - s.grand_mean;
        between.noalias() += s.priors(g) * d * d.transpose();
    }
    s.between = SymMatrix(std::move(between));
    s.gamma = compute_gamma(s.counts, s.means);
    return s;
}

std::vector<SymMatrix> gram_products(const GroupStats& stats)
{
    const Matrix ggt = stats.gamma * stats.gamma.transpose();
    std::vector<SymMatrix> out;
    out.reserve(stats.covariances.size());
    for (const auto& cov : stats.covariances) {
        out.emplace_back(cov.matrix() + ggt);
    }
    return out;
}

} // namespace mgqda
