#include <mgqda/classifier.hpp>

#include <mgqda/error.hpp>

#include <cmath>
#include <string>

namespace mgqda {

namespace {

void validate_parts(const ModelParts& m)
{
    const auto g = static_cast<std::size_t>(m.g_count);
    const auto s = static_cast<Index>(m.support.size());
    const Index width = static_cast<Index>(m.g_count) * (m.g_count - 1);
    if (m.g_count < 2) throw InvalidInput("model: need at least two groups");
    if (m.p_full < 1) throw InvalidInput("model: p_full must be positive");
    if (m.labels.size() != g) throw InvalidInput("model: one label per group required");
    if (m.priors.size() != m.g_count || !(m.priors.array() > 0.0).all() || !m.priors.allFinite()) {
        throw InvalidInput("model: priors must be G positive values");
    }
    for (std::size_t k = 0; k < m.support.size(); ++k) {
        if (m.support[k] < 0 || m.support[k] >= m.p_full || (k > 0 && m.support[k] <= m.support[k - 1])) {
            throw InvalidInput("model: support must be strictly increasing indices below p_full");
        }
    }
    if (!m.group_supports.empty() && m.group_supports.size() != g) {
        throw InvalidInput("model: one group support per group required");
    }
    if (m.omega_s.rows() != s || m.omega_s.cols() != width) {
        throw InvalidInput("model: omega_s must be |S| x G(G-1)");
    }
    if (m.means_s.size() != g || m.cov_s.size() != g) {
        throw InvalidInput("model: one mean and covariance per group required");
    }
    for (std::size_t k = 0; k < g; ++k) {
        if (m.means_s[k].size() != s || m.cov_s[k].dim() != s) {
            throw InvalidInput("model: means/covariances must match the support size");
        }
    }
    if (!m.feature_names.empty() && static_cast<Index>(m.feature_names.size()) != m.p_full) {
        throw InvalidInput("model: feature_names must have p_full entries");
    }
}

} // namespace

int argmin_first(const Eigen::Ref<const Vector>& scores)
{
    int best = 0;
    for (Index g = 1; g < scores.size(); ++g) {
        if (scores(g) < scores(best)) best = static_cast<int>(g);
    }
    return best;
}

FittedModel::FittedModel(ModelParts parts)
    : parts_(std::move(parts))
{
    validate_parts(parts_);
    projected_.reserve(static_cast<std::size_t>(parts_.g_count));
    for (int g = 0; g < parts_.g_count; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        ProjectedGroup pg;
        if (!prior_only()) {
            pg.a = SymMatrix(parts_.omega_s.transpose() * parts_.cov_s[gi].matrix() * parts_.omega_s);
            auto inv = spectral_inverse(pg.a);
            pg.a_inv = std::move(inv.inverse);
            pg.log_det = inv.log_det;
            pg.rank = inv.rank;
            pg.invertible = inv.invertible;
            pg.projected_mean = parts_.omega_s.transpose() * parts_.means_s[gi];
        }
        projected_.push_back(std::move(pg));
    }
}

Vector FittedModel::score(const Eigen::Ref<const Vector>& x) const
{
    if (x.size() != parts_.p_full) {
        throw InvalidInput("score: expected " + std::to_string(parts_.p_full) + " features, got "
                           + std::to_string(x.size()));
    }
    if (!x.allFinite()) throw InvalidInput("score: non-finite feature values");

    Vector out(parts_.g_count);
    if (prior_only()) {
        for (int g = 0; g < parts_.g_count; ++g) out(g) = -2.0 * std::log(parts_.priors(g));
        return out;
    }
    const auto s = static_cast<Index>(parts_.support.size());
    Vector x_s(s);
    for (Index k = 0; k < s; ++k) x_s(k) = x(parts_.support[static_cast<std::size_t>(k)]);
    const Vector z = parts_.omega_s.transpose() * x_s;
    for (int g = 0; g < parts_.g_count; ++g) {
        const auto& pg = projected_[static_cast<std::size_t>(g)];
        const Vector d = z - pg.projected_mean;
        out(g) = d.dot(pg.a_inv.matrix() * d) + pg.log_det - 2.0 * std::log(parts_.priors(g));
    }
    return out;
}

int FittedModel::predict_one(const Eigen::Ref<const Vector>& x) const
{
    return argmin_first(score(x));
}

std::vector<int> FittedModel::predict(const Matrix& x) const
{
    if (x.rows() > 0 && x.cols() != parts_.p_full) {
        throw InvalidInput("predict: expected " + std::to_string(parts_.p_full) + " columns, got "
                           + std::to_string(x.cols()));
    }
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) out.push_back(predict_one(x.row(i).transpose()));
    return out;
}

FittedModel build_model(const Coefficients& omega, const GroupStats& stats, const PenaltySpec& pen,
                        std::vector<std::string> labels, std::vector<std::string> feature_names)
{
    if (omega.p() != stats.p || omega.g_count() != stats.g_count) {
        throw InvalidInput("build_model: coefficients do not match the statistics");
    }
    const auto support = extract_support(omega, 0.0);

    ModelParts m;
    m.p_full = stats.p;
    m.g_count = stats.g_count;
    if (labels.empty()) {
        for (int g = 0; g < stats.g_count; ++g) labels.push_back(std::to_string(g + 1));
    }
    m.labels = std::move(labels);
    m.priors = stats.priors;
    m.support = support.overall;
    m.group_supports = support.per_group;
    m.alpha = pen.alpha;
    m.lambda = pen.lambda;
    m.cov_mode = stats.cov_mode;
    m.feature_names = std::move(feature_names);

    const auto s = static_cast<Index>(m.support.size());
    m.omega_s.resize(s, omega.matrix().cols());
    for (Index k = 0; k < s; ++k) m.omega_s.row(k) = omega.matrix().row(m.support[static_cast<std::size_t>(k)]);
    for (int g = 0; g < stats.g_count; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        Vector mean(s);
        Matrix cov(s, s);
        for (Index a = 0; a < s; ++a) {
            const auto ja = m.support[static_cast<std::size_t>(a)];
            mean(a) = stats.means[gi](ja);
            for (Index b = 0; b <= a; ++b) {
                cov(a, b) = stats.covariances[gi](ja, m.support[static_cast<std::size_t>(b)]);
            }
        }
        m.means_s.push_back(std::move(mean));
        m.cov_s.emplace_back(std::move(cov));
    }
    return FittedModel(std::move(m));
}

bool basis_invariance_check(const Coefficients& basis, const GroupStats& stats, const PenaltySpec& pen,
                            const Matrix& r, const Matrix& points)
{
    const Index width = basis.matrix().cols();
    if (r.rows() != width || r.cols() != width) {
        throw InvalidInput("basis_invariance_check: r must be G(G-1) x G(G-1)");
    }
    const Coefficients rotated(basis.matrix() * r, basis.g_count());
    const auto original = build_model(basis, stats, pen);
    const auto transformed = build_model(rotated, stats, pen);
    return original.predict(points) == transformed.predict(points);
}

} // namespace mgqda
