#include <mgqda/baseline.hpp>

#include <mgqda/classifier.hpp>
#include <mgqda/error.hpp>

#include <cmath>

namespace mgqda {

namespace {
constexpr double kVarianceFloor = 1e-12;
}

DiagonalLda DiagonalLda::fit(const Dataset& train)
{
    const Index n = train.n();
    const Index p = train.p();
    const int g_count = train.g_count;
    if (g_count < 1 || n <= g_count) throw InvalidInput("DiagonalLda: need more rows than groups");

    DiagonalLda out;
    std::vector<Index> counts(static_cast<std::size_t>(g_count), 0);
    out.means_.assign(static_cast<std::size_t>(g_count), Vector::Zero(p));
    for (Index i = 0; i < n; ++i) {
        const auto g = static_cast<std::size_t>(train.group[static_cast<std::size_t>(i)]);
        out.means_[g] += train.x.row(i).transpose();
        ++counts[g];
    }
    out.priors_.resize(g_count);
    for (int g = 0; g < g_count; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        if (counts[gi] == 0) throw InvalidInput("DiagonalLda: empty group");
        out.means_[gi] /= static_cast<double>(counts[gi]);
        out.priors_(g) = static_cast<double>(counts[gi]) / static_cast<double>(n);
    }
    out.variance_ = Vector::Zero(p);
    for (Index i = 0; i < n; ++i) {
        const auto g = static_cast<std::size_t>(train.group[static_cast<std::size_t>(i)]);
        out.variance_ += (train.x.row(i).transpose() - out.means_[g]).array().square().matrix();
    }
    out.variance_ /= static_cast<double>(n - g_count);
    out.variance_ = out.variance_.cwiseMax(kVarianceFloor);
    return out;
}

Vector DiagonalLda::score(const Eigen::Ref<const Vector>& x) const
{
    if (x.size() != variance_.size()) throw InvalidInput("DiagonalLda: feature count mismatch");
    Vector out(static_cast<Index>(means_.size()));
    for (std::size_t g = 0; g < means_.size(); ++g) {
        const auto gi = static_cast<Index>(g);
        out(gi) = ((x - means_[g]).array().square() / variance_.array()).sum() - 2.0 * std::log(priors_(gi));
    }
    return out;
}

int DiagonalLda::predict_one(const Eigen::Ref<const Vector>& x) const
{
    return argmin_first(score(x));
}

std::vector<int> DiagonalLda::predict(const Matrix& x) const
{
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) out.push_back(predict_one(x.row(i).transpose()));
    return out;
}

} // namespace mgqda
