#include <mgqda/error.hpp>
#include <mgqda/model_io.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace mgqda;

namespace {

FittedModel sparse_model(std::vector<std::string> labels = {}, std::vector<std::string> names = {})
{
    std::mt19937_64 rng(21);
    const auto s = compute_group_stats(fixture::random_dataset(rng, {14, 17, 12}, 9, 1.3));
    const PenaltySpec pen{0.3 * lambda_max(s, 0.5), 0.5};
    return build_model(fit(s, pen).omega, s, pen, std::move(labels), std::move(names));
}

} // namespace

TEST(ModelIo, RoundTripIsExact)
{
    const auto model = sparse_model({"setosa", "b \"quoted\"", "c,d"}, {"f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9"});
    ASSERT_FALSE(model.prior_only());
    ASSERT_LT(model.parts().support.size(), 9u);
    const auto back = model_from_json(model_to_json(model));
    const auto& a = model.parts();
    const auto& b = back.parts();
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.support, b.support);
    EXPECT_EQ(a.group_supports, b.group_supports);
    EXPECT_EQ(a.omega_s, b.omega_s);
    EXPECT_EQ(a.priors, b.priors);
    for (std::size_t g = 0; g < 3; ++g) {
        EXPECT_EQ(a.means_s[g], b.means_s[g]);
        EXPECT_EQ(a.cov_s[g].matrix(), b.cov_s[g].matrix());
    }
    EXPECT_EQ(a.alpha, b.alpha);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.feature_names, b.feature_names);
    EXPECT_EQ(model_to_json(back), model_to_json(model));

    std::mt19937_64 rng(22);
    const Matrix grid = 3.0 * fixture::gaussian(rng, 400, 9);
    EXPECT_EQ(model.predict(grid), back.predict(grid));
}

TEST(ModelIo, PriorOnlyRoundTrip)
{
    std::mt19937_64 rng(23);
    const auto s = compute_group_stats(fixture::random_dataset(rng, {5, 8}, 3));
    const auto model = build_model(Coefficients(3, 2), s, PenaltySpec{});
    const auto back = model_from_json(model_to_json(model));
    EXPECT_TRUE(back.prior_only());
    EXPECT_EQ(back.predict_one(Vector::Zero(3)), 1);
}

TEST(ModelIo, FileRoundTrip)
{
    const auto model = sparse_model();
    const auto path = std::filesystem::temp_directory_path() / "mgqda_model_io_test.json";
    save_model(model, path);
    EXPECT_EQ(model_to_json(load_model(path)), model_to_json(model));
    std::filesystem::remove(path);
    EXPECT_THROW(load_model(path), InvalidInput);
}

TEST(ModelIo, RejectsMalformedDocuments)
{
    EXPECT_THROW(model_from_json("not json"), InvalidInput);
    EXPECT_THROW(model_from_json("{}"), InvalidInput);
    const std::string good = model_to_json(sparse_model());
    auto replace = [&](const std::string& from, const std::string& to) {
        std::string s = good;
        s.replace(s.find(from), from.size(), to);
        return s;
    };
    EXPECT_THROW(model_from_json(replace("\"format_version\": 1", "\"format_version\": 99")), InvalidInput);
    EXPECT_THROW(model_from_json(replace("\"g_count\": 3", "\"g_count\": 4")), InvalidInput);
    EXPECT_THROW(model_from_json(replace("\"cov_mode\": \"ml\"", "\"cov_mode\": \"other\"")), InvalidInput);
    EXPECT_THROW(model_from_json(replace("\"p_full\": 9", "\"p_full\": \"nine\"")), InvalidInput);
}
