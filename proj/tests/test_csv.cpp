#include <mgqda/csv.hpp>
#include <mgqda/error.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace mgqda;

namespace {

CsvTable parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_csv(in);
}

} // namespace

TEST(Csv, QuotesCrlfAndBlankLines)
{
    const auto t = parse("a,\"b, c\",label\r\n1,\"2\",\"x \"\"y\"\"\"\r\n\r\n3,4,\"multi\nline\"\n");
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b, c", "label"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][2], "x \"y\"");
    EXPECT_EQ(t.rows[1][2], "multi\nline");
    EXPECT_EQ(t.column("b, c"), 1u);
    EXPECT_THROW(t.column("zzz"), InvalidInput);
}

TEST(Csv, RaggedAndEmptyInput)
{
    EXPECT_THROW(parse("a,b\n1,2,3\n"), InvalidInput);
    EXPECT_THROW(parse(""), InvalidInput);
    EXPECT_THROW(parse("a,b\n\"open,1\n"), InvalidInput);
    EXPECT_TRUE(parse("a,b\n").rows.empty());
}

TEST(Csv, StrictNumbers)
{
    EXPECT_EQ(parse_number("1.5"), 1.5);
    EXPECT_EQ(parse_number(" -2e3 "), -2000.0);
    EXPECT_EQ(parse_number("+4"), 4.0);
    EXPECT_THROW(parse_number("1.5x"), InvalidInput);
    EXPECT_THROW(parse_number(""), InvalidInput);
    EXPECT_THROW(parse_number("--1"), InvalidInput);
    EXPECT_FALSE(is_number("abc"));
}

TEST(Csv, FieldQuoting)
{
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Dataset, LabelsInFirstAppearanceOrder)
{
    const auto t = parse("id,x1,species,x2\nr1,1,virginica,2\nr2,3,setosa,4\nr3,5,virginica,6\nr4,7,setosa,8\n");
    const auto d = dataset_from_csv(t, "species");
    EXPECT_EQ(d.labels, (std::vector<std::string>{"virginica", "setosa"}));
    EXPECT_EQ(d.data.group, (std::vector<int>{0, 1, 0, 1}));
    EXPECT_EQ(d.data.feature_names, (std::vector<std::string>{"x1", "x2"}));
    EXPECT_EQ(d.data.x(2, 1), 6.0);
    EXPECT_EQ(d.data.g_count, 2);

    const auto only = dataset_from_csv(t, "species", {"x2"});
    EXPECT_EQ(only.data.p(), 1);
    EXPECT_EQ(only.data.x(3, 0), 8.0);
    EXPECT_THROW(dataset_from_csv(t, "nope"), InvalidInput);
    EXPECT_THROW(dataset_from_csv(t, "species", {"x9"}), InvalidInput);
    EXPECT_THROW(dataset_from_csv(t, "species", {"species"}), InvalidInput);
}

TEST(Dataset, NonNumericFeatureValue)
{
    const auto t = parse("x1,label\n1,a\nfoo,b\n");
    EXPECT_THROW(dataset_from_csv(t, "label"), InvalidInput);
}

TEST(Dataset, RoundTripKeepsEveryBit)
{
    std::mt19937_64 rng(3);
    auto d = fixture::random_dataset(rng, {7, 9, 5}, 4);
    d.x(0, 0) = 1.0 / 3.0;
    d.x(1, 1) = -1e-300;
    d.x(2, 2) = 6.02214076e23;
    d.feature_names = {"a", "b,c", "d", "e"};
    std::ostringstream out;
    write_dataset_csv(out, d, {"g1", "g 2", "g\"3"}, "group");
    std::istringstream in(out.str());
    const auto back = dataset_from_csv(parse_csv(in), "group");
    EXPECT_EQ(back.data.x, d.x);
    EXPECT_EQ(back.data.group, d.group);
    EXPECT_EQ(back.data.feature_names, d.feature_names);
    EXPECT_EQ(back.labels, (std::vector<std::string>{"g1", "g 2", "g\"3"}));
}

TEST(Prediction, SelectsColumnsByName)
{
    const auto t = parse("b,junk,a\n2,x,1\n4,y,3\n");
    const Matrix x = features_for_prediction(t, 2, {"a", "b"});
    EXPECT_EQ(x(0, 0), 1.0);
    EXPECT_EQ(x(0, 1), 2.0);
    EXPECT_EQ(x(1, 0), 3.0);
}

TEST(Prediction, FallsBackToNumericColumns)
{
    const auto t = parse("u,label,v\n1,q,2\n");
    const Matrix x = features_for_prediction(t, 2, {"a", "b"});
    EXPECT_EQ(x(0, 0), 1.0);
    EXPECT_EQ(x(0, 1), 2.0);
    EXPECT_THROW(features_for_prediction(t, 3, {}), InvalidInput);
    EXPECT_EQ(features_for_prediction(parse("u,v\n"), 5, {}).rows(), 0);
}
