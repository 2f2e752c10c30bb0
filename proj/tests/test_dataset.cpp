#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace teachqa;

namespace {

Dataset labeled(const std::vector<std::pair<std::string, std::size_t>>& sizes) {
    Dataset ds;
    for (const auto& [intent, n] : sizes)
        for (std::size_t i = 0; i < n; ++i) ds.push_back({intent + " q" + std::to_string(i), intent});
    return ds;
}

std::vector<std::string> keys(const Dataset& ds) {
    std::vector<std::string> out;
    for (const auto& ex : ds) out.push_back(ex.intent + "|" + ex.question);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(Hashing, KnownVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
    SplitMix64 rng(0);
    EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
}

TEST(Split, ZeroFractionKeepsEverything) {
    const auto ds = labeled({{"a", 3}, {"b", 1}});
    const auto [train, test] = split(ds, {0.0, 1});
    EXPECT_TRUE(test.empty());
    EXPECT_EQ(to_jsonl(train), to_jsonl(ds));
}

TEST(Split, FloorPerStratum) {
    {
        const auto [train, test] = split(labeled({{"a", 10}}), {0.2, 42});
        EXPECT_EQ(test.size(), 2u);
        EXPECT_EQ(train.size(), 8u);
    }
    const auto [train, test] = split(labeled({{"a", 10}, {"b", 5}}), {0.2, 42});
    EXPECT_EQ(std::count_if(test.begin(), test.end(), [](auto& e) { return e.intent == "a"; }), 2);
    EXPECT_EQ(std::count_if(test.begin(), test.end(), [](auto& e) { return e.intent == "b"; }), 1);
    EXPECT_EQ(holdout_size(0.29, 100), 29u);
}

TEST(Split, Errors) {
    try {
        split(labeled({{"a", 4}, {"b", 1}}), {0.5, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "STRATUM_TOO_SMALL");
    }
    EXPECT_NO_THROW(split(labeled({{"a", 4}, {"b", 1}}), {0.0, 1}));
    EXPECT_THROW(split(labeled({{"a", 4}}), {1.0, 1}), Error);
    EXPECT_THROW(split(labeled({{"a", 4}}), {-0.1, 1}), Error);
}

TEST(Split, PartitionAndDeterminism) {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 100; ++round) {
        std::vector<std::pair<std::string, std::size_t>> sizes;
        for (int c = 0, n = 1 + static_cast<int>(rng() % 4); c < n; ++c)
            sizes.push_back({"c" + std::to_string(c), 2 + rng() % 30});
        auto ds = labeled(sizes);
        std::shuffle(ds.begin(), ds.end(), rng);
        const double fraction = static_cast<double>(rng() % 95) / 100.0;
        const std::uint64_t seed = rng();
        const auto [train, test] = split(ds, {fraction, seed});
        EXPECT_EQ(train.size() + test.size(), ds.size());
        auto merged = train;
        merged.insert(merged.end(), test.begin(), test.end());
        EXPECT_EQ(keys(merged), keys(ds));
        const auto again = split(ds, {fraction, seed});
        EXPECT_EQ(to_jsonl(again.first), to_jsonl(train));
        EXPECT_EQ(to_jsonl(again.second), to_jsonl(test));
        for (const auto& [intent, n] : sizes)
            EXPECT_EQ(static_cast<std::size_t>(std::count_if(test.begin(), test.end(),
                                                             [&](auto& e) { return e.intent == intent; })),
                      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9)));
    }
}

TEST(Split, PermutationIsAPermutation) {
    for (std::size_t n : {0u, 1u, 2u, 17u, 100u}) {
        auto p = permutation(n, 99);
        std::sort(p.begin(), p.end());
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(p[i], i);
    }
}

TEST(Jsonl, EmptyRoundTrip) {
    EXPECT_EQ(to_jsonl({}), "");
    EXPECT_TRUE(from_jsonl("").empty());
}

TEST(Jsonl, RoundTripIsByteIdentical) {
    const Dataset ds = {
        {"Who teaches this class?", "teachingstaff", std::nullopt, 1, std::nullopt},
        {"When is the withdraw date?", "importantdates", "withdraw date", 2, "fact:2"},
        {"Is \"C\" ok? é", "courseprerequisites", "C", 3, "fact:4"},
    };
    const auto text = to_jsonl(ds);
    const auto back = from_jsonl(text);
    EXPECT_EQ(back, ds);
    EXPECT_EQ(to_jsonl(back), text);
    std::ostringstream sink;
    write_jsonl(ds, sink);
    std::istringstream source(sink.str());
    EXPECT_EQ(read_jsonl(source), ds);
}

TEST(Jsonl, ExternallyLabeledLine) {
    const auto ds = from_jsonl(R"({"question":"hi","intent":"greeting"})" "\n");
    ASSERT_EQ(ds.size(), 1u);
    EXPECT_EQ(ds[0].template_id, 0);
    EXPECT_EQ(ds[0].slot_value, std::nullopt);
}

TEST(Jsonl, MalformedLineIsNamed) {
    try {
        from_jsonl(R"({"question":"x"})" "\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "MALFORMED_LINE");
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos) << e.what();
    }
    try {
        from_jsonl("{\"question\":\"x\",\"intent\":\"a\"}\nnot json\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}
