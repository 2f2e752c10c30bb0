#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"

using namespace teachqa;
using teachqa::testing::tiny_kb;

namespace {

std::string code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST(ParseKb, MinimalDocumentHasEmptyTables) {
    const auto kb = parse_kb(R"({"domain":"d","categories":[{"label":"grade","kind":"unstructured"}],
                                 "unstructured":[],"structured":[]})");
    EXPECT_EQ(kb.domain, "d");
    ASSERT_EQ(kb.categories.size(), 1u);
    EXPECT_TRUE(kb.unstructured.empty());
    EXPECT_TRUE(kb.structured.empty());
    EXPECT_TRUE(validate_kb(kb).valid());
}

TEST(ParseKb, FactRetrievableByLabel) {
    const auto kb = parse_kb(R"({"domain":"d",
        "categories":[{"label":"courseprerequisites","kind":"unstructured"}],
        "unstructured":[{"id":1,"label":"courseprerequisites","keywords":["python","C"],
                         "response_text":"t","response_source":"s"}],
        "structured":[]})");
    const auto facts = facts_for_label(kb, "courseprerequisites");
    ASSERT_EQ(facts.size(), 1u);
    EXPECT_EQ(facts[0].keywords, (std::vector<std::string>{"python", "C"}));
}

TEST(ParseKb, StructuredAttributeAccepted) {
    const auto kb = parse_kb(R"({"domain":"d",
        "categories":[{"label":"duedate","kind":"structured"}],
        "unstructured":[],
        "structured":[{"id":1,"identified":"Assignment 1","object_keywords":["assignment 1"],
                       "attributes":{"duedate":"June 15"}}]})");
    EXPECT_TRUE(validate_kb(kb).valid());
    EXPECT_EQ(kb.structured[0].attributes.at("duedate"), "June 15");
}

TEST(ParseKb, SyntaxErrorReportsPosition) {
    try {
        parse_kb(R"({"domain": "d",, })");
        FAIL() << "expected a syntax error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), "SYNTAX_ERROR");
        EXPECT_NE(std::string(e.what()).find("byte 16"), std::string::npos) << e.what();
    }
}

TEST(ParseKb, SchemaErrors) {
    EXPECT_EQ(code_of([] { parse_kb(R"({"domain":"d","categories":[],"unstructured":[]})"); }),
              "SCHEMA_ERROR");
    EXPECT_EQ(code_of([] {
                  parse_kb(R"({"domain":"d","categories":[],"unstructured":[],"structured":[],"x":1})");
              }),
              "SCHEMA_ERROR");
    EXPECT_EQ(code_of([] {
                  parse_kb(R"({"domain":"d","categories":[{"label":"a","kind":"other"}],
                               "unstructured":[],"structured":[]})");
              }),
              "SCHEMA_ERROR");
    // Keywords must be an array; the comma-separated string form is rejected.
    EXPECT_EQ(code_of([] {
                  parse_kb(R"({"domain":"d","categories":[{"label":"a","kind":"unstructured"}],
                    "unstructured":[{"id":1,"label":"a","keywords":"python, C",
                                     "response_text":"t","response_source":"s"}],
                    "structured":[]})");
              }),
              "SCHEMA_ERROR");
}

TEST(ParseKb, SerializeThenParseIsIdentity) {
    auto kb = tiny_kb();
    kb.response_patterns["url"] = "Find {identified} at {value}.";
    EXPECT_EQ(parse_kb(serialize_kb(kb).dump()), kb);
    EXPECT_EQ(parse_kb(serialize_kb(sample_kb()).dump(2)), sample_kb());
}

TEST(ParseKb, RandomizedSerializeParseIdentity) {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 50; ++round) {
        KnowledgeBase kb;
        kb.domain = teachqa::testing::random_sentence(rng);
        const int ncat = static_cast<int>(rng() % 5);
        for (int i = 0; i < ncat; ++i)
            kb.categories.push_back({"c" + std::to_string(i),
                                     rng() % 2 ? CategoryKind::structured : CategoryKind::unstructured});
        const int nfact = static_cast<int>(rng() % 5);
        for (int i = 0; i < nfact; ++i) {
            UnstructuredFact f{i + 1, "c0", {}, teachqa::testing::random_sentence(rng), "src"};
            for (int k = 0, n = static_cast<int>(rng() % 3); k < n; ++k)
                f.keywords.push_back(teachqa::testing::random_sentence(rng, 2) + "é\"q");
            kb.unstructured.push_back(f);
        }
        const int nent = static_cast<int>(rng() % 4);
        for (int i = 0; i < nent; ++i)
            kb.structured.push_back({i + 1, "E" + std::to_string(i), {"e" + std::to_string(i)},
                                     {{"c1", teachqa::testing::random_sentence(rng)}}});
        EXPECT_EQ(parse_kb(serialize_kb(kb).dump()), kb);
    }
}

TEST(ValidateKb, SampleAndTinyAreValid) {
    EXPECT_TRUE(validate_kb(sample_kb()).valid());
    EXPECT_TRUE(validate_kb(tiny_kb()).valid());
}

TEST(ValidateKb, EachViolationClassIsDetected) {
    struct Case {
        std::string code;
        std::function<void(KnowledgeBase&)> mutate;
    };
    const std::vector<Case> cases = {
        {"DUPLICATE_LABEL", [](auto& kb) { kb.categories.push_back({"url", CategoryKind::unstructured}); }},
        {"BAD_LABEL_FORMAT", [](auto& kb) { kb.categories.push_back({"Office_Hours", CategoryKind::unstructured}); }},
        {"BAD_LABEL_FORMAT", [](auto& kb) { kb.categories.push_back({"", CategoryKind::structured}); }},
        {"UNKNOWN_CATEGORY", [](auto& kb) { kb.unstructured[0].label = "officehours"; }},
        {"UNKNOWN_CATEGORY", [](auto& kb) { kb.unstructured[0].label = "duedate"; }},
        {"UNKNOWN_CATEGORY", [](auto& kb) { kb.structured[0].attributes["teachingstaff"] = "x"; }},
        {"UNKNOWN_CATEGORY", [](auto& kb) { kb.response_patterns["grading"] = "{value}"; }},
        {"DUPLICATE_ID", [](auto& kb) { kb.unstructured[1].id = kb.unstructured[0].id; }},
        {"DUPLICATE_ID", [](auto& kb) { kb.structured[1].id = kb.structured[0].id; }},
        {"BAD_ID", [](auto& kb) { kb.unstructured[0].id = 0; }},
        {"EMPTY_KEYWORD", [](auto& kb) { kb.unstructured[1].keywords.push_back(" ?! "); }},
        {"DUPLICATE_KEYWORD", [](auto& kb) { kb.unstructured[3].keywords.push_back("Python"); }},
        {"EMPTY_IDENTIFIED", [](auto& kb) { kb.structured[0].identified = ""; }},
        {"DUPLICATE_ENTITY", [](auto& kb) { kb.structured[1].identified = kb.structured[0].identified; }},
        {"EMPTY_OBJECT_KEYWORDS", [](auto& kb) { kb.structured[0].object_keywords.clear(); }},
    };
    for (const auto& c : cases) {
        auto kb = tiny_kb();
        c.mutate(kb);
        const auto report = validate_kb(kb);
        EXPECT_TRUE(report.contains(c.code)) << c.code;
        for (const auto& v : report.violations) EXPECT_EQ(v.code, c.code) << v.locator;
    }
}

TEST(ValidateKb, DuplicateGradeLabel) {
    KnowledgeBase kb;
    kb.categories = {{"grade", CategoryKind::unstructured}, {"grade", CategoryKind::structured}};
    const auto report = validate_kb(kb);
    ASSERT_EQ(report.violations.size(), 1u);
    EXPECT_EQ(report.violations[0].code, "DUPLICATE_LABEL");
}

TEST(FactsForLabel, Lookups) {
    const auto kb = tiny_kb();
    const auto staff = facts_for_label(kb, "teachingstaff");
    ASSERT_EQ(staff.size(), 1u);
    EXPECT_EQ(staff[0].id, 1);
    auto kb2 = kb;
    kb2.categories.push_back({"grade", CategoryKind::unstructured});
    EXPECT_TRUE(facts_for_label(kb2, "grade").empty());
    EXPECT_EQ(code_of([&] { facts_for_label(kb, "duedate"); }), "UNKNOWN_LABEL");
    EXPECT_EQ(code_of([&] { facts_for_label(kb, "nothing"); }), "UNKNOWN_LABEL");
}

TEST(KeywordSource, ParsesGrammar) {
    EXPECT_EQ(parse_keyword_source("unstructured:*").kind, KeywordSource::Kind::unstructured_all);
    EXPECT_EQ(parse_keyword_source("unstructured:importantdates").label, "importantdates");
    EXPECT_EQ(parse_keyword_source("structured:identified").kind,
              KeywordSource::Kind::structured_identified);
    EXPECT_EQ(parse_keyword_source("literal:a b|c").values, (std::vector<std::string>{"a b", "c"}));
    for (const char* bad : {"", "unstructured", "unstructured:Bad", "structured:name", "literal:",
                            "literal:a||b", "other:x"})
        EXPECT_EQ(code_of([&] { parse_keyword_source(bad); }), "BAD_SELECTOR") << bad;
}

TEST(ResolveSource, Examples) {
    const auto kb = tiny_kb();
    EXPECT_EQ(resolve_source(kb, "unstructured:courseprerequisites"),
              (std::vector<std::string>{"python", "C"}));
    EXPECT_EQ(resolve_source(kb, "literal:withdraw date|start date"),
              (std::vector<std::string>{"withdraw date", "start date"}));
    KnowledgeBase empty;
    EXPECT_TRUE(resolve_source(empty, "unstructured:*").empty());
    EXPECT_EQ(resolve_source(kb, "structured:identified"),
              (std::vector<std::string>{"Assignment 1", "Assignment 2", "Assignment"}));
    EXPECT_EQ(code_of([&] { resolve_source(kb, "unstructured:duedate"); }), "UNKNOWN_LABEL");
}

TEST(ResolveSource, FillsCarryProvenance) {
    const auto fills = resolve_fills(tiny_kb(), parse_keyword_source("structured:object_keywords"));
    ASSERT_EQ(fills.size(), 5u);
    EXPECT_EQ(fills[1], (Fill{"a1", "entity:1"}));
    EXPECT_EQ(resolve_fills(tiny_kb(), parse_keyword_source("literal:x"))[0].source_ref, std::nullopt);
}

// Deduplicated, first-occurrence order, a subsequence of the raw values.
TEST(ResolveSource, RandomizedProperties) {
    std::mt19937_64 rng(11);
    const std::vector<std::string> pool = {"a", "b", "c", "a b", "B", "c"};
    for (int round = 0; round < 200; ++round) {
        KnowledgeBase kb;
        kb.categories = {{"x", CategoryKind::unstructured}, {"y", CategoryKind::unstructured}};
        std::vector<std::string> raw_all, raw_x;
        for (int i = 0, n = static_cast<int>(rng() % 6); i < n; ++i) {
            UnstructuredFact f{i + 1, rng() % 2 ? "x" : "y", {}, "t", "s"};
            for (int k = 0, m = static_cast<int>(rng() % 4); k < m; ++k) {
                f.keywords.push_back(pool[rng() % pool.size()]);
                raw_all.push_back(f.keywords.back());
                if (f.label == "x") raw_x.push_back(f.keywords.back());
            }
            kb.unstructured.push_back(f);
        }
        for (const auto& [selector, raw] :
             {std::pair{std::string("unstructured:*"), raw_all}, std::pair{std::string("unstructured:x"), raw_x}}) {
            const auto out = resolve_source(kb, selector);
            EXPECT_EQ(out, resolve_source(kb, selector));
            EXPECT_EQ(std::set<std::string>(out.begin(), out.end()).size(), out.size());
            EXPECT_EQ(std::set<std::string>(out.begin(), out.end()),
                      std::set<std::string>(raw.begin(), raw.end()));
            std::size_t pos = 0;
            for (const auto& v : out) {
                while (pos < raw.size() && raw[pos] != v) ++pos;
                ASSERT_LT(pos, raw.size()) << "not a subsequence";
                // First occurrence: the value must not appear earlier in raw.
                EXPECT_EQ(std::find(raw.begin(), raw.end(), v) - raw.begin(),
                          static_cast<std::ptrdiff_t>(pos));
                ++pos;
            }
        }
    }
}
