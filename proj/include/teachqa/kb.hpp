#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "teachqa/error.hpp"
#include "teachqa/json_util.hpp"
#include "teachqa/text.hpp"

namespace teachqa {

enum class CategoryKind { unstructured, structured };

inline std::string_view to_string(CategoryKind kind) {
    return kind == CategoryKind::unstructured ? "unstructured" : "structured";
}

struct Category {
    std::string label;
    CategoryKind kind = CategoryKind::unstructured;

    bool operator==(const Category&) const = default;
};

/// A free-text answer attached to an unstructured category, plus the
/// keywords that trigger it and feed template slots.
struct UnstructuredFact {
    std::int64_t id = 0;
    std::string label;
    std::vector<std::string> keywords;
    std::string response_text;
    std::string response_source;

    bool operator==(const UnstructuredFact&) const = default;
};

/// A named domain object (an assignment, an exam) whose attributes are keyed
/// by structured category labels.
struct StructuredEntity {
    std::int64_t id = 0;
    std::string identified;
    std::vector<std::string> object_keywords;
    std::map<std::string, std::string> attributes;

    bool operator==(const StructuredEntity&) const = default;
};

struct KnowledgeBase {
    std::string domain;
    std::vector<Category> categories;
    std::vector<UnstructuredFact> unstructured;
    std::vector<StructuredEntity> structured;
    /// Optional per-attribute answer pattern overriding the default English
    /// sentence; placeholders {attribute}, {identified}, {value}.
    std::map<std::string, std::string> response_patterns;

    bool operator==(const KnowledgeBase&) const = default;

    const Category* find_category(std::string_view label) const {
        for (const auto& c : categories)
            if (c.label == label) return &c;
        return nullptr;
    }

    bool has_category(std::string_view label, CategoryKind kind) const {
        const auto* c = find_category(label);
        return c != nullptr && c->kind == kind;
    }

    const StructuredEntity* find_entity(std::int64_t id) const {
        for (const auto& e : structured)
            if (e.id == id) return &e;
        return nullptr;
    }

    const UnstructuredFact* find_fact(std::int64_t id) const {
        for (const auto& f : unstructured)
            if (f.id == id) return &f;
        return nullptr;
    }
};

struct Violation {
    std::string code;
    std::string locator;
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }

    bool contains(std::string_view code) const {
        return std::any_of(violations.begin(), violations.end(),
                           [&](const Violation& v) { return v.code == code; });
    }
};

inline nlohmann::ordered_json to_json(const ValidationReport& report) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& v : report.violations)
        out.push_back({{"code", v.code}, {"locator", v.locator}, {"message", v.message}});
    return out;
}

// ---------------------------------------------------------------------------
// Document parsing
// ---------------------------------------------------------------------------

inline KnowledgeBase kb_from_json(const nlohmann::json& doc) {
    using namespace detail;
    require_object(doc, "kb", {"domain", "categories", "unstructured", "structured"},
                   {"response_patterns"});

    KnowledgeBase kb;
    kb.domain = get_string(doc, "domain", "kb");

    const auto& cats = get_array(doc, "categories", "kb");
    for (std::size_t i = 0; i < cats.size(); ++i) {
        const auto where = locate("categories", i);
        require_object(cats[i], where, {"label", "kind"});
        Category c;
        c.label = get_string(cats[i], "label", where);
        const auto kind = get_string(cats[i], "kind", where);
        if (kind == "unstructured")
            c.kind = CategoryKind::unstructured;
        else if (kind == "structured")
            c.kind = CategoryKind::structured;
        else
            throw Error("SCHEMA_ERROR", where + ".kind: expected 'unstructured' or 'structured'");
        kb.categories.push_back(std::move(c));
    }

    const auto& facts = get_array(doc, "unstructured", "kb");
    for (std::size_t i = 0; i < facts.size(); ++i) {
        const auto where = locate("unstructured", i);
        require_object(facts[i], where,
                       {"id", "label", "keywords", "response_text", "response_source"});
        UnstructuredFact f;
        f.id = get_int(facts[i], "id", where);
        f.label = get_string(facts[i], "label", where);
        f.keywords = get_string_array(facts[i], "keywords", where);
        f.response_text = get_string(facts[i], "response_text", where);
        f.response_source = get_string(facts[i], "response_source", where);
        kb.unstructured.push_back(std::move(f));
    }

    const auto& ents = get_array(doc, "structured", "kb");
    for (std::size_t i = 0; i < ents.size(); ++i) {
        const auto where = locate("structured", i);
        require_object(ents[i], where, {"id", "identified", "object_keywords", "attributes"});
        StructuredEntity e;
        e.id = get_int(ents[i], "id", where);
        e.identified = get_string(ents[i], "identified", where);
        e.object_keywords = get_string_array(ents[i], "object_keywords", where);
        const auto& attrs = ents[i].at("attributes");
        if (!attrs.is_object())
            throw Error("SCHEMA_ERROR", where + ".attributes: expected an object");
        for (const auto& [key, value] : attrs.items()) {
            if (!value.is_string())
                throw Error("SCHEMA_ERROR", where + ".attributes." + key + ": expected a string");
            e.attributes.emplace(key, value.get<std::string>());
        }
        kb.structured.push_back(std::move(e));
    }

    if (doc.contains("response_patterns")) {
        const auto& pats = doc.at("response_patterns");
        if (!pats.is_object())
            throw Error("SCHEMA_ERROR", "kb.response_patterns: expected an object");
        for (const auto& [key, value] : pats.items()) {
            if (!value.is_string())
                throw Error("SCHEMA_ERROR", "kb.response_patterns." + key + ": expected a string");
            kb.response_patterns.emplace(key, value.get<std::string>());
        }
    }
    return kb;
}

/// Parses a kb.json document. Throws Error with code SYNTAX_ERROR (byte
/// position in the message) or SCHEMA_ERROR.
inline KnowledgeBase parse_kb(std::string_view document) {
    return kb_from_json(detail::parse_json_text(document));
}

inline nlohmann::ordered_json serialize_kb(const KnowledgeBase& kb) {
    nlohmann::ordered_json doc;
    doc["domain"] = kb.domain;
    doc["categories"] = nlohmann::ordered_json::array();
    for (const auto& c : kb.categories)
        doc["categories"].push_back({{"label", c.label}, {"kind", to_string(c.kind)}});
    doc["unstructured"] = nlohmann::ordered_json::array();
    for (const auto& f : kb.unstructured)
        doc["unstructured"].push_back({{"id", f.id},
                                       {"label", f.label},
                                       {"keywords", f.keywords},
                                       {"response_text", f.response_text},
                                       {"response_source", f.response_source}});
    doc["structured"] = nlohmann::ordered_json::array();
    for (const auto& e : kb.structured) {
        nlohmann::ordered_json attrs = nlohmann::ordered_json::object();
        for (const auto& [k, v] : e.attributes) attrs[k] = v;
        doc["structured"].push_back({{"id", e.id},
                                     {"identified", e.identified},
                                     {"object_keywords", e.object_keywords},
                                     {"attributes", attrs}});
    }
    if (!kb.response_patterns.empty()) {
        nlohmann::ordered_json pats = nlohmann::ordered_json::object();
        for (const auto& [k, v] : kb.response_patterns) pats[k] = v;
        doc["response_patterns"] = pats;
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline bool is_label_format(std::string_view label) {
    if (label.empty() || label[0] < 'a' || label[0] > 'z') return false;
    return std::all_of(label.begin(), label.end(), [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9');
    });
}

/// Checks every knowledge-base invariant. Violations are data; this never
/// throws. An empty report means the kb is well formed.
inline ValidationReport validate_kb(const KnowledgeBase& kb) {
    ValidationReport report;
    auto add = [&](std::string code, std::string locator, std::string message) {
        report.violations.push_back({std::move(code), std::move(locator), std::move(message)});
    };

    std::set<std::string> seen_labels;
    for (std::size_t i = 0; i < kb.categories.size(); ++i) {
        const auto& c = kb.categories[i];
        const auto where = detail::locate("categories", i);
        if (!is_label_format(c.label))
            add("BAD_LABEL_FORMAT", where + ".label",
                "label '" + c.label + "' does not match [a-z][a-z0-9]*");
        if (!seen_labels.insert(c.label).second)
            add("DUPLICATE_LABEL", where + ".label", "label '" + c.label + "' declared twice");
    }

    std::set<std::int64_t> fact_ids;
    for (std::size_t i = 0; i < kb.unstructured.size(); ++i) {
        const auto& f = kb.unstructured[i];
        const auto where = detail::locate("unstructured", i);
        if (f.id <= 0) add("BAD_ID", where + ".id", "id must be a positive integer");
        if (!fact_ids.insert(f.id).second)
            add("DUPLICATE_ID", where + ".id", "fact id " + std::to_string(f.id) + " reused");
        if (!kb.has_category(f.label, CategoryKind::unstructured))
            add("UNKNOWN_CATEGORY", where + ".label",
                "'" + f.label + "' is not a declared unstructured category");
        std::set<std::string> normalized;
        for (std::size_t k = 0; k < f.keywords.size(); ++k) {
            const auto kw_where = where + ".keywords[" + std::to_string(k) + "]";
            const auto norm = normalize(f.keywords[k]);
            if (norm.empty())
                add("EMPTY_KEYWORD", kw_where, "keyword is empty after normalization");
            else if (!normalized.insert(norm).second)
                add("DUPLICATE_KEYWORD", kw_where,
                    "keyword '" + f.keywords[k] + "' repeats within the fact");
        }
    }

    std::set<std::int64_t> entity_ids;
    std::set<std::string> names;
    for (std::size_t i = 0; i < kb.structured.size(); ++i) {
        const auto& e = kb.structured[i];
        const auto where = detail::locate("structured", i);
        if (e.id <= 0) add("BAD_ID", where + ".id", "id must be a positive integer");
        if (!entity_ids.insert(e.id).second)
            add("DUPLICATE_ID", where + ".id", "entity id " + std::to_string(e.id) + " reused");
        if (e.identified.empty())
            add("EMPTY_IDENTIFIED", where + ".identified", "entity name is empty");
        else if (!names.insert(e.identified).second)
            add("DUPLICATE_ENTITY", where + ".identified",
                "entity '" + e.identified + "' declared twice");
        if (e.object_keywords.empty())
            add("EMPTY_OBJECT_KEYWORDS", where + ".object_keywords",
                "entity '" + e.identified + "' has no object keywords");
        for (std::size_t k = 0; k < e.object_keywords.size(); ++k)
            if (normalize(e.object_keywords[k]).empty())
                add("EMPTY_KEYWORD", where + ".object_keywords[" + std::to_string(k) + "]",
                    "keyword is empty after normalization");
        for (const auto& [key, _] : e.attributes)
            if (!kb.has_category(key, CategoryKind::structured))
                add("UNKNOWN_CATEGORY", where + ".attributes." + key,
                    "'" + key + "' is not a declared structured category");
    }

    for (const auto& [key, _] : kb.response_patterns)
        if (!kb.has_category(key, CategoryKind::structured))
            add("UNKNOWN_CATEGORY", "response_patterns." + key,
                "'" + key + "' is not a declared structured category");

    return report;
}

/// All facts carrying `label`, in document order. Throws UNKNOWN_LABEL when
/// `label` is not a declared unstructured category.
inline std::vector<UnstructuredFact> facts_for_label(const KnowledgeBase& kb,
                                                     std::string_view label) {
    if (!kb.has_category(label, CategoryKind::unstructured))
        throw Error("UNKNOWN_LABEL",
                    "'" + std::string(label) + "' is not a declared unstructured category");
    std::vector<UnstructuredFact> out;
    for (const auto& f : kb.unstructured)
        if (f.label == label) out.push_back(f);
    return out;
}

// ---------------------------------------------------------------------------
// Keyword sources
// ---------------------------------------------------------------------------

struct KeywordSource {
    enum class Kind { unstructured_label, unstructured_all, structured_identified,
                      structured_object_keywords, literal };

    Kind kind = Kind::literal;
    std::string label;                // unstructured_label only
    std::vector<std::string> values;  // literal only
    std::string text;                 // selector as written

    bool operator==(const KeywordSource&) const = default;
};

/// Parses `unstructured:<label>`, `unstructured:*`, `structured:identified`,
/// `structured:object_keywords` or `literal:v1|v2|...`. Throws BAD_SELECTOR.
inline KeywordSource parse_keyword_source(std::string_view selector) {
    KeywordSource src;
    src.text = std::string(selector);
    const auto colon = selector.find(':');
    if (colon == std::string_view::npos)
        throw Error("BAD_SELECTOR", "selector '" + src.text + "' has no ':'");
    const auto scheme = selector.substr(0, colon);
    const auto rest = selector.substr(colon + 1);

    if (scheme == "unstructured") {
        if (rest == "*") {
            src.kind = KeywordSource::Kind::unstructured_all;
        } else if (is_label_format(rest)) {
            src.kind = KeywordSource::Kind::unstructured_label;
            src.label = std::string(rest);
        } else {
            throw Error("BAD_SELECTOR", "selector '" + src.text + "' names an invalid label");
        }
    } else if (scheme == "structured") {
        if (rest == "identified")
            src.kind = KeywordSource::Kind::structured_identified;
        else if (rest == "object_keywords")
            src.kind = KeywordSource::Kind::structured_object_keywords;
        else
            throw Error("BAD_SELECTOR", "selector '" + src.text +
                                            "': expected structured:identified or "
                                            "structured:object_keywords");
    } else if (scheme == "literal") {
        src.kind = KeywordSource::Kind::literal;
        std::size_t start = 0;
        while (true) {
            const auto bar = rest.find('|', start);
            const auto piece = rest.substr(start, bar == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : bar - start);
            if (piece.empty())
                throw Error("BAD_SELECTOR", "selector '" + src.text + "' has an empty literal");
            src.values.emplace_back(piece);
            if (bar == std::string_view::npos) break;
            start = bar + 1;
        }
    } else {
        throw Error("BAD_SELECTOR", "selector '" + src.text + "' has unknown scheme");
    }
    return src;
}

/// One slot fill value and the KB row that supplied it ("fact:<id>" or
/// "entity:<id>"; absent for literals).
struct Fill {
    std::string value;
    std::optional<std::string> source_ref;

    bool operator==(const Fill&) const = default;
};

/// Resolves a keyword source to its fill values, deduplicated by exact string
/// with the first occurrence kept. Throws UNKNOWN_LABEL.
inline std::vector<Fill> resolve_fills(const KnowledgeBase& kb, const KeywordSource& source) {
    std::vector<Fill> out;
    std::unordered_set<std::string> seen;
    auto push = [&](const std::string& value, std::optional<std::string> ref) {
        if (seen.insert(value).second) out.push_back({value, std::move(ref)});
    };
    using Kind = KeywordSource::Kind;
    switch (source.kind) {
        case Kind::unstructured_label:
            if (!kb.has_category(source.label, CategoryKind::unstructured))
                throw Error("UNKNOWN_LABEL", "selector '" + source.text +
                                                 "' references an undeclared unstructured label");
            [[fallthrough]];
        case Kind::unstructured_all:
            for (const auto& f : kb.unstructured) {
                if (source.kind == Kind::unstructured_label && f.label != source.label) continue;
                for (const auto& kw : f.keywords) push(kw, "fact:" + std::to_string(f.id));
            }
            break;
        case Kind::structured_identified:
            for (const auto& e : kb.structured)
                push(e.identified, "entity:" + std::to_string(e.id));
            break;
        case Kind::structured_object_keywords:
            for (const auto& e : kb.structured)
                for (const auto& kw : e.object_keywords)
                    push(kw, "entity:" + std::to_string(e.id));
            break;
        case Kind::literal:
            for (const auto& v : source.values) push(v, std::nullopt);
            break;
    }
    return out;
}

inline std::vector<std::string> resolve_source(const KnowledgeBase& kb, const KeywordSource& source) {
    std::vector<std::string> out;
    for (auto& fill : resolve_fills(kb, source)) out.push_back(std::move(fill.value));
    return out;
}

inline std::vector<std::string> resolve_source(const KnowledgeBase& kb, std::string_view selector) {
    return resolve_source(kb, parse_keyword_source(selector));
}

}  // namespace teachqa
