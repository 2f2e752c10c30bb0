#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "teachqa/dataset.hpp"
#include "teachqa/error.hpp"
#include "teachqa/kb.hpp"
#include "teachqa/text.hpp"

namespace teachqa {

// ---------------------------------------------------------------------------
// Template DSL: literal text with at most one `{name}` slot
// ---------------------------------------------------------------------------

struct ParsedTemplate {
    std::string prefix;
    std::optional<std::string> slot;
    std::string suffix;

    bool slotted() const { return slot.has_value(); }

    std::string render(std::string_view fill) const {
        if (!slot) return prefix;
        std::string out;
        out.reserve(prefix.size() + fill.size() + suffix.size());
        out += prefix;
        out += fill;
        out += suffix;
        return out;
    }
};

inline bool is_slot_name(std::string_view name) {
    if (name.empty() || name[0] < 'a' || name[0] > 'z') return false;
    return std::all_of(name.begin(), name.end(), [](char ch) {
        return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_';
    });
}

/// Throws EMPTY_TEMPLATE, MALFORMED_SLOT (unbalanced braces, bad slot name)
/// or MULTIPLE_SLOTS.
inline ParsedTemplate parse_template(std::string_view text) {
    if (text.empty()) throw Error("EMPTY_TEMPLATE", "template text is empty");

    struct Span { std::size_t open, close; };
    std::vector<Span> slots;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '}')
            throw Error("MALFORMED_SLOT", "unbalanced '}' at offset " + std::to_string(i));
        if (text[i] != '{') continue;
        const auto close = text.find_first_of("{}", i + 1);
        if (close == std::string_view::npos || text[close] == '{')
            throw Error("MALFORMED_SLOT", "unterminated '{' at offset " + std::to_string(i));
        const auto name = text.substr(i + 1, close - i - 1);
        if (!is_slot_name(name))
            throw Error("MALFORMED_SLOT",
                        "slot name '" + std::string(name) + "' does not match [a-z][a-z0-9_]*");
        slots.push_back({i, close});
        i = close;
    }
    if (slots.size() > 1)
        throw Error("MULTIPLE_SLOTS",
                    "template has " + std::to_string(slots.size()) + " slots; at most one allowed");

    ParsedTemplate parsed;
    if (slots.empty()) {
        parsed.prefix = std::string(text);
        return parsed;
    }
    const auto [open, close] = slots.front();
    parsed.prefix = std::string(text.substr(0, open));
    parsed.slot = std::string(text.substr(open + 1, close - open - 1));
    parsed.suffix = std::string(text.substr(close + 1));
    return parsed;
}

// ---------------------------------------------------------------------------
// Templates document
// ---------------------------------------------------------------------------

struct QuestionTemplate {
    std::int64_t id = 0;
    std::string intent;
    std::optional<std::string> keyword_source;
    std::string text;
    bool example = false;

    bool operator==(const QuestionTemplate&) const = default;
};

/// Parses a templates.json array. `example` accepts a boolean or a 0/1
/// integer. Throws SYNTAX_ERROR or SCHEMA_ERROR.
inline std::vector<QuestionTemplate> templates_from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) throw Error("SCHEMA_ERROR", "templates: expected an array");
    std::vector<QuestionTemplate> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto where = detail::locate("templates", i);
        const auto& node = doc[i];
        detail::require_object(node, where, {"id", "intent", "keyword_source", "template"},
                               {"example"});
        QuestionTemplate t;
        t.id = detail::get_int(node, "id", where);
        t.intent = detail::get_string(node, "intent", where);
        const auto& src = node.at("keyword_source");
        if (src.is_string())
            t.keyword_source = src.get<std::string>();
        else if (!src.is_null())
            throw Error("SCHEMA_ERROR", where + ".keyword_source: expected a string or null");
        t.text = detail::get_string(node, "template", where);
        if (node.contains("example")) {
            const auto& ex = node.at("example");
            if (ex.is_boolean())
                t.example = ex.get<bool>();
            else if (ex.is_number_integer() && (ex.get<std::int64_t>() == 0 || ex.get<std::int64_t>() == 1))
                t.example = ex.get<std::int64_t>() == 1;
            else
                throw Error("SCHEMA_ERROR", where + ".example: expected a boolean");
        }
        out.push_back(std::move(t));
    }
    return out;
}

inline std::vector<QuestionTemplate> parse_templates(std::string_view document) {
    return templates_from_json(detail::parse_json_text(document));
}

inline nlohmann::ordered_json serialize_templates(const std::vector<QuestionTemplate>& templates) {
    auto doc = nlohmann::ordered_json::array();
    for (const auto& t : templates) {
        nlohmann::ordered_json node;
        node["id"] = t.id;
        node["intent"] = t.intent;
        node["keyword_source"] =
            t.keyword_source ? nlohmann::ordered_json(*t.keyword_source) : nullptr;
        node["template"] = t.text;
        node["example"] = t.example;
        doc.push_back(std::move(node));
    }
    return doc;
}

inline bool is_intent_label(const KnowledgeBase& kb, std::string_view label) {
    return kb.find_category(label) != nullptr;
}

/// Checks each template against the DSL and the kb. Codes: BAD_ID,
/// DUPLICATE_ID, EMPTY_TEMPLATE, MALFORMED_SLOT, MULTIPLE_SLOTS,
/// SLOT_SOURCE_MISMATCH, BAD_SELECTOR, UNKNOWN_LABEL, UNKNOWN_INTENT.
inline ValidationReport validate_templates(const KnowledgeBase& kb,
                                           const std::vector<QuestionTemplate>& templates) {
    ValidationReport report;
    std::set<std::int64_t> ids;
    for (std::size_t i = 0; i < templates.size(); ++i) {
        const auto& t = templates[i];
        const auto where = detail::locate("templates", i) + " (id " + std::to_string(t.id) + ")";
        auto add = [&](const std::string& code, const std::string& message) {
            report.violations.push_back({code, where, message});
        };
        if (t.id <= 0) add("BAD_ID", "id must be a positive integer");
        if (!ids.insert(t.id).second) add("DUPLICATE_ID", "template id reused");
        if (!is_intent_label(kb, t.intent))
            add("UNKNOWN_INTENT", "intent '" + t.intent + "' is not a declared category");

        std::optional<ParsedTemplate> parsed;
        try {
            parsed = parse_template(t.text);
        } catch (const Error& e) {
            add(e.code(), e.what());
        }
        if (parsed && parsed->slotted() != t.keyword_source.has_value())
            add("SLOT_SOURCE_MISMATCH", parsed->slotted()
                                            ? "slotted template has no keyword_source"
                                            : "slotless template declares a keyword_source");
        if (t.keyword_source) {
            try {
                resolve_fills(kb, parse_keyword_source(*t.keyword_source));
            } catch (const Error& e) {
                add(e.code(), e.what());
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Expansion and generation
// ---------------------------------------------------------------------------

inline std::vector<Example> expand_template(const QuestionTemplate& tpl,
                                            const std::vector<Fill>& fills) {
    const auto parsed = parse_template(tpl.text);
    std::vector<Example> out;
    if (!parsed.slotted()) {
        out.push_back({parsed.prefix, tpl.intent, std::nullopt, tpl.id, std::nullopt});
        return out;
    }
    out.reserve(fills.size());
    for (const auto& fill : fills)
        out.push_back({parsed.render(fill.value), tpl.intent, fill.value, tpl.id, fill.source_ref});
    return out;
}

/// Slotless templates yield the template verbatim and ignore `fills`;
/// slotted ones yield one example per fill, in fill order.
inline std::vector<Example> expand_template(const QuestionTemplate& tpl,
                                            const std::vector<std::string>& fills) {
    std::vector<Fill> wrapped;
    wrapped.reserve(fills.size());
    for (const auto& f : fills) wrapped.push_back({f, std::nullopt});
    return expand_template(tpl, wrapped);
}

struct Conflict {
    std::string question;
    std::vector<std::string> intents;

    bool operator==(const Conflict&) const = default;
};

struct GenerationReport {
    std::size_t raw_count = 0;
    std::size_t unique_count = 0;
    std::map<std::string, std::size_t> per_intent_counts;
    std::vector<Conflict> conflicts;

    bool operator==(const GenerationReport&) const = default;
};

inline nlohmann::ordered_json to_json(const GenerationReport& r) {
    nlohmann::ordered_json j;
    j["raw_count"] = r.raw_count;
    j["unique_count"] = r.unique_count;
    j["per_intent_counts"] = nlohmann::ordered_json::object();
    for (const auto& [label, n] : r.per_intent_counts) j["per_intent_counts"][label] = n;
    j["conflicts"] = nlohmann::ordered_json::array();
    for (const auto& c : r.conflicts)
        j["conflicts"].push_back({{"question", c.question}, {"intents", c.intents}});
    return j;
}

/// Raised when a template cannot be generated against the kb.
class GenerationError : public Error {
public:
    GenerationError(std::int64_t template_id, const Error& cause)
        : Error(cause.code(),
                "template " + std::to_string(template_id) + ": " + cause.what()),
          template_id_(template_id) {}

    std::int64_t template_id() const noexcept { return template_id_; }

private:
    std::int64_t template_id_;
};

/// Expands every template in id order against its resolved keyword source,
/// drops exact (question, intent) repeats keeping the first, and reports
/// questions that carry more than one intent.
inline std::pair<Dataset, GenerationReport> generate_dataset(
    const KnowledgeBase& kb, const std::vector<QuestionTemplate>& templates) {
    std::vector<const QuestionTemplate*> ordered;
    for (const auto& t : templates) ordered.push_back(&t);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return a->id < b->id; });

    Dataset ds;
    GenerationReport report;
    std::set<std::pair<std::string, std::string>> seen;
    std::unordered_map<std::string, std::size_t> conflict_index;
    std::unordered_map<std::string, std::string> first_intent;

    for (const auto* tpl : ordered) {
        std::vector<Example> expanded;
        try {
            if (!is_intent_label(kb, tpl->intent))
                throw Error("UNKNOWN_INTENT",
                            "intent '" + tpl->intent + "' is not a declared category");
            const auto parsed = parse_template(tpl->text);
            if (parsed.slotted() != tpl->keyword_source.has_value())
                throw Error("SLOT_SOURCE_MISMATCH",
                            "keyword_source must be present exactly when the template has a slot");
            std::vector<Fill> fills;
            if (tpl->keyword_source)
                fills = resolve_fills(kb, parse_keyword_source(*tpl->keyword_source));
            expanded = expand_template(*tpl, fills);
        } catch (const Error& e) {
            throw GenerationError(tpl->id, e);
        }

        report.raw_count += expanded.size();
        for (auto& ex : expanded) {
            if (!seen.emplace(ex.question, ex.intent).second) continue;
            auto [it, fresh] = first_intent.try_emplace(ex.question, ex.intent);
            if (!fresh) {
                auto [cit, new_conflict] = conflict_index.try_emplace(ex.question, report.conflicts.size());
                if (new_conflict) report.conflicts.push_back({ex.question, {it->second}});
                report.conflicts[cit->second].intents.push_back(ex.intent);
            }
            ++report.per_intent_counts[ex.intent];
            ds.push_back(std::move(ex));
        }
    }
    report.unique_count = ds.size();
    return {std::move(ds), std::move(report)};
}

// ---------------------------------------------------------------------------
// Template mining from real question corpora
// ---------------------------------------------------------------------------

struct CorpusEntry {
    std::string question;
    std::optional<std::string> label;
};

struct TemplateSuggestion {
    std::string skeleton;
    std::size_t support = 0;
    std::vector<std::string> fills_observed;

    bool operator==(const TemplateSuggestion&) const = default;
};

/// Candidate skeletons: every normalized question is split as
/// prefix + span + suffix with a span of 1..max_slot_tokens tokens and a
/// non-empty prefix or suffix. A skeleton's support is the number of distinct
/// normalized questions that produce it, i.e. the number of distinct fills.
inline std::vector<TemplateSuggestion> suggest_templates(const std::vector<CorpusEntry>& corpus,
                                                         std::size_t min_support,
                                                         std::size_t max_slot_tokens) {
    if (min_support < 2) throw Error("BAD_ARGUMENT", "min_support must be at least 2");
    if (max_slot_tokens < 1) throw Error("BAD_ARGUMENT", "max_slot_tokens must be at least 1");

    std::unordered_set<std::string> distinct;
    std::unordered_map<std::string, std::vector<std::string>> fills_by_skeleton;
    for (const auto& entry : corpus) {
        auto norm = normalize(entry.question);
        if (norm.empty() || !distinct.insert(norm).second) continue;
        const auto tokens = split_tokens(norm);
        const auto n = tokens.size();
        for (std::size_t start = 0; start < n; ++start) {
            for (std::size_t len = 1; len <= max_slot_tokens && start + len <= n; ++len) {
                if (start == 0 && start + len == n) continue;
                std::string skeleton = join_tokens(tokens, 0, start);
                if (!skeleton.empty()) skeleton.push_back(' ');
                skeleton += "{object}";
                if (start + len < n) {
                    skeleton.push_back(' ');
                    skeleton += join_tokens(tokens, start + len, n);
                }
                fills_by_skeleton[skeleton].push_back(join_tokens(tokens, start, start + len));
            }
        }
    }

    std::vector<TemplateSuggestion> out;
    for (auto& [skeleton, fills] : fills_by_skeleton) {
        if (fills.size() < min_support) continue;
        std::sort(fills.begin(), fills.end());
        out.push_back({skeleton, fills.size(), std::move(fills)});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.support != b.support) return a.support > b.support;
        return a.skeleton < b.skeleton;
    });
    return out;
}

struct NgramCount {
    std::string ngram;
    std::size_t count = 0;

    bool operator==(const NgramCount&) const = default;
};

/// label -> n (1..4) -> top-k n-grams by frequency, ties by n-gram text.
/// Unlabeled questions are grouped under "(unlabeled)".
using NgramTables = std::map<std::string, std::map<std::size_t, std::vector<NgramCount>>>;

inline NgramTables ngram_tables(const std::vector<CorpusEntry>& corpus, std::size_t top_k,
                                std::size_t max_n = 4) {
    std::map<std::string, std::map<std::size_t, std::map<std::string, std::size_t>>> counts;
    for (const auto& entry : corpus) {
        const auto label = entry.label.value_or("(unlabeled)");
        const auto tokens = tokenize(entry.question);
        auto& per_n = counts[label];
        for (std::size_t n = 1; n <= max_n; ++n) {
            auto& table = per_n[n];
            for (std::size_t i = 0; i + n <= tokens.size(); ++i)
                ++table[join_tokens(tokens, i, i + n)];
        }
    }
    NgramTables out;
    for (auto& [label, per_n] : counts) {
        for (auto& [n, table] : per_n) {
            std::vector<NgramCount> rows;
            for (auto& [gram, c] : table) rows.push_back({gram, c});
            std::stable_sort(rows.begin(), rows.end(),
                             [](const auto& a, const auto& b) { return a.count > b.count; });
            if (rows.size() > top_k) rows.resize(top_k);
            out[label][n] = std::move(rows);
        }
    }
    return out;
}

inline nlohmann::ordered_json to_json(const std::vector<TemplateSuggestion>& suggestions,
                                      const NgramTables& tables) {
    nlohmann::ordered_json j;
    j["suggestions"] = nlohmann::ordered_json::array();
    for (const auto& s : suggestions)
        j["suggestions"].push_back(
            {{"skeleton", s.skeleton}, {"support", s.support}, {"fills_observed", s.fills_observed}});
    j["ngrams"] = nlohmann::ordered_json::object();
    for (const auto& [label, per_n] : tables) {
        auto& node = j["ngrams"][label];
        node = nlohmann::ordered_json::object();
        for (const auto& [n, rows] : per_n) {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& r : rows) arr.push_back({{"ngram", r.ngram}, {"count", r.count}});
            node[std::to_string(n)] = std::move(arr);
        }
    }
    return j;
}

}  // namespace teachqa
