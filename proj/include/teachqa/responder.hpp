#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "teachqa/classifier.hpp"
#include "teachqa/error.hpp"
#include "teachqa/kb.hpp"
#include "teachqa/text.hpp"

namespace teachqa {

inline constexpr double kDefaultThreshold = 0.5;

struct EntityMatch {
    std::int64_t entity_id = 0;
    std::string matched_text;
    std::size_t span_begin = 0;  // token offsets into the normalized question
    std::size_t span_end = 0;    // exclusive

    bool operator==(const EntityMatch&) const = default;
};

namespace detail {

inline bool tokens_at(const std::vector<std::string>& haystack, std::size_t pos,
                      const std::vector<std::string>& needle) {
    if (needle.empty() || pos + needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i < needle.size(); ++i)
        if (haystack[pos + i] != needle[i]) return false;
    return true;
}

inline bool contains_tokens(const std::vector<std::string>& haystack,
                            const std::vector<std::string>& needle) {
    for (std::size_t pos = 0; pos + needle.size() <= haystack.size(); ++pos)
        if (tokens_at(haystack, pos, needle)) return true;
    return false;
}

}  // namespace detail

/// Longest contiguous token match of any entity name or object keyword;
/// ties go to the earliest span, then the lowest entity id.
inline std::optional<EntityMatch> extract_entity(const KnowledgeBase& kb,
                                                 std::string_view question) {
    const auto tokens = tokenize(question);
    std::optional<EntityMatch> best;
    auto better = [&](const EntityMatch& m) {
        if (!best) return true;
        const auto len = m.span_end - m.span_begin;
        const auto best_len = best->span_end - best->span_begin;
        if (len != best_len) return len > best_len;
        if (m.span_begin != best->span_begin) return m.span_begin < best->span_begin;
        return m.entity_id < best->entity_id;
    };

    for (const auto& entity : kb.structured) {
        std::vector<std::string> phrases{entity.identified};
        phrases.insert(phrases.end(), entity.object_keywords.begin(), entity.object_keywords.end());
        for (const auto& phrase : phrases) {
            const auto needle = tokenize(phrase);
            if (needle.empty()) continue;
            for (std::size_t pos = 0; pos + needle.size() <= tokens.size(); ++pos) {
                if (!detail::tokens_at(tokens, pos, needle)) continue;
                EntityMatch m{entity.id, join_tokens(needle, 0, needle.size()), pos,
                              pos + needle.size()};
                if (better(m)) best = std::move(m);
            }
        }
    }
    return best;
}

/// The fact for `intent` whose normalized keywords overlap the question most;
/// ties (including no overlap) go to the lowest id. Throws NO_FACT.
inline UnstructuredFact select_fact(const KnowledgeBase& kb, std::string_view intent,
                                    std::string_view question) {
    const auto tokens = tokenize(question);
    const UnstructuredFact* best = nullptr;
    std::size_t best_overlap = 0;
    for (const auto& fact : kb.unstructured) {
        if (fact.label != intent) continue;
        std::size_t overlap = 0;
        for (const auto& kw : fact.keywords)
            if (detail::contains_tokens(tokens, tokenize(kw))) ++overlap;
        if (!best || overlap > best_overlap || (overlap == best_overlap && fact.id < best->id)) {
            best = &fact;
            best_overlap = overlap;
        }
    }
    if (!best) throw Error("NO_FACT", "no fact is labeled '" + std::string(intent) + "'");
    return *best;
}

struct RenderedAttribute {
    std::string text;
    std::string value;
};

inline constexpr std::string_view kDefaultAttributePattern =
    "The {attribute} of {identified} is {value}.";

/// Single left-to-right pass, so substituted values are never rescanned.
inline std::string fill_pattern(std::string_view pattern, std::string_view attribute,
                                std::string_view identified, std::string_view value) {
    const std::pair<std::string_view, std::string_view> subs[] = {
        {"{attribute}", attribute}, {"{identified}", identified}, {"{value}", value}};
    std::string out;
    std::size_t i = 0;
    while (i < pattern.size()) {
        bool replaced = false;
        for (const auto& [key, repl] : subs) {
            if (pattern.substr(i, key.size()) == key) {
                out += repl;
                i += key.size();
                replaced = true;
                break;
            }
        }
        if (!replaced) out.push_back(pattern[i++]);
    }
    return out;
}

/// Throws MISSING_ATTRIBUTE when the entity does not define `attribute`.
inline RenderedAttribute render_attribute(const StructuredEntity& entity, std::string_view attribute,
                                          std::string_view pattern = kDefaultAttributePattern) {
    const auto it = entity.attributes.find(std::string(attribute));
    if (it == entity.attributes.end())
        throw Error("MISSING_ATTRIBUTE", "'" + entity.identified + "' has no '" +
                                             std::string(attribute) + "'");
    return {fill_pattern(pattern, attribute, entity.identified, it->second), it->second};
}

inline RenderedAttribute render_attribute(const KnowledgeBase& kb, const StructuredEntity& entity,
                                          std::string_view attribute) {
    const auto pat = kb.response_patterns.find(std::string(attribute));
    return render_attribute(entity, attribute,
                            pat == kb.response_patterns.end() ? kDefaultAttributePattern
                                                              : std::string_view(pat->second));
}

enum class AnswerStatus { answered, abstained };
enum class AbstainReason { low_confidence, no_entity, missing_attribute, no_fact };

inline std::string_view to_string(AnswerStatus s) {
    return s == AnswerStatus::answered ? "answered" : "abstained";
}

inline std::string_view to_string(AbstainReason r) {
    switch (r) {
        case AbstainReason::low_confidence: return "LOW_CONFIDENCE";
        case AbstainReason::no_entity: return "NO_ENTITY";
        case AbstainReason::missing_attribute: return "MISSING_ATTRIBUTE";
        case AbstainReason::no_fact: return "NO_FACT";
    }
    return "UNKNOWN";
}

struct Answer {
    std::string question;
    std::string intent;
    double confidence = 0.0;
    AnswerStatus status = AnswerStatus::abstained;
    std::optional<std::string> response_text;
    std::optional<std::string> response_source;
    std::optional<EntityMatch> entity;
    std::optional<AbstainReason> abstain_reason;

    bool operator==(const Answer&) const = default;
};

/// Classify, then answer from the kb: unstructured intents select a fact,
/// structured (attribute) intents resolve an entity and render the
/// attribute. Every failure is an abstention; this never throws.
inline Answer answer(const KnowledgeBase& kb, const IntentModel& model, std::string_view question,
                     double threshold = kDefaultThreshold) {
    Answer a;
    a.question = std::string(question);
    const auto p = predict(model, question);
    a.intent = p.top;
    a.confidence = p.confidence;

    auto abstain = [&](AbstainReason reason) {
        a.status = AnswerStatus::abstained;
        a.abstain_reason = reason;
        a.response_text.reset();
        a.response_source.reset();
        return a;
    };

    if (p.ranked.empty() || p.confidence < threshold) return abstain(AbstainReason::low_confidence);

    if (!kb.has_category(p.top, CategoryKind::structured)) {
        // Labels the kb does not declare at all also land here as NO_FACT.
        try {
            const auto fact = select_fact(kb, p.top, question);
            a.status = AnswerStatus::answered;
            a.response_text = fact.response_text;
            a.response_source = fact.response_source;
            return a;
        } catch (const Error&) {
            return abstain(AbstainReason::no_fact);
        }
    }

    a.entity = extract_entity(kb, question);
    if (!a.entity) return abstain(AbstainReason::no_entity);
    const auto* entity = kb.find_entity(a.entity->entity_id);
    if (!entity || !entity->attributes.count(p.top))
        return abstain(AbstainReason::missing_attribute);
    a.status = AnswerStatus::answered;
    a.response_text = render_attribute(kb, *entity, p.top).text;
    return a;
}

inline nlohmann::ordered_json to_json(const Answer& a) {
    nlohmann::ordered_json j;
    j["question"] = a.question;
    j["intent"] = a.intent;
    j["confidence"] = a.confidence;
    j["status"] = to_string(a.status);
    if (a.response_text) j["response_text"] = *a.response_text;
    if (a.response_source) j["response_source"] = *a.response_source;
    if (a.entity) j["entity_id"] = a.entity->entity_id;
    if (a.abstain_reason) j["abstain_reason"] = to_string(*a.abstain_reason);
    return j;
}

}  // namespace teachqa
