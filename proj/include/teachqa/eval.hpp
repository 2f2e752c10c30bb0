#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "teachqa/classifier.hpp"
#include "teachqa/dataset.hpp"
#include "teachqa/error.hpp"
#include "teachqa/kb.hpp"
#include "teachqa/responder.hpp"

namespace teachqa {

/// Coverage and precision of the full ask pipeline plus threshold-free
/// intent accuracy. Ratios are absent when their denominator is zero.
struct EvalReport {
    std::size_t total = 0;
    std::size_t answered = 0;
    std::size_t correct_answered = 0;
    std::size_t correct_intent = 0;
    std::optional<double> coverage;
    std::optional<double> precision;
    std::optional<double> intent_accuracy;
    /// (gold, predicted at threshold 0) -> count
    std::map<std::pair<std::string, std::string>, std::size_t> confusion;
    double threshold = kDefaultThreshold;

    bool operator==(const EvalReport&) const = default;
};

inline EvalReport empty_eval_report(double threshold) {
    EvalReport r;
    r.threshold = threshold;
    return r;
}

/// Throws EMPTY_TESTSET. "Correct" means the predicted intent equals the
/// gold intent.
inline EvalReport evaluate(const KnowledgeBase& kb, const IntentModel& model, const Dataset& testset,
                           double threshold = kDefaultThreshold) {
    if (testset.empty()) throw Error("EMPTY_TESTSET", "evaluation needs at least one question");
    EvalReport r;
    r.threshold = threshold;
    r.total = testset.size();
    for (const auto& ex : testset) {
        const auto a = answer(kb, model, ex.question, threshold);
        if (a.status == AnswerStatus::answered) {
            ++r.answered;
            if (a.intent == ex.intent) ++r.correct_answered;
        }
        // answer() reports the threshold-free top intent in every branch.
        ++r.confusion[{ex.intent, a.intent}];
        if (a.intent == ex.intent) ++r.correct_intent;
    }
    const auto total = static_cast<double>(r.total);
    r.coverage = static_cast<double>(r.answered) / total;
    if (r.answered > 0)
        r.precision = static_cast<double>(r.correct_answered) / static_cast<double>(r.answered);
    r.intent_accuracy = static_cast<double>(r.correct_intent) / total;
    return r;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json j;
    j["total"] = r.total;
    j["answered"] = r.answered;
    j["correct_answered"] = r.correct_answered;
    j["coverage"] = opt(r.coverage);
    j["precision"] = opt(r.precision);
    j["intent_accuracy"] = opt(r.intent_accuracy);
    j["threshold"] = r.threshold;
    j["confusion"] = nlohmann::ordered_json::array();
    for (const auto& [key, n] : r.confusion)
        j["confusion"].push_back({{"gold", key.first}, {"predicted", key.second}, {"count", n}});
    return j;
}

inline std::string to_table(const EvalReport& r) {
    auto fmt = [](const std::optional<double>& v) {
        if (!v) return std::string("n/a");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", *v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "threshold        " << r.threshold << '\n'
        << "total            " << r.total << '\n'
        << "answered         " << r.answered << '\n'
        << "correct answered " << r.correct_answered << '\n'
        << "coverage         " << fmt(r.coverage) << '\n'
        << "precision        " << fmt(r.precision) << '\n'
        << "intent accuracy  " << fmt(r.intent_accuracy) << '\n';
    bool header = false;
    for (const auto& [key, n] : r.confusion) {
        if (key.first == key.second) continue;
        if (!header) {
            out << "\nconfusions (gold -> predicted)\n";
            header = true;
        }
        out << "  " << key.first << " -> " << key.second << "  " << n << '\n';
    }
    return out.str();
}

}  // namespace teachqa
