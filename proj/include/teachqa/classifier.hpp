#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "teachqa/dataset.hpp"
#include "teachqa/error.hpp"
#include "teachqa/json_util.hpp"
#include "teachqa/text.hpp"

namespace teachqa {

/// Multiset of unigram and adjacent-bigram features ("tok1_tok2").
using FeatureBag = std::map<std::string, std::uint64_t>;

inline FeatureBag featurize(std::string_view text) {
    FeatureBag bag;
    const auto tokens = tokenize(text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        ++bag[tokens[i]];
        if (i + 1 < tokens.size()) ++bag[tokens[i] + "_" + tokens[i + 1]];
    }
    return bag;
}

/// Multinomial Naive Bayes over n-gram counts with add-alpha smoothing.
struct IntentModel {
    double alpha = 1.0;
    std::vector<std::string> labels;  // ascending
    std::map<std::string, std::uint64_t> class_counts;
    std::map<std::string, std::uint64_t> class_totals;
    std::map<std::string, std::map<std::string, std::uint64_t>> feature_counts;
    std::set<std::string> vocabulary;

    bool operator==(const IntentModel&) const = default;

    std::uint64_t total_examples() const {
        std::uint64_t n = 0;
        for (const auto& [_, c] : class_counts) n += c;
        return n;
    }

    std::uint64_t feature_count(const std::string& label, const std::string& feature) const {
        const auto cls = feature_counts.find(label);
        if (cls == feature_counts.end()) return 0;
        const auto it = cls->second.find(feature);
        return it == cls->second.end() ? 0 : it->second;
    }
};

/// Counts are accumulated into ordered maps, so the result does not depend on
/// example order.
inline IntentModel train(const Dataset& ds, double alpha = 1.0) {
    if (ds.empty()) throw Error("EMPTY_DATASET", "cannot train on an empty dataset");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw Error("BAD_ALPHA", "smoothing constant must be positive and finite");

    IntentModel model;
    model.alpha = alpha;
    for (const auto& ex : ds) {
        ++model.class_counts[ex.intent];
        auto& counts = model.feature_counts[ex.intent];
        auto& total = model.class_totals[ex.intent];
        for (const auto& [feature, n] : featurize(ex.question)) {
            counts[feature] += n;
            total += n;
            model.vocabulary.insert(feature);
        }
    }
    for (const auto& [label, _] : model.class_counts) model.labels.push_back(label);
    return model;
}

struct Prediction {
    std::vector<std::pair<std::string, double>> ranked;
    std::string top;
    double confidence = 0.0;
};

/// Log-space scoring with out-of-vocabulary features skipped, normalized by
/// a max-shifted softmax. Ranked by posterior descending, ties by label.
inline Prediction predict(const IntentModel& model, std::string_view question) {
    Prediction p;
    if (model.labels.empty()) return p;

    const auto bag = featurize(question);
    const double n = static_cast<double>(model.total_examples());
    const double vocab = static_cast<double>(model.vocabulary.size());

    std::vector<double> scores;
    scores.reserve(model.labels.size());
    for (const auto& label : model.labels) {
        double score = std::log(static_cast<double>(model.class_counts.at(label)) / n);
        const auto total = model.class_totals.count(label) ? model.class_totals.at(label) : 0;
        const double denom = static_cast<double>(total) + model.alpha * vocab;
        for (const auto& [feature, count] : bag) {
            if (!model.vocabulary.count(feature)) continue;
            const double num = static_cast<double>(model.feature_count(label, feature)) + model.alpha;
            score += static_cast<double>(count) * std::log(num / denom);
        }
        scores.push_back(score);
    }

    const double best = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (auto& s : scores) {
        s = std::exp(s - best);
        sum += s;
    }
    for (std::size_t i = 0; i < model.labels.size(); ++i)
        p.ranked.emplace_back(model.labels[i], scores[i] / sum);
    std::stable_sort(p.ranked.begin(), p.ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    p.top = p.ranked.front().first;
    p.confidence = p.ranked.front().second;
    return p;
}

// ---------------------------------------------------------------------------
// model.json
// ---------------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::ordered_json save_model(const IntentModel& model) {
    nlohmann::ordered_json j;
    j["format_version"] = kModelFormatVersion;
    j["alpha"] = model.alpha;
    j["labels"] = model.labels;
    j["class_counts"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : model.class_counts) j["class_counts"][k] = v;
    j["class_totals"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : model.class_totals) j["class_totals"][k] = v;
    j["feature_counts"] = nlohmann::ordered_json::object();
    for (const auto& [label, counts] : model.feature_counts) {
        auto& node = j["feature_counts"][label];
        node = nlohmann::ordered_json::object();
        for (const auto& [f, c] : counts) node[f] = c;
    }
    return j;
}

inline IntentModel model_from_json(const nlohmann::json& doc) {
    auto malformed = [](const std::string& what) { return Error("MALFORMED_MODEL", what); };
    if (!doc.is_object()) throw malformed("model document must be an object");
    if (!doc.contains("format_version") || !doc.at("format_version").is_number_integer())
        throw malformed("missing integer format_version");
    if (doc.at("format_version").get<std::int64_t>() != kModelFormatVersion)
        throw Error("VERSION_MISMATCH", "unsupported model format_version " +
                                            doc.at("format_version").dump());
    for (const char* key : {"alpha", "labels", "class_counts", "class_totals", "feature_counts"})
        if (!doc.contains(key)) throw malformed(std::string("missing field '") + key + "'");

    IntentModel model;
    try {
        model.alpha = doc.at("alpha").get<double>();
        model.labels = doc.at("labels").get<std::vector<std::string>>();
        model.class_counts = doc.at("class_counts").get<std::map<std::string, std::uint64_t>>();
        model.class_totals = doc.at("class_totals").get<std::map<std::string, std::uint64_t>>();
        model.feature_counts =
            doc.at("feature_counts").get<std::map<std::string, std::map<std::string, std::uint64_t>>>();
    } catch (const nlohmann::json::exception& e) {
        throw malformed(e.what());
    }

    if (!(model.alpha > 0.0)) throw malformed("alpha must be positive");
    if (!std::is_sorted(model.labels.begin(), model.labels.end()) ||
        std::adjacent_find(model.labels.begin(), model.labels.end()) != model.labels.end())
        throw malformed("labels must be strictly ascending");
    if (model.labels.size() != model.class_counts.size()) throw malformed("labels/class_counts mismatch");
    for (const auto& label : model.labels) {
        const auto it = model.class_counts.find(label);
        if (it == model.class_counts.end() || it->second == 0)
            throw malformed("label '" + label + "' lacks a positive class count");
    }
    for (const auto& [label, counts] : model.feature_counts) {
        if (!model.class_counts.count(label)) throw malformed("feature_counts for unknown label");
        std::uint64_t sum = 0;
        for (const auto& [f, c] : counts) {
            sum += c;
            model.vocabulary.insert(f);
        }
        const auto t = model.class_totals.find(label);
        if ((t == model.class_totals.end() ? 0 : t->second) != sum)
            throw malformed("class_totals['" + label + "'] disagrees with feature_counts");
    }
    for (const auto& [label, total] : model.class_totals)
        if (total != 0 && !model.feature_counts.count(label))
            throw malformed("class_totals['" + label + "'] has no feature_counts");
    return model;
}

inline IntentModel load_model(std::string_view document) {
    return model_from_json(detail::parse_json_text(document));
}

}  // namespace teachqa
