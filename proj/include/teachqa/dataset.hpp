#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "teachqa/error.hpp"

namespace teachqa {

/// One labeled question. Generated examples carry the template id and slot
/// provenance; externally labeled ones use template_id = 0.
struct Example {
    std::string question;
    std::string intent;
    std::optional<std::string> slot_value;
    std::int64_t template_id = 0;
    std::optional<std::string> source_ref;

    bool operator==(const Example&) const = default;
};

using Dataset = std::vector<Example>;

// ---------------------------------------------------------------------------
// JSONL persistence
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const Example& ex) {
    nlohmann::ordered_json j;
    j["question"] = ex.question;
    j["intent"] = ex.intent;
    j["slot_value"] = ex.slot_value ? nlohmann::ordered_json(*ex.slot_value) : nullptr;
    j["template_id"] = ex.template_id;
    j["source_ref"] = ex.source_ref ? nlohmann::ordered_json(*ex.source_ref) : nullptr;
    return j;
}

inline void write_jsonl(const Dataset& ds, std::ostream& sink) {
    for (const auto& ex : ds) sink << to_json(ex).dump() << '\n';
}

inline std::string to_jsonl(const Dataset& ds) {
    std::ostringstream out;
    write_jsonl(ds, out);
    return out.str();
}

namespace detail {

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key,
                                                  std::size_t line) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    if (!obj.at(key).is_string())
        throw Error("MALFORMED_LINE",
                    "line " + std::to_string(line) + ": '" + key + "' must be a string or null");
    return obj.at(key).get<std::string>();
}

}  // namespace detail

/// Reads a JSONL dataset. `question` and `intent` are required on every
/// line; blank lines are skipped. Errors name the 1-based line number.
inline Dataset read_jsonl(std::istream& source) {
    Dataset ds;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(source, text)) {
        ++line_no;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error("MALFORMED_LINE", "line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.is_object())
            throw Error("MALFORMED_LINE", "line " + std::to_string(line_no) + ": expected an object");
        Example ex;
        for (const char* key : {"question", "intent"}) {
            if (!obj.contains(key) || !obj.at(key).is_string())
                throw Error("MALFORMED_LINE", "line " + std::to_string(line_no) +
                                                  ": missing string field '" + key + "'");
        }
        ex.question = obj.at("question").get<std::string>();
        ex.intent = obj.at("intent").get<std::string>();
        ex.slot_value = detail::optional_string(obj, "slot_value", line_no);
        ex.source_ref = detail::optional_string(obj, "source_ref", line_no);
        if (obj.contains("template_id") && !obj.at("template_id").is_null()) {
            if (!obj.at("template_id").is_number_integer())
                throw Error("MALFORMED_LINE",
                            "line " + std::to_string(line_no) + ": 'template_id' must be an integer");
            ex.template_id = obj.at("template_id").get<std::int64_t>();
        }
        ds.push_back(std::move(ex));
    }
    return ds;
}

inline Dataset from_jsonl(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_jsonl(in);
}

// ---------------------------------------------------------------------------
// Deterministic stratified split
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Fisher-Yates over [0, n) driven by SplitMix64; j = next() mod (i + 1).
inline std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    SplitMix64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.next() % i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

struct SplitSpec {
    double holdout_fraction = 0.0;
    std::uint64_t seed = 0;
};

/// Number of test examples for a stratum of size n. The epsilon absorbs
/// binary rounding of decimal fractions (0.29 * 100 must give 29).
inline std::size_t holdout_size(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

/// Stratified split: each intent's examples are permuted with seed XOR
/// FNV-1a(intent) and the first floor(fraction * n) go to test. Both halves
/// keep the original dataset order.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.holdout_fraction >= 0.0 && spec.holdout_fraction < 1.0))
        throw Error("BAD_FRACTION", "holdout fraction must lie in [0, 1)");

    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto [it, fresh] = strata.try_emplace(ds[i].intent);
        if (fresh) order.push_back(ds[i].intent);
        it->second.push_back(i);
    }

    std::vector<bool> in_test(ds.size(), false);
    if (spec.holdout_fraction > 0.0) {
        for (const auto& intent : order) {
            const auto& members = strata[intent];
            if (members.size() < 2)
                throw Error("STRATUM_TOO_SMALL",
                            "intent '" + intent + "' has fewer than 2 examples");
            const auto perm = permutation(members.size(), spec.seed ^ fnv1a64(intent));
            const auto take = holdout_size(spec.holdout_fraction, members.size());
            for (std::size_t k = 0; k < take; ++k) in_test[members[perm[k]]] = true;
        }
    }

    Dataset train, test;
    for (std::size_t i = 0; i < ds.size(); ++i) (in_test[i] ? test : train).push_back(ds[i]);
    return {std::move(train), std::move(test)};
}

}  // namespace teachqa
