#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "teachqa/error.hpp"

namespace teachqa {

namespace detail {

inline void require_object(const nlohmann::json& node, std::string_view where,
                           std::initializer_list<std::string_view> required,
                           std::initializer_list<std::string_view> optional = {}) {
    if (!node.is_object())
        throw Error("SCHEMA_ERROR", std::string(where) + ": expected an object");
    for (auto key : required)
        if (!node.contains(std::string(key)))
            throw Error("SCHEMA_ERROR",
                        std::string(where) + ": missing required field '" + std::string(key) + "'");
    for (const auto& [key, _] : node.items()) {
        const bool known =
            std::find(required.begin(), required.end(), key) != required.end() ||
            std::find(optional.begin(), optional.end(), key) != optional.end();
        if (!known)
            throw Error("SCHEMA_ERROR", std::string(where) + ": unknown field '" + key + "'");
    }
}

inline std::string get_string(const nlohmann::json& node, const char* key, std::string_view where) {
    const auto& v = node.at(key);
    if (!v.is_string())
        throw Error("SCHEMA_ERROR",
                    std::string(where) + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline std::int64_t get_int(const nlohmann::json& node, const char* key, std::string_view where) {
    const auto& v = node.at(key);
    if (!v.is_number_integer())
        throw Error("SCHEMA_ERROR",
                    std::string(where) + "." + key + ": expected an integer");
    return v.get<std::int64_t>();
}

inline std::vector<std::string> get_string_array(const nlohmann::json& node, const char* key,
                                                 std::string_view where) {
    const auto& v = node.at(key);
    if (!v.is_array())
        throw Error("SCHEMA_ERROR", std::string(where) + "." + key + ": expected an array");
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string())
            throw Error("SCHEMA_ERROR",
                        std::string(where) + "." + key + ": expected an array of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

inline const nlohmann::json& get_array(const nlohmann::json& node, const char* key,
                                       std::string_view where) {
    const auto& v = node.at(key);
    if (!v.is_array())
        throw Error("SCHEMA_ERROR", std::string(where) + "." + key + ": expected an array");
    return v;
}

inline nlohmann::json parse_json_text(std::string_view text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("SYNTAX_ERROR",
                    "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline std::string locate(std::string_view table, std::size_t index) {
    return std::string(table) + "[" + std::to_string(index) + "]";
}

}  // namespace detail

}  // namespace teachqa
