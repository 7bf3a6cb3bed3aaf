#pragma once

#include <charconv>
#include <istream>
#include <string>

#include <json.hpp>

#include "compsel/errors.hpp"

namespace compsel::detail {

inline std::string slurp(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

/// Parses JSON, rewriting parse failures as "<source>:<line>: <message>".
inline nlohmann::json parse_json(std::istream& in, const std::string& source_name) {
    const std::string text = slurp(in);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t stop = e.byte > text.size() ? text.size() : e.byte;
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') ++line;
        }
        throw ParseError(source_name + ":" + std::to_string(line) + ": " + e.what());
    }
}

/// Every file format is versioned; a missing field means version "1" and
/// anything else is rejected.
inline void check_format_version(const nlohmann::json& obj, const std::string& source_name) {
    if (!obj.is_object() || !obj.contains("format_version")) {
        return;
    }
    const auto& v = obj.at("format_version");
    if (!v.is_string() || v.get<std::string>() != "1") {
        throw ParseError(source_name + ": unsupported format_version " + v.dump() +
                         " (expected \"1\")");
    }
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

} // namespace compsel::detail
