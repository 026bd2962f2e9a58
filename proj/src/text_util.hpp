#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kinlearn/errors.hpp"

namespace kinlearn::text {

/// Shortest representation that parses back to the same double.
inline std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split(std::string_view line, char sep = 0) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    const auto is_sep = [sep](char c) { return sep ? c == sep : (c == ' ' || c == '\t' || c == '\r'); };
    if (sep) {
        while (true) {
            const auto j = line.find(sep, i);
            out.push_back(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
            if (j == std::string_view::npos) break;
            i = j + 1;
        }
        return out;
    }
    while (i < line.size()) {
        while (i < line.size() && is_sep(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_sep(line[j])) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
T parse(std::string_view s, std::size_t lineno = 0) {
    T v{};
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError("cannot parse '" + std::string(s) + "' as a number", lineno);
    return v;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace kinlearn::text
