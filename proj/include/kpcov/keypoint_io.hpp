#pragma once

// Keypoint file formats.
//
// csv:      optional header `x,y[,scale][,...]`, then one point per line.
//           Without a header the third column, when present, is the scale.
//           Columns past x, y and scale are kept verbatim as attributes.
// ellipse:  line 1 scale factor (a real, otherwise unused), line 2 point count M,
//           then M rows `x y a b c [extra...]`; `a b c` and extras become attributes.
//
// Both accept LF or CRLF, skip blank lines and use '.' as the decimal separator.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kpcov/errors.hpp"
#include "kpcov/types.hpp"

namespace kpcov {

enum class KeypointFormat { csv, ellipse };

inline KeypointFormat parse_format_name(std::string_view name) {
    if (name == "csv") return KeypointFormat::csv;
    if (name == "ellipse" || name == "ellipse-regions") return KeypointFormat::ellipse;
    throw std::invalid_argument("unknown keypoint format '" + std::string(name) + "' (expected csv or ellipse)");
}

inline const char* format_name(KeypointFormat f) { return f == KeypointFormat::csv ? "csv" : "ellipse"; }

namespace detail {

inline std::string_view trim(std::string_view s) {
    auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
}

/// Finite real, whole token, locale independent.
inline std::optional<double> to_real(std::string_view tok) {
    tok = trim(tok);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    if (tok.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct Line {
    std::size_t number;
    std::string_view text;
};

/// Non-blank lines with their 1-based numbers. Throws EmptyFile when there are none.
inline std::vector<Line> content_lines(std::string_view bytes) {
    if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);
    std::vector<Line> out;
    std::size_t number = 0;
    while (!bytes.empty()) {
        ++number;
        const auto nl = bytes.find('\n');
        std::string_view raw = bytes.substr(0, nl);
        bytes = nl == std::string_view::npos ? std::string_view{} : bytes.substr(nl + 1);
        if (!trim(raw).empty()) out.push_back({number, trim(raw)});
    }
    if (out.empty()) throw EmptyFile();
    return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

inline double require_real(std::string_view tok, std::size_t line, const char* what) {
    auto v = to_real(tok);
    if (!v) throw ParseError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
    return *v;
}

inline KeyPointSet parse_csv(std::string_view bytes) {
    const auto lines = content_lines(bytes);
    KeyPointSet set;
    std::size_t first = 0;
    bool has_scale_column = true;

    const auto head = split(lines.front().text, ',');
    if (!to_real(head.front())) {
        if (head.size() < 2 || !iequals(head[0], "x") || !iequals(head[1], "y")) {
            throw ParseError(lines.front().number, "header must start with x,y");
        }
        has_scale_column = head.size() > 2 && iequals(head[2], "scale");
        first = 1;
    }

    set.points.reserve(lines.size() - first);
    for (std::size_t i = first; i < lines.size(); ++i) {
        const auto& ln = lines[i];
        const auto fields = split(ln.text, ',');
        if (fields.size() < 2) throw ParseError(ln.number, "expected at least 2 columns");
        KeyPoint kp;
        kp.location.x = require_real(fields[0], ln.number, "x");
        kp.location.y = require_real(fields[1], ln.number, "y");
        std::size_t next = 2;
        if (has_scale_column && fields.size() > 2) {
            if (!fields[2].empty()) {
                const double s = require_real(fields[2], ln.number, "scale");
                if (!(s > 0.0)) throw ParseError(ln.number, "scale must be positive");
                kp.scale = s;
            }
            next = 3;
        }
        for (; next < fields.size(); ++next) kp.attributes.emplace_back(fields[next]);
        set.points.push_back(std::move(kp));
    }
    return set;
}

inline KeyPointSet parse_ellipse(std::string_view bytes) {
    const auto lines = content_lines(bytes);
    require_real(lines[0].text, lines[0].number, "scale factor");
    if (lines.size() < 2) throw ParseError(lines[0].number + 1, "missing point count line");

    const auto count_tok = lines[1].text;
    std::size_t count = 0;
    const auto [ptr, ec] = std::from_chars(count_tok.data(), count_tok.data() + count_tok.size(), count);
    if (ec != std::errc{} || ptr != count_tok.data() + count_tok.size()) {
        throw ParseError(lines[1].number, "invalid point count '" + std::string(count_tok) + "'");
    }

    const std::size_t rows = lines.size() - 2;
    if (rows > count) {
        throw ParseError(lines[2 + count].number,
                         "header declares " + std::to_string(count) + " points but more rows follow");
    }
    if (rows < count) {
        throw ParseError(lines.back().number + 1, "header declares " + std::to_string(count) +
                                                      " points but only " + std::to_string(rows) + " rows found");
    }

    KeyPointSet set;
    set.points.reserve(count);
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto& ln = lines[i];
        const auto toks = split_ws(ln.text);
        if (toks.size() < 5) throw ParseError(ln.number, "expected 5 values 'x y a b c'");
        KeyPoint kp;
        kp.location.x = require_real(toks[0], ln.number, "x");
        kp.location.y = require_real(toks[1], ln.number, "y");
        for (std::size_t t = 2; t < 5; ++t) require_real(toks[t], ln.number, "ellipse parameter");
        for (std::size_t t = 2; t < toks.size(); ++t) kp.attributes.emplace_back(toks[t]);
        set.points.push_back(std::move(kp));
    }
    return set;
}

inline std::string shortest(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Points in file order; no deduplication.
inline KeyPointSet parse_keypoints(std::string_view bytes, KeypointFormat format) {
    return format == KeypointFormat::csv ? detail::parse_csv(bytes) : detail::parse_ellipse(bytes);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline KeyPointSet load_keypoints(const std::string& path, KeypointFormat format, std::string detector = {},
                                  std::string image_id = {}) {
    KeyPointSet set;
    try {
        set = parse_keypoints(read_file(path), format);
    } catch (const EmptyFile&) {
        throw EmptyFile(path);
    } catch (const ParseError& e) {
        throw e.with_source(path);
    }
    set.detector = std::move(detector);
    set.image_id = std::move(image_id);
    return set;
}

/// csv with header `x,y,scale`; coordinates use the shortest round-trip representation.
inline std::string to_csv(const KeyPointSet& set) {
    std::string out = "x,y,scale\n";
    for (const auto& kp : set.points) {
        out += detail::shortest(kp.location.x);
        out += ',';
        out += detail::shortest(kp.location.y);
        out += ',';
        if (kp.scale) out += detail::shortest(*kp.scale);
        for (const auto& a : kp.attributes) {
            out += ',';
            out += a;
        }
        out += '\n';
    }
    return out;
}

}  // namespace kpcov
