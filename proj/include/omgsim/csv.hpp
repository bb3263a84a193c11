#pragma once

// Minimal CSV plumbing: comma separated, no quoting, '#' comment lines,
// CRLF tolerated, '.' decimal point regardless of locale.

#include <charconv>
#include <cstdio>
#include <istream>
#include <string>
#include <vector>

#include "omgsim/errors.hpp"

namespace omgsim::csv {

struct Row {
    int line = 0;
    std::vector<std::string> cells;
};

// Reads every non-empty, non-comment line. The first row is the header.
inline std::vector<Row> read_rows(std::istream& in) {
    std::vector<Row> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        Row r{line_no, {}};
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            r.cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

[[noreturn]] inline void fail(const std::string& what, int line, const std::string& msg) {
    throw ConfigError(what + " line " + std::to_string(line) + ": " + msg);
}

inline double parse_double(const std::string& s, const std::string& what, int line) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) fail(what, line, "'" + s + "' is not a number");
    return v;
}

// %.17g round-trips every double. The program never calls setlocale, so the
// C locale's '.' is used.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace omgsim::csv
