#pragma once

// Column-oriented CSV with '#' comment headers. Numbers are printed with
// printf "%.*g" so output is independent of the stream locale.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kdva/errors.hpp"

namespace kdva::cli {

struct Table {
    std::vector<std::string> comments;  ///< header lines without the leading "# "
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (names[k] == name) return columns[k];
        }
        fail(ErrorKind::ParseError, "no column named " + name);
    }
};

inline std::string format_number(double x, int precision = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    return buf;
}

inline std::string render_csv(const Table& table, int precision = 17) {
    std::string out;
    for (const auto& line : table.comments) out += "# " + line + "\n";
    for (std::size_t k = 0; k < table.names.size(); ++k) out += (k ? "," : "") + table.names[k];
    out += "\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t k = 0; k < table.columns.size(); ++k) {
            if (k) out += ",";
            out += format_number(table.columns[k][r], precision);
        }
        out += "\n";
    }
    return out;
}

inline void write_csv(const std::string& path, const Table& table, int precision = 17) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorKind::ValidationError, "cannot open " + path + " for writing", "outputs.csv_path");
    file << render_csv(table, precision);
    if (!file) fail(ErrorKind::ValidationError, "failed writing " + path, "outputs.csv_path");
}

inline Table parse_csv(const std::string& text) {
    Table table;
    std::istringstream in(text);
    std::string line;
    bool have_names = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            table.comments.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
        if (!have_names) {
            table.names = cells;
            table.columns.assign(cells.size(), {});
            have_names = true;
            continue;
        }
        if (cells.size() != table.names.size()) fail(ErrorKind::ParseError, "ragged CSV row: " + line);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            char* end = nullptr;
            errno = 0;
            const double x = std::strtod(cells[k].c_str(), &end);
            if (end == cells[k].c_str() || *end != '\0') fail(ErrorKind::ParseError, "not a number: " + cells[k]);
            table.columns[k].push_back(x);
        }
    }
    if (!have_names) fail(ErrorKind::ParseError, "CSV has no column header");
    return table;
}

inline Table read_csv(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) fail(ErrorKind::ParseError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_csv(buffer.str());
}

}  // namespace kdva::cli
