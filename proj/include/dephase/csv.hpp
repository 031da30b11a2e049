#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dephase/errors.hpp"

namespace dephase {

/// Formats a double with 17 significant digits, enough to round-trip the
/// exact binary value through text.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Rectangular numeric table with a mandatory header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline void write_csv(std::ostream& os, const CsvTable& table) {
    for (size_t i = 0; i < table.header.size(); ++i) {
        if (i) os << ',';
        os << table.header[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_double(row[i]);
        }
        os << '\n';
    }
}

inline void write_csv_file(const std::string& path, const CsvTable& table) {
    std::ofstream os(path, std::ios::binary);  // fixed \n line endings on every platform
    if (!os) throw Error("cannot open CSV output file: " + path);
    write_csv(os, table);
    if (!os) throw Error("failed writing CSV file: " + path);
}

inline CsvTable read_csv(std::istream& is) {
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) throw Error("CSV input is empty (header row is mandatory)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);

    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error("CSV cell is not numeric: '" + cell + "'");
            }
        }
        if (row.size() != table.header.size())
            throw Error("CSV row width does not match header");
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open CSV file: " + path);
    return read_csv(is);
}

}  // namespace dephase
