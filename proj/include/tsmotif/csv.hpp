#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsmotif/time_series.hpp"

namespace tsmotif {

namespace detail {
inline std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(delimiter, start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}
} // namespace detail

/// Loads a numeric CSV: rows are time steps, columns dimensions. Every
/// cell must parse to a finite number; errors cite the 1-based data row
/// and column.
inline TimeSeries load_csv(const std::string& path, bool has_header = false,
                           char delimiter = ',') {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);

    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::string line;
    size_t row = 0;  // data rows, 1-based
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = detail::split_line(line, delimiter);
        if (has_header && !saw_header) {
            names = cells;
            saw_header = true;
            continue;
        }
        row++;
        if (columns.empty()) {
            columns.resize(cells.size());
        } else if (cells.size() != columns.size()) {
            throw std::invalid_argument(path + ": row " + std::to_string(row) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(columns.size()));
        }
        for (size_t c = 0; c < cells.size(); c++) {
            const std::string& cell = cells[c];
            size_t lead = cell.find_first_not_of(" \t");
            size_t tail = cell.find_last_not_of(" \t");
            if (lead == std::string::npos)
                throw std::invalid_argument(path + ": empty cell at row " + std::to_string(row) +
                                            ", column " + std::to_string(c + 1));
            double value = 0;
            const char* first = cell.data() + lead;
            const char* last = cell.data() + tail + 1;
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc() || ptr != last || !std::isfinite(value))
                throw std::invalid_argument(path + ": invalid value \"" + cell + "\" at row " +
                                            std::to_string(row) + ", column " +
                                            std::to_string(c + 1));
            columns[c].push_back(value);
        }
    }
    if (columns.empty()) throw std::invalid_argument(path + ": no data rows");
    if (has_header && names.size() != columns.size())
        throw std::invalid_argument(path + ": header names do not match column count");
    return TimeSeries::from_columns(std::move(columns), std::move(names));
}

/// Writes the series with enough precision to round-trip exactly.
inline void write_csv(const TimeSeries& ts, const std::string& path, char delimiter = ',',
                      bool header = false) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    if (header) {
        for (uint32_t f = 0; f < ts.dims(); f++) {
            if (f) out << delimiter;
            out << (f < ts.dim_names().size() ? ts.dim_names()[f] : "dim" + std::to_string(f));
        }
        out << '\n';
    }
    char buf[64];
    for (uint32_t t = 0; t < ts.length(); t++) {
        for (uint32_t f = 0; f < ts.dims(); f++) {
            if (f) out << delimiter;
            std::snprintf(buf, sizeof(buf), "%.17g", ts.at(t, f));
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed while writing " + path);
}

} // namespace tsmotif
