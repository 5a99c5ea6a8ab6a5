#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace unwind::io {

/// Fixed decimal notation carrying 10 significant digits.
inline std::string fmt(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    if (v == 0.0) {
        return "0.000000000";
    }
    const int mag = static_cast<int>(std::floor(std::log10(std::fabs(v))));
    int decimals = 9 - mag;
    if (decimals < 0) {
        decimals = 0;
    }
    if (decimals > 30) {
        decimals = 30;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// Minimal CSV writer: header row then numeric rows.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::initializer_list<std::string> header)
        : CsvWriter(path, std::vector<std::string>(header)) {}

    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_{path} {
        if (!out_) {
            throw std::runtime_error("cannot open " + path + " for writing");
        }
        write_cells(header);
    }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) {
            cells.push_back(fmt(v));
        }
        write_cells(cells);
    }

    void raw_row(const std::vector<std::string>& cells) { write_cells(cells); }

private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out_ << ',';
            }
            out_ << cells[i];
        }
        out_ << '\n';
    }

    std::ofstream out_;
};

}  // namespace unwind::io
