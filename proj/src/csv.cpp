#include "qslbattery/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qslbattery/errors.hpp"

namespace qbat::cli {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string render_csv(const CsvTable& table) {
    std::string out;
    out.reserve(64 * (table.rows() + 2));
    out += "# ";
    out += table.meta_json;
    out += '\n';
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.data.size(); ++c) {
            if (c) out += ',';
            out += format_double(table.data[c][r]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const CsvTable& table, const std::string& path) {
    if (table.columns.size() != table.data.size())
        throw IoError("write_csv: column/header count mismatch");
    for (const auto& col : table.data) {
        if (col.size() != table.rows()) throw IoError("write_csv: ragged columns");
    }
    std::ofstream out(path, std::ios::binary);  // binary keeps LF newlines everywhere
    if (!out) throw IoError("cannot open for writing: " + path);
    out << render_csv(table);
    if (!out) throw IoError("write failed: " + path);
}

void validate_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot reopen for validation: " + path);

    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw IoError(path + ": missing metadata header line");
    if (!std::getline(in, line) || line.empty())
        throw IoError(path + ": missing column header row");

    std::size_t ncols = 1;
    std::size_t t_col = std::string::npos;
    {
        std::stringstream ss(line);
        std::string name;
        std::size_t idx = 0;
        ncols = 0;
        while (std::getline(ss, name, ',')) {
            if (name == "t") t_col = idx;
            ++idx;
            ++ncols;
        }
    }

    double prev_t = -1.0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::size_t idx = 0;
        while (std::getline(ss, field, ',')) {
            double value = 0.0;
            if (field != "nan") {
                const char* begin = field.data();
                const char* end = begin + field.size();
                const auto res = std::from_chars(begin, end, value);
                if (res.ec != std::errc() || res.ptr != end || !std::isfinite(value))
                    throw IoError(path + ": non-finite field '" + field + "' in row " +
                                  std::to_string(row));
            } else {
                value = std::numeric_limits<double>::quiet_NaN();
            }
            if (idx == t_col) {
                if (std::isnan(value) || value <= prev_t)
                    throw IoError(path + ": time column not strictly increasing at row " +
                                  std::to_string(row));
                prev_t = value;
            }
            ++idx;
        }
        if (idx != ncols)
            throw IoError(path + ": row " + std::to_string(row) + " has " + std::to_string(idx) +
                          " fields, expected " + std::to_string(ncols));
        ++row;
    }
    if (row == 0) throw IoError(path + ": no data rows");
}

} // namespace qbat::cli
