#pragma once

#include <string>
#include <vector>

namespace qbat::cli {

/// Column-major numeric table with a one-line JSON metadata header.
struct CsvTable {
    std::string meta_json;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // data[c][row]

    std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
};

/// Shortest round-trip decimal form; NaN becomes the sentinel "nan".
std::string format_double(double x);

/// Layout: "# <json>\n" then a header row, then LF-terminated data rows.
std::string render_csv(const CsvTable& table);
void write_csv(const CsvTable& table, const std::string& path);  // throws IoError

/// Re-reads an emitted file and enforces the output contract: metadata line,
/// matching header, strictly increasing t, every field numeric or "nan".
void validate_csv_file(const std::string& path);

} // namespace qbat::cli
