#pragma once

#include <string>
#include <vector>

namespace gmwb {

// Minimal comma-separated table with '#' comment lines, a header row, '.'
// decimal point regardless of locale, and enough digits to round-trip.
struct CsvTable {
    std::vector<std::string> comments;  // without the leading '#'
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<std::string>& cells) { rows.push_back(cells); }
    std::string to_string() const;
    void write(const std::string& path_or_empty_for_stdout) const;

    static CsvTable parse(const std::string& text);
};

std::string csv_num(double x);

}  // namespace gmwb
