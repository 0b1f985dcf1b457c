#include "gmwb/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace gmwb {

std::string csv_num(double x) {
    if (std::isnan(x)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    for (const auto& c : comments) os << "# " << c << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    return os.str();
}

void CsvTable::write(const std::string& path) const {
    if (path.empty()) {
        std::cout << to_string();
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot open output file '" + path + "'");
    out << to_string();
}

CsvTable CsvTable::parse(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    bool have_header = false;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                out.push_back(cur);
                cur.clear();
            } else
                cur.push_back(c);
        }
        out.push_back(cur);
        return out;
    };
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2)
                                                                   : line.substr(1));
            continue;
        }
        if (!have_header) {
            t.header = split(line);
            have_header = true;
        } else {
            t.rows.push_back(split(line));
        }
    }
    if (!have_header) throw std::runtime_error("csv: missing header row");
    return t;
}

}  // namespace gmwb
