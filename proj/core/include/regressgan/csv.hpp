#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace regressgan {

// Small CSV table: header row required, comma separated, double quotes
// stripped. Cells are kept as strings; numeric parsing reports the 1-based
// file line on failure.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::string path;

    // Column index by name; throws ParseError listing expected vs. found.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;

    double number_at(std::size_t row, std::size_t col) const;
    const std::string& cell(std::size_t row, std::size_t col) const { return rows[row][col]; }
};

CsvTable read_csv(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace regressgan
