#include "regressgan/csv.hpp"

#include <charconv>
#include <fstream>

#include "regressgan/errors.hpp"

namespace regressgan {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    out.push_back(cell);
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("read_csv: cannot open " + path);
    CsvTable table;
    table.path = path;
    std::string line;
    if (!std::getline(f, line)) throw ParseError("read_csv: " + path + " is empty (header required)");
    // strip UTF-8 BOM if present
    if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF') {
        line.erase(0, 3);
    }
    table.columns = split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != table.columns.size()) {
            throw ParseError("read_csv: " + path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(table.columns.size()) + " cells, found " +
                             std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

bool CsvTable::has_column(const std::string& name) const {
    for (const auto& c : columns)
        if (c == name) return true;
    return false;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    std::string found;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) found += ",";
        found += columns[i];
    }
    throw ParseError("csv schema: expected column '" + name + "' in " + path +
                     "; found columns: " + found);
}

double CsvTable::number_at(std::size_t row, std::size_t col) const {
    const std::string& s = rows[row][col];
    double value = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        // +2: header line plus 1-based row index
        throw ParseError("csv parse: " + path + ":" + std::to_string(row + 2) +
                         ": cannot parse numeric cell '" + s + "' in column '" + columns[col] +
                         "'");
    }
    return value;
}

}  // namespace regressgan
