#include "qnode/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qnode/errors.hpp"

namespace qnode {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const CsvTable& table) {
    if (table.header.size() != table.columns.size()) {
        throw InvalidArgument("write_csv: header/column count mismatch");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_csv: cannot open '" + path + "'");

    for (size_t c = 0; c < table.header.size(); ++c) {
        if (c) out << ',';
        out << table.header[c];
    }
    out << '\n';

    const Eigen::Index rows = table.columns.empty() ? 0 : table.columns[0].size();
    for (const auto& col : table.columns) {
        if (col.size() != rows) throw InvalidArgument("write_csv: ragged columns");
    }
    for (Eigen::Index rv = 0; rv < rows; ++rv) {
        for (size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out << ',';
            out << format_double(table.columns[c][rv]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write_csv: write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        size_t start = 0;
        while (start < field.size() && field[start] == ' ') ++start;
        fields.push_back(field.substr(start));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

} // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("read_csv: '" + path + "' is empty");
    CsvTable table;
    table.header = split_line(line);
    const size_t ncols = table.header.size();
    if (ncols == 0) throw ParseError("read_csv: '" + path + "' has an empty header");

    std::vector<std::vector<double>> data(ncols);
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_line(line);
        if (fields.size() != ncols) {
            throw ParseError("read_csv: '" + path + "' row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(ncols));
        }
        for (size_t c = 0; c < ncols; ++c) {
            double value = 0.0;
            const char* first = fields[c].data();
            const char* last = first + fields[c].size();
            const auto res = std::from_chars(first, last, value);
            if (res.ec != std::errc{} || res.ptr != last) {
                throw ParseError("read_csv: '" + path + "' row " + std::to_string(row) +
                                 ", column " + table.header[c] + ": bad number '" + fields[c] +
                                 "'");
            }
            data[c].push_back(value);
        }
    }

    table.columns.resize(ncols);
    for (size_t c = 0; c < ncols; ++c) {
        table.columns[c] =
            Eigen::Map<const Eigen::VectorXd>(data[c].data(), static_cast<Eigen::Index>(data[c].size()));
    }
    return table;
}

} // namespace qnode
