#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qnode {

/// Locale-independent shortest-faithful rendering with up to 17 significant
/// digits (the round-trip precision of a double).
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<Eigen::VectorXd> columns;  // one per header entry, equal lengths
};

/// Writes `.`-decimal CSV, LF endings, 17 significant digits. Deterministic:
/// identical columns produce identical bytes.
void write_csv(const std::string& path, const CsvTable& table);

/// Reads a numeric CSV with a header row. Throws IoError / ParseError.
CsvTable read_csv(const std::string& path);

} // namespace qnode
