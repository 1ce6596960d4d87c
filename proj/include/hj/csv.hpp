#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace hj {

/// Shortest decimal string that round-trips the exact double.
std::string format_double(double v);

using CsvCell = std::variant<std::int64_t, double, std::string>;

// CSV with one '#'-prefixed metadata header line (resolved config + seed go
// there), then a column header, then rows. Numbers use shortest round-trip
// formatting so re-ingestion is bit-faithful.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& metadata);

    void header(const std::vector<std::string>& columns);
    void row(const std::vector<CsvCell>& cells);

private:
    std::ofstream os_;
};

}  // namespace hj
