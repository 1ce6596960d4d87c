#include "hj/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace hj {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::string& metadata) : os_(path) {
    if (!os_) throw std::runtime_error("csv: cannot open " + path);
    os_ << "# " << metadata << "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) os_ << ",";
        os_ << columns[i];
    }
    os_ << "\n";
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) os_ << ",";
        if (const auto* d = std::get_if<double>(&cells[i])) {
            os_ << format_double(*d);
        } else if (const auto* n = std::get_if<std::int64_t>(&cells[i])) {
            os_ << *n;
        } else {
            os_ << std::get<std::string>(cells[i]);
        }
    }
    os_ << "\n";
}

}  // namespace hj
