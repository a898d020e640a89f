#include "mrkc/csv.hpp"

#include <cstdio>
#include <fstream>

#include "mrkc/errors.hpp"

namespace mrkc {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& columns) : columns_(columns.size()) {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) text_ += ',';
        text_ += columns[i];
    }
    text_ += '\n';
}

void CsvBuilder::add_row(const std::vector<double>& values) {
    if (values.size() != columns_) {
        throw InvalidInputError("CsvBuilder: row width does not match header");
    }
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) text_ += ',';
        text_ += format_value(values[i]);
    }
    text_ += '\n';
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInputError("cannot open output file: " + path);
    out << contents;
}

}  // namespace mrkc
