#pragma once

#include <string>
#include <vector>

namespace mrkc {

/// One number, 17 significant digits, '.' decimal separator regardless of
/// locale. Identical inputs format identically, which keeps CSV artifacts
/// byte-reproducible.
std::string format_value(double v);

/// Deterministic CSV assembly: header row, '\n' line endings, values via
/// format_value.
class CsvBuilder {
public:
    explicit CsvBuilder(const std::vector<std::string>& columns);

    void add_row(const std::vector<double>& values);
    const std::string& str() const { return text_; }

private:
    size_t columns_ = 0;
    std::string text_;
};

void write_file(const std::string& path, const std::string& contents);

}  // namespace mrkc
