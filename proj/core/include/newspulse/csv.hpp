#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace newspulse {

// Minimal RFC 4180 reader: quoted fields, embedded commas/quotes/newlines,
// both LF and CRLF row endings.
class CsvReader {
public:
    explicit CsvReader(std::string text) : text_(std::move(text)) {}

    // Returns false at end of input. Fields are replaced, not appended.
    bool next_row(std::vector<std::string>& fields);

    // 1-based line number of the row most recently returned.
    size_t line() const { return row_line_; }

private:
    std::string text_;
    size_t pos_ = 0;
    size_t line_ = 1;
    size_t row_line_ = 0;
};

// Header-validated file loader. `required` names must all be present
// (SchemaError otherwise); each row is handed to `row_fn` as a name->value
// view. ParseError carries the 1-based line number on short rows.
void for_each_csv_row(
    const std::string& path, const std::vector<std::string>& required,
    const std::function<void(const std::unordered_map<std::string, std::string_view>&, size_t line)>& row_fn);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Escapes a value for CSV output when needed.
std::string csv_escape(std::string_view value);

} // namespace newspulse
