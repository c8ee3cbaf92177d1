#include "newspulse/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "newspulse/errors.hpp"

namespace newspulse {

bool CsvReader::next_row(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    row_line_ = line_;

    std::string field;
    bool in_quotes = false;
    bool row_done = false;
    while (pos_ < text_.size() && !row_done) {
        char c = text_[pos_];
        if (in_quotes) {
            if (c == '"') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                    field.push_back('"');
                    ++pos_;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(c);
            }
            ++pos_;
        } else {
            switch (c) {
            case '"':
                in_quotes = true;
                ++pos_;
                break;
            case ',':
                fields.push_back(std::move(field));
                field.clear();
                ++pos_;
                break;
            case '\r':
                ++pos_;
                if (pos_ < text_.size() && text_[pos_] == '\n') {
                    ++pos_;
                    ++line_;
                }
                row_done = true;
                break;
            case '\n':
                ++pos_;
                ++line_;
                row_done = true;
                break;
            default:
                field.push_back(c);
                ++pos_;
            }
        }
    }
    fields.push_back(std::move(field));
    return true;
}

void for_each_csv_row(
    const std::string& path, const std::vector<std::string>& required,
    const std::function<void(const std::unordered_map<std::string, std::string_view>&, size_t line)>& row_fn) {
    CsvReader reader(read_file(path));

    std::vector<std::string> header;
    if (!reader.next_row(header) || header.empty())
        throw SchemaError(path + ": empty file, expected a header row");
    // Strip a UTF-8 BOM if present.
    if (!header.empty() && header[0].size() >= 3 && header[0].compare(0, 3, "\xEF\xBB\xBF") == 0)
        header[0].erase(0, 3);

    std::unordered_map<std::string, size_t> col;
    for (size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const auto& name : required)
        if (!col.count(name))
            throw SchemaError(path + ": missing column '" + name + "'");

    std::vector<std::string> fields;
    std::unordered_map<std::string, std::string_view> row;
    while (reader.next_row(fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue; // trailing blank line
        if (fields.size() < header.size())
            throw ParseError(path + " line " + std::to_string(reader.line()) + ": expected " +
                             std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        row.clear();
        for (size_t i = 0; i < header.size(); ++i) row[header[i]] = fields[i];
        row_fn(row, reader.line());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + path);
}

std::string csv_escape(std::string_view value) {
    bool needs_quotes = value.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace newspulse
