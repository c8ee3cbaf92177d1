#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace newspulse {

// Lowercases ASCII letters and maps the Unicode dash family (hyphen,
// non-breaking hyphen, figure dash, en/em dash, horizontal bar, minus)
// to '-'. Other bytes pass through.
std::string normalize_for_match(std::string_view text);

struct Token {
    std::string text;       // normalized token, internal hyphens kept
    size_t part_begin;      // index of first hyphen-split part in the fine stream
    size_t part_count;
};

// Tokenizes normalized text on non-alphanumeric boundaries, keeping
// hyphens that sit between alphanumerics ("sars-cov-2" is one token).
// `parts` receives the hyphen-split fine stream aligned via Token spans.
std::vector<Token> tokenize_with_parts(std::string_view normalized, std::vector<std::string>& parts);

// Plain word tokens (alphanumeric runs) of already-normalized text.
std::vector<std::string> word_tokens(std::string_view normalized);

} // namespace newspulse
