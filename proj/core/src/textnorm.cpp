#include "newspulse/textnorm.hpp"

#include <cctype>

namespace newspulse {

namespace {

inline bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

} // namespace

std::string normalize_for_match(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        if (c < 0x80) {
            out.push_back(char(std::tolower(c)));
            ++i;
            continue;
        }
        // U+2010..U+2015 and U+2212 encode as E2 80 90..95 / E2 88 92.
        if (c == 0xE2 && i + 2 < text.size()) {
            unsigned char b1 = text[i + 1], b2 = text[i + 2];
            if ((b1 == 0x80 && b2 >= 0x90 && b2 <= 0x95) || (b1 == 0x88 && b2 == 0x92)) {
                out.push_back('-');
                i += 3;
                continue;
            }
        }
        out.push_back(char(c));
        ++i;
    }
    return out;
}

std::vector<Token> tokenize_with_parts(std::string_view s, std::vector<std::string>& parts) {
    std::vector<Token> tokens;
    parts.clear();
    size_t i = 0;
    const size_t n = s.size();
    while (i < n) {
        if (!is_alnum(s[i])) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < n) {
            if (is_alnum(s[i])) {
                ++i;
            } else if (s[i] == '-' && i + 1 < n && is_alnum(s[i + 1]) && i > start) {
                ++i; // internal hyphen
            } else {
                break;
            }
        }
        Token tok;
        tok.text = std::string(s.substr(start, i - start));
        tok.part_begin = parts.size();
        size_t p = 0;
        while (p < tok.text.size()) {
            size_t dash = tok.text.find('-', p);
            if (dash == std::string::npos) {
                parts.push_back(tok.text.substr(p));
                break;
            }
            parts.push_back(tok.text.substr(p, dash - p));
            p = dash + 1;
        }
        tok.part_count = parts.size() - tok.part_begin;
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    size_t i = 0;
    const size_t n = s.size();
    while (i < n) {
        if (!is_alnum(s[i])) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < n && is_alnum(s[i])) ++i;
        out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

} // namespace newspulse
