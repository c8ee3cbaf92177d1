#include "newspulse/encoding.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace newspulse {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}

void append_codepoint(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(char(cp));
    } else if (cp < 0x800) {
        out.push_back(char(0xC0 | (cp >> 6)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(char(0xE0 | (cp >> 12)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(char(0xF0 | (cp >> 18)));
        out.push_back(char(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(char(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(char(0x80 | (cp & 0x3F)));
    }
}

// Windows-1252 0x80..0x9F block; 0 marks unassigned bytes.
constexpr std::array<uint16_t, 32> kCp1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178,
};

std::string cp1252_to_utf8(std::string_view bytes) {
    std::string out;
    out.reserve(bytes.size() + bytes.size() / 4);
    for (unsigned char b : bytes) {
        if (b < 0x80) {
            out.push_back(char(b));
        } else if (b < 0xA0) {
            uint16_t cp = kCp1252High[b - 0x80];
            append_codepoint(out, cp ? cp : 0xFFFD);
        } else {
            append_codepoint(out, b);
        }
    }
    return out;
}

std::string normalize_charset(std::string_view name) {
    std::string s = lower(name);
    // trim quotes/space
    while (!s.empty() && (s.front() == '"' || s.front() == '\'' || std::isspace((unsigned char)s.front())))
        s.erase(s.begin());
    while (!s.empty() && (s.back() == '"' || s.back() == '\'' || std::isspace((unsigned char)s.back()) || s.back() == ';'))
        s.pop_back();
    return s;
}

} // namespace

bool is_valid_utf8(std::string_view bytes) {
    size_t i = 0;
    const size_t n = bytes.size();
    while (i < n) {
        unsigned char c = bytes[i];
        size_t len;
        uint32_t min_cp;
        if (c < 0x80) { i += 1; continue; }
        else if ((c & 0xE0) == 0xC0) { len = 2; min_cp = 0x80; }
        else if ((c & 0xF0) == 0xE0) { len = 3; min_cp = 0x800; }
        else if ((c & 0xF8) == 0xF0) { len = 4; min_cp = 0x10000; }
        else return false;
        if (i + len > n) return false;
        uint32_t cp = c & (0xFF >> (len + 1));
        for (size_t k = 1; k < len; ++k) {
            unsigned char cc = bytes[i + k];
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += len;
    }
    return true;
}

std::string utf8_lossy(std::string_view bytes) {
    if (is_valid_utf8(bytes)) return std::string(bytes);
    std::string out;
    out.reserve(bytes.size());
    size_t i = 0;
    const size_t n = bytes.size();
    while (i < n) {
        unsigned char c = bytes[i];
        size_t len;
        uint32_t min_cp;
        if (c < 0x80) { out.push_back(char(c)); i += 1; continue; }
        else if ((c & 0xE0) == 0xC0) { len = 2; min_cp = 0x80; }
        else if ((c & 0xF0) == 0xE0) { len = 3; min_cp = 0x800; }
        else if ((c & 0xF8) == 0xF0) { len = 4; min_cp = 0x10000; }
        else { append_codepoint(out, 0xFFFD); i += 1; continue; }

        bool ok = i + len <= n;
        uint32_t cp = c & (0xFF >> (len + 1));
        for (size_t k = 1; ok && k < len; ++k) {
            unsigned char cc = bytes[i + k];
            if ((cc & 0xC0) != 0x80) ok = false;
            else cp = (cp << 6) | (cc & 0x3F);
        }
        if (ok && (cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
        if (ok) {
            out.append(bytes.substr(i, len));
            i += len;
        } else {
            append_codepoint(out, 0xFFFD);
            i += 1;
        }
    }
    return out;
}

std::string detect_meta_charset(std::string_view html) {
    // Scan only the head region; charset declarations live early.
    std::string head = lower(html.substr(0, std::min<size_t>(html.size(), 4096)));
    size_t pos = head.find("charset");
    while (pos != std::string::npos) {
        size_t eq = head.find_first_of("=", pos + 7);
        if (eq == std::string::npos) return {};
        size_t start = eq + 1;
        while (start < head.size() && (head[start] == '"' || head[start] == '\'' || head[start] == ' '))
            ++start;
        size_t end = start;
        while (end < head.size() &&
               (std::isalnum((unsigned char)head[end]) || head[end] == '-' || head[end] == '_' || head[end] == '.'))
            ++end;
        if (end > start) return head.substr(start, end - start);
        pos = head.find("charset", pos + 7);
    }
    return {};
}

std::string decode_to_utf8(std::string_view bytes, std::string_view charset_hint) {
    std::string charset = normalize_charset(charset_hint);
    if (charset.empty()) charset = detect_meta_charset(bytes);

    if (charset == "iso-8859-1" || charset == "latin1" || charset == "latin-1" ||
        charset == "windows-1252" || charset == "cp1252")
        return cp1252_to_utf8(bytes);
    if (charset == "us-ascii" || charset == "ascii" || charset == "utf-8" || charset == "utf8" ||
        charset.empty())
        return utf8_lossy(bytes);
    // Unknown charset: best effort.
    return utf8_lossy(bytes);
}

} // namespace newspulse
