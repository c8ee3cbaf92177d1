#include "newspulse/xml.hpp"

#include <cctype>
#include <stdexcept>

namespace newspulse {

namespace {

struct Parser {
    std::string_view s;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("xml: " + what + " at offset " + std::to_string(pos));
    }

    bool eof() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }

    bool starts_with(std::string_view prefix) const {
        return s.compare(pos, prefix.size(), prefix) == 0;
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    void expect(char c) {
        if (eof() || s[pos] != c) fail(std::string("expected '") + c + "'");
        ++pos;
    }

    std::string read_name() {
        size_t start = pos;
        while (!eof()) {
            char c = s[pos];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '_' || c == '-' || c == '.')
                ++pos;
            else
                break;
        }
        if (pos == start) fail("expected a name");
        return std::string(s.substr(start, pos - start));
    }

    // Skips <!-- -->, <?...?>, <!DOCTYPE ...> (possibly with an internal
    // subset). Returns true if something was consumed.
    bool skip_misc() {
        if (starts_with("<!--")) {
            size_t end = s.find("-->", pos + 4);
            if (end == std::string_view::npos) fail("unterminated comment");
            pos = end + 3;
            return true;
        }
        if (starts_with("<?")) {
            size_t end = s.find("?>", pos + 2);
            if (end == std::string_view::npos) fail("unterminated processing instruction");
            pos = end + 2;
            return true;
        }
        if (starts_with("<!DOCTYPE") || starts_with("<!doctype")) {
            int depth = 0;
            while (!eof()) {
                char c = s[pos++];
                if (c == '<') ++depth;
                else if (c == '>') {
                    if (depth == 0) return true;
                    --depth;
                }
            }
            fail("unterminated DOCTYPE");
        }
        return false;
    }

    std::unique_ptr<XmlNode> parse_element() {
        expect('<');
        auto node = std::make_unique<XmlNode>();
        node->raw_name = read_name();
        size_t colon = node->raw_name.find(':');
        node->name = colon == std::string::npos ? node->raw_name : node->raw_name.substr(colon + 1);

        // attributes
        for (;;) {
            skip_ws();
            if (eof()) fail("unterminated start tag");
            char c = peek();
            if (c == '>' || c == '/') break;
            std::string key = read_name();
            skip_ws();
            expect('=');
            skip_ws();
            if (eof() || (peek() != '"' && peek() != '\'')) fail("unquoted attribute value");
            char quote = s[pos++];
            size_t vstart = pos;
            while (!eof() && s[pos] != quote) ++pos;
            if (eof()) fail("unterminated attribute value");
            node->attrs[key] = xml_unescape(s.substr(vstart, pos - vstart));
            ++pos;
        }

        if (peek() == '/') {
            ++pos;
            expect('>');
            return node;
        }
        expect('>');

        // content
        for (;;) {
            if (eof()) fail("unclosed element <" + node->raw_name + ">");
            if (peek() == '<') {
                if (starts_with("</")) {
                    pos += 2;
                    std::string close = read_name();
                    if (close != node->raw_name)
                        fail("mismatched closing tag </" + close + "> for <" + node->raw_name + ">");
                    skip_ws();
                    expect('>');
                    return node;
                }
                if (starts_with("<![CDATA[")) {
                    size_t end = s.find("]]>", pos + 9);
                    if (end == std::string_view::npos) fail("unterminated CDATA");
                    node->text.append(s.substr(pos + 9, end - pos - 9));
                    pos = end + 3;
                    continue;
                }
                if (skip_misc()) continue;
                node->children.push_back(parse_element());
            } else {
                size_t start = pos;
                while (!eof() && peek() != '<') ++pos;
                node->text.append(xml_unescape(s.substr(start, pos - start)));
            }
        }
    }
};

} // namespace

const XmlNode* XmlNode::first(std::string_view child_name) const {
    for (const auto& c : children)
        if (c->name == child_name) return c.get();
    return nullptr;
}

std::vector<const XmlNode*> XmlNode::all(std::string_view child_name) const {
    std::vector<const XmlNode*> out;
    for (const auto& c : children)
        if (c->name == child_name) out.push_back(c.get());
    return out;
}

std::string XmlNode::child_text(std::string_view child_name) const {
    const XmlNode* c = first(child_name);
    return c ? c->text : std::string();
}

std::string XmlNode::attr(std::string_view key) const {
    auto it = attrs.find(std::string(key));
    return it == attrs.end() ? std::string() : it->second;
}

std::string xml_unescape(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    size_t i = 0;
    while (i < in.size()) {
        if (in[i] != '&') {
            out.push_back(in[i++]);
            continue;
        }
        size_t semi = in.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(in[i++]);
            continue;
        }
        std::string_view ent = in.substr(i + 1, semi - i - 1);
        if (ent == "amp") out.push_back('&');
        else if (ent == "lt") out.push_back('<');
        else if (ent == "gt") out.push_back('>');
        else if (ent == "quot") out.push_back('"');
        else if (ent == "apos") out.push_back('\'');
        else if (!ent.empty() && ent[0] == '#') {
            long cp = 0;
            bool ok = false;
            if (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                cp = std::strtol(std::string(ent.substr(2)).c_str(), nullptr, 16), ok = ent.size() > 2;
            else
                cp = std::strtol(std::string(ent.substr(1)).c_str(), nullptr, 10), ok = ent.size() > 1;
            if (ok && cp > 0 && cp <= 0x10FFFF) {
                // encode as UTF-8
                uint32_t u = uint32_t(cp);
                if (u < 0x80) out.push_back(char(u));
                else if (u < 0x800) {
                    out.push_back(char(0xC0 | (u >> 6)));
                    out.push_back(char(0x80 | (u & 0x3F)));
                } else if (u < 0x10000) {
                    out.push_back(char(0xE0 | (u >> 12)));
                    out.push_back(char(0x80 | ((u >> 6) & 0x3F)));
                    out.push_back(char(0x80 | (u & 0x3F)));
                } else {
                    out.push_back(char(0xF0 | (u >> 18)));
                    out.push_back(char(0x80 | ((u >> 12) & 0x3F)));
                    out.push_back(char(0x80 | ((u >> 6) & 0x3F)));
                    out.push_back(char(0x80 | (u & 0x3F)));
                }
            } else {
                out.append(in.substr(i, semi - i + 1));
            }
        } else {
            out.append(in.substr(i, semi - i + 1));
        }
        i = semi + 1;
    }
    return out;
}

std::unique_ptr<XmlNode> parse_xml(std::string_view doc) {
    Parser p{doc};
    p.skip_ws();
    // strip BOM
    if (p.starts_with("\xEF\xBB\xBF")) p.pos += 3;
    p.skip_ws();
    while (!p.eof() && p.peek() == '<' && p.skip_misc()) p.skip_ws();
    if (p.eof() || p.peek() != '<') p.fail("no root element");
    auto root = p.parse_element();
    p.skip_ws();
    while (!p.eof() && p.peek() == '<' && p.skip_misc()) p.skip_ws();
    if (!p.eof()) p.fail("trailing content after root element");
    return root;
}

} // namespace newspulse
