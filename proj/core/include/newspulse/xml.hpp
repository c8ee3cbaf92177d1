#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace newspulse {

// Small DOM for feed-sized documents. Parsing is strict about
// well-formedness (tag balance, attribute quoting, entity syntax) so
// truncated feeds surface as errors instead of silent partial parses.
struct XmlNode {
    std::string name;        // element name with any namespace prefix stripped
    std::string raw_name;    // as written, including prefix
    std::map<std::string, std::string> attrs;
    std::string text;        // concatenated direct character data
    std::vector<std::unique_ptr<XmlNode>> children;

    const XmlNode* first(std::string_view child_name) const;
    std::vector<const XmlNode*> all(std::string_view child_name) const;
    std::string child_text(std::string_view child_name) const;
    std::string attr(std::string_view key) const;
};

// Throws std::runtime_error on any well-formedness violation.
std::unique_ptr<XmlNode> parse_xml(std::string_view doc);

std::string xml_unescape(std::string_view s);

} // namespace newspulse
