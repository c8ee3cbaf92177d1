#include "newspulse/html_text.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <unordered_set>
#include <vector>

#include "newspulse/encoding.hpp"
#include "newspulse/errors.hpp"
#include "newspulse/xml.hpp"

namespace newspulse {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return out;
}

const std::unordered_set<std::string>& void_tags() {
    static const std::unordered_set<std::string> kSet = {
        "br", "img", "hr", "meta", "link", "input", "area", "base",
        "col", "embed", "source", "track", "wbr", "param",
    };
    return kSet;
}

const std::unordered_set<std::string>& raw_text_tags() {
    static const std::unordered_set<std::string> kSet = {"script", "style", "noscript", "textarea", "svg"};
    return kSet;
}

const std::unordered_set<std::string>& block_tags() {
    static const std::unordered_set<std::string> kSet = {
        "html", "body", "div", "section", "article", "main", "p", "h1", "h2", "h3",
        "h4", "h5", "h6", "ul", "ol", "li", "table", "thead", "tbody", "tr", "td",
        "th", "blockquote", "pre", "figure", "figcaption", "header", "footer",
        "nav", "aside", "form", "fieldset", "dl", "dt", "dd",
    };
    return kSet;
}

// Chrome removed regardless of where the densest region lands.
const std::unordered_set<std::string>& boilerplate_tags() {
    static const std::unordered_set<std::string> kSet = {
        "nav", "header", "footer", "aside", "form", "menu", "button", "select",
        "iframe", "object", "figure",
    };
    return kSet;
}

bool boilerplate_class(const std::string& class_id) {
    static const char* kWords[] = {
        "nav",    "menu",      "sidebar", "footer",    "header", "banner",
        "promo",  "subscribe", "signup",  "breadcrumb", "social", "share",
        "comment", "related",  "advert",  "cookie",    "popup",  "modal",
    };
    for (const char* w : kWords)
        if (class_id.find(w) != std::string::npos) return true;
    return false;
}

struct Node {
    std::string tag;
    std::string class_id; // lowercase "class id" attribute soup
    bool hidden = false;
    Node* parent = nullptr;
    // Interleaved content: child elements and text runs, in order.
    struct Piece {
        Node* element = nullptr; // owned by Node::kids
        std::string text;        // used when element == nullptr
    };
    std::vector<Piece> content;
    std::vector<std::unique_ptr<Node>> kids;

    // filled by measure()
    size_t text_len = 0;
    size_t link_len = 0;
    size_t tag_count = 0;
};

struct HtmlParser {
    std::string_view s;
    size_t pos = 0;

    std::unique_ptr<Node> root;
    std::vector<Node*> stack;

    explicit HtmlParser(std::string_view html) : s(html) {
        root = std::make_unique<Node>();
        root->tag = "#root";
        stack.push_back(root.get());
    }

    Node* top() { return stack.back(); }

    void add_text(std::string_view raw, bool in_anchor_irrelevant = false) {
        (void)in_anchor_irrelevant;
        if (raw.empty()) return;
        Node::Piece p;
        p.text = xml_unescape(raw);
        top()->content.push_back(std::move(p));
    }

    void open(const std::string& tag, const std::string& class_id, bool hidden, bool self_close) {
        auto node = std::make_unique<Node>();
        node->tag = tag;
        node->class_id = class_id;
        node->hidden = hidden;
        node->parent = top();
        Node* raw = node.get();
        top()->kids.push_back(std::move(node));
        Node::Piece p;
        p.element = raw;
        top()->content.push_back(p);
        if (!self_close && !void_tags().count(tag)) stack.push_back(raw);
    }

    void close(const std::string& tag) {
        // Pop to the nearest matching open tag; ignore strays.
        for (size_t i = stack.size(); i-- > 1;) {
            if (stack[i]->tag == tag) {
                stack.resize(i);
                return;
            }
        }
    }

    void skip_raw_text(const std::string& tag) {
        std::string needle = "</" + tag;
        size_t i = pos;
        while (i + needle.size() <= s.size()) {
            if (std::tolower((unsigned char)s[i]) == '<' || s[i] == '<') {
                bool match = true;
                for (size_t k = 0; k < needle.size(); ++k) {
                    if (std::tolower((unsigned char)s[i + k]) != needle[k]) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    size_t gt = s.find('>', i);
                    pos = gt == std::string_view::npos ? s.size() : gt + 1;
                    return;
                }
            }
            ++i;
        }
        pos = s.size();
    }

    void run() {
        while (pos < s.size()) {
            if (s[pos] != '<') {
                size_t start = pos;
                while (pos < s.size() && s[pos] != '<') ++pos;
                add_text(s.substr(start, pos - start));
                continue;
            }
            if (s.compare(pos, 4, "<!--") == 0) {
                size_t end = s.find("-->", pos + 4);
                pos = end == std::string_view::npos ? s.size() : end + 3;
                continue;
            }
            if (pos + 1 < s.size() && (s[pos + 1] == '!' || s[pos + 1] == '?')) {
                size_t end = s.find('>', pos);
                pos = end == std::string_view::npos ? s.size() : end + 1;
                continue;
            }
            if (pos + 1 < s.size() && s[pos + 1] == '/') {
                size_t name_start = pos + 2;
                size_t i = name_start;
                while (i < s.size() && (std::isalnum((unsigned char)s[i]) || s[i] == '-')) ++i;
                std::string tag = lower(s.substr(name_start, i - name_start));
                size_t end = s.find('>', i);
                pos = end == std::string_view::npos ? s.size() : end + 1;
                if (!tag.empty()) close(tag);
                continue;
            }
            if (pos + 1 < s.size() && std::isalpha((unsigned char)s[pos + 1])) {
                parse_open_tag();
                continue;
            }
            // Lone '<' in text.
            add_text(s.substr(pos, 1));
            ++pos;
        }
    }

    void parse_open_tag() {
        size_t i = pos + 1;
        size_t name_start = i;
        while (i < s.size() && (std::isalnum((unsigned char)s[i]) || s[i] == '-')) ++i;
        std::string tag = lower(s.substr(name_start, i - name_start));

        std::string class_id;
        bool hidden = false;
        bool self_close = false;
        while (i < s.size() && s[i] != '>') {
            if (std::isspace((unsigned char)s[i])) {
                ++i;
                continue;
            }
            if (s[i] == '/') {
                self_close = true;
                ++i;
                continue;
            }
            size_t key_start = i;
            while (i < s.size() && !std::isspace((unsigned char)s[i]) && s[i] != '=' && s[i] != '>' && s[i] != '/')
                ++i;
            std::string key = lower(s.substr(key_start, i - key_start));
            std::string value;
            while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
            if (i < s.size() && s[i] == '=') {
                ++i;
                while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
                if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
                    char q = s[i++];
                    size_t vstart = i;
                    while (i < s.size() && s[i] != q) ++i;
                    value = lower(s.substr(vstart, i - vstart));
                    if (i < s.size()) ++i;
                } else {
                    size_t vstart = i;
                    while (i < s.size() && !std::isspace((unsigned char)s[i]) && s[i] != '>') ++i;
                    value = lower(s.substr(vstart, i - vstart));
                }
            }
            if (key == "class" || key == "id") {
                if (!class_id.empty()) class_id.push_back(' ');
                class_id += value;
            } else if (key == "hidden") {
                hidden = true;
            } else if (key == "style" && (value.find("display:none") != std::string::npos ||
                                          value.find("display: none") != std::string::npos)) {
                hidden = true;
            }
        }
        pos = (i < s.size()) ? i + 1 : s.size();

        if (tag == "br") {
            // Paragraph-level break inside the current block.
            Node::Piece p;
            p.text = "\n";
            top()->content.push_back(std::move(p));
            return;
        }
        open(tag, class_id, hidden, self_close);
        if (!self_close && raw_text_tags().count(tag)) {
            skip_raw_text(tag);
            close(tag);
        }
    }
};

bool is_boilerplate(const Node& n) {
    if (n.hidden) return true;
    if (boilerplate_tags().count(n.tag)) return true;
    if (!n.class_id.empty() && n.tag != "body" && n.tag != "html" && boilerplate_class(n.class_id))
        return true;
    return false;
}

size_t visible_len(std::string_view text) {
    size_t n = 0;
    for (char c : text)
        if (!std::isspace((unsigned char)c)) ++n;
    return n;
}

void measure(Node& n, bool in_link) {
    n.text_len = 0;
    n.link_len = 0;
    n.tag_count = 0;
    if (is_boilerplate(n)) return;
    bool link = in_link || n.tag == "a";
    for (auto& piece : n.content) {
        if (piece.element) {
            measure(*piece.element, link);
            n.text_len += piece.element->text_len;
            n.link_len += piece.element->link_len;
            n.tag_count += 1 + piece.element->tag_count;
        } else {
            size_t len = visible_len(piece.text);
            n.text_len += len;
            if (link) n.link_len += len;
        }
    }
}

// Candidate containers for the main region. Leaf blocks (p, h*, ...)
// contribute text but never stand alone, otherwise one long paragraph
// could beat the container holding its siblings.
const std::unordered_set<std::string>& container_tags() {
    static const std::unordered_set<std::string> kSet = {
        "#root", "html", "body", "div", "section", "article", "main",
        "td", "li", "blockquote", "figure", "dl", "table",
    };
    return kSet;
}

void collect_candidates(Node& n, std::vector<Node*>& out) {
    if (is_boilerplate(n)) return;
    if (container_tags().count(n.tag) && n.text_len > 0) out.push_back(&n);
    for (auto& kid : n.kids) collect_candidates(*kid, out);
}

std::string squash_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace((unsigned char)c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

struct Emitter {
    std::vector<std::string> paragraphs;
    std::unordered_set<std::string> seen;
    std::string buffer;

    void flush() {
        std::string p = squash_ws(buffer);
        buffer.clear();
        if (p.empty()) return;
        if (seen.insert(p).second) paragraphs.push_back(std::move(p));
    }

    void walk(const Node& n) {
        if (is_boilerplate(n)) return;
        bool block = block_tags().count(n.tag) != 0;
        if (block) flush();
        for (const auto& piece : n.content) {
            if (piece.element) {
                walk(*piece.element);
            } else if (piece.text == "\n") {
                flush();
            } else {
                buffer += piece.text;
                buffer.push_back(' ');
            }
        }
        if (block) flush();
    }
};

// '<' followed by a letter would look like residual markup downstream;
// break the pair with a space.
void defang_tags(std::string& text) {
    for (size_t i = 0; i + 1 < text.size(); ++i) {
        if (text[i] == '<' && std::isalpha((unsigned char)text[i + 1]))
            text.insert(i + 1, " ");
    }
}

} // namespace

std::string extract_text(std::string_view html_bytes, std::string_view charset_hint,
                         const ExtractOptions& options) {
    std::string html = decode_to_utf8(html_bytes, charset_hint);
    HtmlParser parser(html);
    parser.run();

    measure(*parser.root, false);

    std::vector<Node*> candidates;
    collect_candidates(*parser.root, candidates);
    if (candidates.empty()) throw EmptyBody("no text content found");

    // Text-to-tag density, discounted by link-heavy content. The squared
    // numerator keeps large dense regions ahead of tiny hyper-dense ones.
    auto score = [](const Node& n) {
        double effective = double(n.text_len) - 2.0 * double(n.link_len);
        if (effective <= 0) return 0.0;
        return effective * effective / double(n.tag_count + 5);
    };

    Node* best = *std::max_element(candidates.begin(), candidates.end(),
                                   [&](Node* a, Node* b) { return score(*a) < score(*b); });

    Emitter emitter;
    emitter.walk(*best);
    emitter.flush();

    std::string out;
    for (const auto& p : emitter.paragraphs) {
        if (!out.empty()) out.push_back('\n');
        out += p;
    }
    defang_tags(out);

    if (out.size() < options.min_body_chars)
        throw EmptyBody("best region has " + std::to_string(out.size()) + " chars (< " +
                        std::to_string(options.min_body_chars) + ")");
    return out;
}

} // namespace newspulse
