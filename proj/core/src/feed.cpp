#include "newspulse/feed.hpp"

#include "newspulse/errors.hpp"
#include "newspulse/url.hpp"
#include "newspulse/xml.hpp"

namespace newspulse {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::optional<std::string> absolute_link(const std::string& raw_link, std::string_view feed_url) {
    std::string link = trim(raw_link);
    if (link.empty()) return std::nullopt;
    if (parse_url(link)) return link;
    if (!feed_url.empty()) {
        if (auto resolved = resolve_url(feed_url, link)) return resolved;
    }
    return std::nullopt;
}

void parse_rss_items(const XmlNode& rss, std::string_view feed_url, std::vector<FeedEntry>& out) {
    const XmlNode* channel = rss.first("channel");
    if (!channel) return;
    for (const XmlNode* item : channel->all("item")) {
        auto link = absolute_link(item->child_text("link"), feed_url);
        if (!link) continue;
        FeedEntry e;
        e.feed_url = std::string(feed_url);
        e.link = *link;
        e.title = trim(item->child_text("title"));
        std::string guid = trim(item->child_text("guid"));
        e.item_guid = guid.empty() ? e.link : guid;
        std::string date = trim(item->child_text("pubDate"));
        if (!date.empty()) e.published = parse_feed_date(date);
        out.push_back(std::move(e));
    }
}

void parse_atom_entries(const XmlNode& feed, std::string_view feed_url, std::vector<FeedEntry>& out) {
    for (const XmlNode* entry : feed.all("entry")) {
        // Prefer rel="alternate" (or rel-less) links.
        std::string href;
        for (const XmlNode* link : entry->all("link")) {
            std::string rel = link->attr("rel");
            if (rel.empty() || rel == "alternate") {
                href = link->attr("href");
                break;
            }
            if (href.empty()) href = link->attr("href");
        }
        auto link = absolute_link(href, feed_url);
        if (!link) continue;
        FeedEntry e;
        e.feed_url = std::string(feed_url);
        e.link = *link;
        e.title = trim(entry->child_text("title"));
        std::string id = trim(entry->child_text("id"));
        e.item_guid = id.empty() ? e.link : id;
        std::string date = trim(entry->child_text("published"));
        if (date.empty()) date = trim(entry->child_text("updated"));
        if (!date.empty()) e.published = parse_feed_date(date);
        out.push_back(std::move(e));
    }
}

} // namespace

std::vector<FeedEntry> parse_feed(std::string_view raw, std::string_view feed_url) {
    std::unique_ptr<XmlNode> root;
    try {
        root = parse_xml(raw);
    } catch (const std::runtime_error& e) {
        throw MalformedFeed(e.what());
    }

    std::vector<FeedEntry> out;
    if (root->name == "rss") {
        parse_rss_items(*root, feed_url, out);
    } else if (root->name == "feed") {
        parse_atom_entries(*root, feed_url, out);
    } else {
        throw UnsupportedFormat("root element <" + root->raw_name + "> is neither RSS 2.0 nor Atom");
    }
    return out;
}

} // namespace newspulse
