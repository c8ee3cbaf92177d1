#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newspulse/timeutil.hpp"

namespace newspulse {

struct FeedEntry {
    std::string feed_url;
    std::string item_guid; // falls back to the link when the feed has no guid/id
    std::string link;      // absolute URL
    std::string title;
    std::optional<UtcTime> published;
};

// Parses an RSS 2.0 or Atom 1.0 document. Entries appear in document
// order; items without an absolute link are dropped (a feed-level base
// URL, when supplied, is used to resolve relative links first).
//
// Throws MalformedFeed for ill-formed markup and UnsupportedFormat when
// the root element is neither <rss> nor <feed>.
std::vector<FeedEntry> parse_feed(std::string_view raw, std::string_view feed_url = {});

} // namespace newspulse
