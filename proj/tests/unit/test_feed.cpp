#include <doctest.h>

#include "newspulse/errors.hpp"
#include "newspulse/feed.hpp"

using namespace newspulse;

namespace {

const char* kRss = R"(<?xml version="1.0" encoding="UTF-8"?>
<rss version="2.0"><channel>
  <title>Example Gazette</title>
  <item>
    <title>School board votes</title>
    <link>http://gazette.test/story/1?utm_source=rss</link>
    <guid isPermaLink="false">gazette-1</guid>
    <pubDate>Tue, 07 Apr 2020 16:30:00 GMT</pubDate>
  </item>
</channel></rss>)";

const char* kAtom = R"(<?xml version="1.0"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <title>Example Ledger</title>
  <entry>
    <title>First</title>
    <id>urn:ledger:1</id>
    <link rel="alternate" href="http://ledger.test/a"/>
    <published>2020-04-07T10:00:00Z</published>
  </entry>
  <entry>
    <title>Second</title>
    <id>urn:ledger:2</id>
    <link href="http://ledger.test/b"/>
    <updated>2020-04-08T10:00:00Z</updated>
  </entry>
</feed>)";

} // namespace

TEST_CASE("rss 2.0 items parse with guid, link and date") {
    auto entries = parse_feed(kRss, "http://gazette.test/rss.xml");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].item_guid == "gazette-1");
    CHECK(entries[0].link == "http://gazette.test/story/1?utm_source=rss");
    CHECK(entries[0].title == "School board votes");
    REQUIRE(entries[0].published.has_value());
    CHECK(*entries[0].published == 1586277000);
}

TEST_CASE("atom entries parse in document order") {
    auto entries = parse_feed(kAtom, "http://ledger.test/atom.xml");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].link == "http://ledger.test/a");
    CHECK(entries[1].link == "http://ledger.test/b");
    CHECK(entries[0].item_guid == "urn:ledger:1");
    REQUIRE(entries[1].published.has_value()); // falls back to <updated>
}

TEST_CASE("guid falls back to the link and missing pubDate stays absent") {
    auto entries = parse_feed(
        "<rss version=\"2.0\"><channel><item><link>http://x.test/a</link></item></channel></rss>");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].item_guid == "http://x.test/a");
    CHECK_FALSE(entries[0].published.has_value());
}

TEST_CASE("relative item links resolve against the feed url") {
    auto entries = parse_feed(
        "<rss version=\"2.0\"><channel><item><link>/story/9</link></item></channel></rss>",
        "http://town.test/feeds/rss.xml");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].link == "http://town.test/story/9");
}

TEST_CASE("items without a resolvable absolute link are dropped") {
    auto entries = parse_feed(
        "<rss version=\"2.0\"><channel><item><link>story/9</link></item>"
        "<item><link>http://ok.test/a</link></item></channel></rss>");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].link == "http://ok.test/a");
}

TEST_CASE("truncated document raises MalformedFeed") {
    std::string cut(kRss, 120);
    CHECK_THROWS_AS(parse_feed(cut), MalformedFeed);
    CHECK_THROWS_AS(parse_feed("<rss version=\"2.0\"><channel><item></channel></rss>"), MalformedFeed);
}

TEST_CASE("non-feed roots raise UnsupportedFormat") {
    CHECK_THROWS_AS(parse_feed("<html><body>hi</body></html>"), UnsupportedFormat);
    CHECK_THROWS_AS(parse_feed("<rdf:RDF xmlns:rdf=\"x\"></rdf:RDF>"), UnsupportedFormat);
}

TEST_CASE("cdata and entities decode in titles") {
    auto entries = parse_feed(
        "<rss version=\"2.0\"><channel><item>"
        "<title><![CDATA[Fire & rescue]]></title><link>http://x.test/f</link></item>"
        "<item><title>A &amp; B &#8212; C</title><link>http://x.test/g</link></item>"
        "</channel></rss>");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].title == "Fire & rescue");
    CHECK(entries[1].title == "A & B \xE2\x80\x94 C");
}
