#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <thread>

#include <httplib.h>

#include "newspulse/crawler.hpp"
#include "newspulse/csv.hpp"

using namespace newspulse;
namespace fs = std::filesystem;

namespace {

std::string article_html(const std::string& title, int idx) {
    return "<html><head><title>" + title + "</title></head><body>"
           "<nav><a href=\"/\">Home</a><a href=\"/about\">About</a></nav>"
           "<article><h1>" + title + "</h1>"
           "<p>Town officials met on Tuesday to discuss item number " + std::to_string(idx) +
           " on this week's agenda, with residents raising questions about road repair, "
           "school schedules, and the county health department's latest guidance.</p>"
           "<p>The board voted to continue the discussion next week after hearing from "
           "staff about budget constraints and the timeline for the proposed projects.</p>"
           "</article><footer>Contact | Privacy</footer></body></html>";
}

std::string feed_xml(const std::string& origin, const std::string& prefix, int items) {
    std::string xml = "<?xml version=\"1.0\"?><rss version=\"2.0\"><channel><title>T</title>";
    for (int i = 0; i < items; ++i) {
        xml += "<item><title>Story " + std::to_string(i) + "</title>"
               "<link>" + origin + "/" + prefix + "/" + std::to_string(i) + "</link>"
               "<guid>" + prefix + "-" + std::to_string(i) + "</guid>"
               "<pubDate>Tue, 07 Apr 2020 1" + std::to_string(i % 10) + ":00:00 GMT</pubDate></item>";
    }
    return xml + "</channel></rss>";
}

struct TestServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;
    std::atomic<int> flaky_hits{0};

    std::string origin() const { return "http://127.0.0.1:" + std::to_string(port); }

    TestServer() {
        server.Get("/feedA.xml", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(feed_xml(origin(), "a", 3), "application/rss+xml");
        });
        server.Get("/feedB.xml", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(feed_xml(origin(), "b", 2), "application/rss+xml");
        });
        server.Get("/feedEmptyBody.xml", [this](const httplib::Request&, httplib::Response& res) {
            std::string xml = "<?xml version=\"1.0\"?><rss version=\"2.0\"><channel>";
            xml += "<item><link>" + origin() + "/a/0</link></item>";
            xml += "<item><link>" + origin() + "/a/1</link></item>";
            xml += "<item><link>" + origin() + "/teaser</link></item>";
            xml += "</channel></rss>";
            res.set_content(xml, "application/rss+xml");
        });
        server.Get("/feed500.xml", [](const httplib::Request&, httplib::Response& res) {
            res.status = 500;
        });
        server.Get("/feedFlaky.xml", [this](const httplib::Request&, httplib::Response& res) {
            if (flaky_hits.fetch_add(1) == 0) res.status = 503;
            else res.set_content(feed_xml(origin(), "a", 1), "application/rss+xml");
        });
        server.Get("/feedMissing.xml", [this](const httplib::Request&, httplib::Response& res) {
            std::string xml = "<?xml version=\"1.0\"?><rss version=\"2.0\"><channel><item><link>" +
                              origin() + "/gone</link></item></channel></rss>";
            res.set_content(xml, "application/rss+xml");
        });
        server.Get(R"(/a/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
            res.set_content(article_html("Alpha story " + req.matches[1].str(),
                                         std::stoi(req.matches[1].str())),
                            "text/html; charset=utf-8");
        });
        server.Get(R"(/b/(\d+))", [](const httplib::Request& req, httplib::Response& res) {
            res.set_content(article_html("Beta story " + req.matches[1].str(),
                                         std::stoi(req.matches[1].str()) + 100),
                            "text/html; charset=utf-8");
        });
        server.Get("/teaser", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html><body><p>Subscribe now.</p></body></html>", "text/html");
        });
        server.Get("/gone", [](const httplib::Request&, httplib::Response& res) {
            res.status = 404;
        });

        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~TestServer() {
        server.stop();
        thread.join();
    }
};

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("np_crawl_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

CrawlPolicy fast_policy() {
    CrawlPolicy policy;
    policy.per_host_delay_ms = 5;
    policy.backoff_ms = 5;
    policy.timeout_sec = 5;
    return policy;
}

} // namespace

TEST_CASE("crawl ingests new articles and dedups on the second pass") {
    TestServer srv;
    TempDir dir;
    ArticleStore store(dir.path.string());
    std::vector<RegistryEntry> registry = {
        {"alpha", srv.origin() + "/feedA.xml", srv.origin(), "01001", "AL"},
        {"beta", srv.origin() + "/feedB.xml", srv.origin(), "01003", "AL"},
    };

    CrawlReport first = crawl_cycle(registry, store, fast_policy());
    CHECK(first.outlets["alpha"].new_articles == 3);
    CHECK(first.outlets["beta"].new_articles == 2);
    CHECK(first.outlets["alpha"].failed == 0);
    CHECK(store.article_count() == 5);

    for (const auto& a : store.articles()) {
        CHECK(a.published_week == 13); // 2020-04-07 is day 97, week 13
        CHECK(a.text.find("road repair") != std::string::npos);
        CHECK(a.text.find("Privacy") == std::string::npos);
    }

    CrawlReport second = crawl_cycle(registry, store, fast_policy());
    CHECK(second.total_new() == 0);
    CHECK(second.outlets["alpha"].fetched == 0); // dedup short-circuits the fetch
    CHECK(store.article_count() == 5);
}

TEST_CASE("a failing feed does not affect other outlets") {
    TestServer srv;
    TempDir dir;
    ArticleStore store(dir.path.string());
    std::vector<RegistryEntry> registry = {
        {"broken", srv.origin() + "/feed500.xml", srv.origin(), "01001", "AL"},
        {"beta", srv.origin() + "/feedB.xml", srv.origin(), "01003", "AL"},
    };
    CrawlReport report = crawl_cycle(registry, store, fast_policy());
    CHECK(report.outlets["broken"].failed == 1);
    CHECK(report.outlets["broken"].new_articles == 0);
    CHECK(report.outlets["beta"].new_articles == 2);
}

TEST_CASE("snippet-only pages count as failures, the rest are stored") {
    TestServer srv;
    TempDir dir;
    ArticleStore store(dir.path.string());
    std::vector<RegistryEntry> registry = {
        {"mixed", srv.origin() + "/feedEmptyBody.xml", srv.origin(), "01001", "AL"},
    };
    CrawlReport report = crawl_cycle(registry, store, fast_policy());
    CHECK(report.outlets["mixed"].new_articles == 2);
    CHECK(report.outlets["mixed"].failed == 1);
    CHECK(report.outlets["mixed"].fetched == 3);
}

TEST_CASE("politeness: consecutive request starts per host respect the delay") {
    TestServer srv;
    TempDir dir;
    ArticleStore store(dir.path.string());
    CrawlPolicy policy = fast_policy();
    policy.per_host_delay_ms = 40;
    std::vector<RegistryEntry> registry = {
        {"alpha", srv.origin() + "/feedA.xml", srv.origin(), "01001", "AL"},
    };
    CrawlReport report = crawl_cycle(registry, store, policy);
    REQUIRE(report.request_log.size() >= 4); // feed + 3 articles

    std::map<std::string, std::vector<double>> starts;
    for (const auto& entry : report.request_log) starts[entry.host].push_back(entry.start_seconds);
    for (auto& [host, times] : starts) {
        std::sort(times.begin(), times.end());
        for (size_t i = 1; i < times.size(); ++i)
            CHECK(times[i] - times[i - 1] >= 0.040 - 1e-4);
    }
}

TEST_CASE("transient errors retry with backoff, 4xx is terminal") {
    TestServer srv;
    TempDir dir;
    ArticleStore store(dir.path.string());
    std::vector<RegistryEntry> registry = {
        {"flaky", srv.origin() + "/feedFlaky.xml", srv.origin(), "01001", "AL"},
        {"missing", srv.origin() + "/feedMissing.xml", srv.origin(), "01003", "AL"},
    };
    CrawlReport report = crawl_cycle(registry, store, fast_policy());

    // 503 then success on the retry
    CHECK(report.outlets["flaky"].new_articles == 1);
    CHECK(report.outlets["flaky"].failed == 0);
    int flaky_feed_hits = 0, gone_hits = 0;
    for (const auto& entry : report.request_log) {
        if (entry.url.find("feedFlaky") != std::string::npos) ++flaky_feed_hits;
        if (entry.url.find("/gone") != std::string::npos) ++gone_hits;
    }
    CHECK(flaky_feed_hits == 2);

    // 404 article: one attempt, no retries
    CHECK(gone_hits == 1);
    CHECK(report.outlets["missing"].failed == 1);
}
