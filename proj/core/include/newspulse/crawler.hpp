#pragma once

#include <map>
#include <string>
#include <vector>

#include "newspulse/store.hpp"

namespace newspulse {

struct RegistryEntry {
    std::string outlet_id;
    std::string feed_url;
    std::string homepage_url;
    std::string county_fips; // 5-digit, zero-padded
    std::string state;       // postal code
};

// CSV with header outlet_id,feed_url,homepage_url,county_fips,state.
std::vector<RegistryEntry> load_registry(const std::string& path);

struct CrawlPolicy {
    int per_host_delay_ms = 5000; // minimum gap between request starts per host
    int retries = 2;              // on transport errors / 5xx; 4xx is terminal
    int backoff_ms = 500;         // doubles per attempt, floored by the host delay
    int timeout_sec = 20;
    int max_parallel_hosts = 8;   // worker threads; hosts never overlap
    size_t min_body_chars = 140;
    std::string user_agent = "newspulse/0.1 (+local news monitor)";
};

struct OutletCounts {
    size_t fetched = 0; // article pages downloaded (not dedup-skipped)
    size_t new_articles = 0;
    size_t failed = 0;  // feed failures, fetch failures, empty bodies
};

struct RequestLogEntry {
    std::string host; // netloc
    std::string url;
    double start_seconds = 0; // monotonic, process-relative
    int status = 0;           // 0 = transport error
};

struct CrawlReport {
    std::map<std::string, OutletCounts> outlets;
    std::vector<RequestLogEntry> request_log;
    std::vector<std::string> errors;

    size_t total_new() const;
    size_t total_failed() const;
};

// One crawl pass: every feed fetched once, new entry links followed and
// their extracted bodies stored. Hosts are crawled concurrently but
// requests to one host are serialized with the configured delay.
// Individual failures are recorded, never thrown.
CrawlReport crawl_cycle(const std::vector<RegistryEntry>& registry, ArticleStore& store,
                        const CrawlPolicy& policy = {});

} // namespace newspulse
