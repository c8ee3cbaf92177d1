#include "newspulse/crawler.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"
#include "newspulse/feed.hpp"
#include "newspulse/html_text.hpp"
#include "newspulse/http.hpp"
#include "newspulse/url.hpp"

namespace newspulse {

std::vector<RegistryEntry> load_registry(const std::string& path) {
    std::vector<RegistryEntry> out;
    for_each_csv_row(path, {"outlet_id", "feed_url", "homepage_url", "county_fips", "state"},
                     [&](const auto& row, size_t) {
                         RegistryEntry e;
                         e.outlet_id = std::string(row.at("outlet_id"));
                         e.feed_url = std::string(row.at("feed_url"));
                         e.homepage_url = std::string(row.at("homepage_url"));
                         e.county_fips = std::string(row.at("county_fips"));
                         e.state = std::string(row.at("state"));
                         out.push_back(std::move(e));
                     });
    return out;
}

size_t CrawlReport::total_new() const {
    size_t n = 0;
    for (const auto& [id, c] : outlets) n += c.new_articles;
    return n;
}

size_t CrawlReport::total_failed() const {
    size_t n = 0;
    for (const auto& [id, c] : outlets) n += c.failed;
    return n;
}

namespace {

using Clock = std::chrono::steady_clock;
using Task = std::function<void()>;

// Per-host FIFO executor: hosts run concurrently on a worker pool, but a
// host is never served by two workers at once and consecutive task
// starts on one host honor the politeness delay.
class HostScheduler {
public:
    HostScheduler(int workers, int delay_ms) : workers_(workers), delay_(delay_ms) {}

    void post(const std::string& host, Task task, int extra_delay_ms = 0) {
        std::lock_guard lock(mu_);
        HostQueue& q = queues_[host];
        q.tasks.push_back(std::move(task));
        if (extra_delay_ms > 0) {
            auto candidate = Clock::now() + std::chrono::milliseconds(extra_delay_ms);
            if (candidate > q.next_allowed) q.next_allowed = candidate;
        }
        ++pending_;
        cv_.notify_all();
    }

    void run() {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers_; ++i) pool.emplace_back([this] { worker(); });
        for (auto& t : pool) t.join();
    }

private:
    struct HostQueue {
        std::deque<Task> tasks;
        bool busy = false;
        Clock::time_point next_allowed = Clock::time_point::min();
    };

    void worker() {
        std::unique_lock lock(mu_);
        for (;;) {
            if (pending_ == 0) {
                cv_.notify_all();
                return;
            }
            auto now = Clock::now();
            HostQueue* chosen = nullptr;
            std::string chosen_host;
            auto earliest = Clock::time_point::max();
            for (auto& [host, q] : queues_) {
                if (q.busy || q.tasks.empty()) continue;
                if (q.next_allowed <= now) {
                    chosen = &q;
                    chosen_host = host;
                    break;
                }
                earliest = std::min(earliest, q.next_allowed);
            }
            if (!chosen) {
                if (earliest == Clock::time_point::max()) cv_.wait(lock);
                else cv_.wait_until(lock, earliest);
                continue;
            }

            Task task = std::move(chosen->tasks.front());
            chosen->tasks.pop_front();
            chosen->busy = true;
            auto start = Clock::now();
            chosen->next_allowed = start + std::chrono::milliseconds(delay_);
            lock.unlock();

            task();

            lock.lock();
            queues_[chosen_host].busy = false;
            --pending_;
            cv_.notify_all();
        }
    }

    int workers_;
    int delay_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::map<std::string, HostQueue> queues_;
    size_t pending_ = 0;
};

struct CrawlContext {
    CrawlContext(const CrawlPolicy& p, ArticleStore& s) : policy(p), store(s) {}

    const CrawlPolicy& policy;
    ArticleStore& store;
    CrawlReport report;
    std::mutex report_mu;
    std::set<std::string> queued_urls; // canonical, this cycle
    Clock::time_point t0 = Clock::now();
    HostScheduler* scheduler = nullptr;

    double elapsed(Clock::time_point t) const {
        return std::chrono::duration<double>(t - t0).count();
    }

    void log_request(const std::string& host, const std::string& url, Clock::time_point start,
                     int status) {
        std::lock_guard lock(report_mu);
        report.request_log.push_back({host, url, elapsed(start), status});
    }

    void record_error(const std::string& msg) {
        std::lock_guard lock(report_mu);
        report.errors.push_back(msg);
    }

    void bump(const std::string& outlet, size_t OutletCounts::* field, size_t delta = 1) {
        std::lock_guard lock(report_mu);
        report.outlets[outlet].*field += delta;
    }
};

bool retryable(const FetchResult& r) { return !r.transport_ok || r.status >= 500; }

FetchOptions fetch_options(const CrawlPolicy& policy) {
    FetchOptions o;
    o.timeout_sec = policy.timeout_sec;
    o.user_agent = policy.user_agent;
    return o;
}

void post_article_task(CrawlContext& ctx, const std::string& outlet_id, const FeedEntry& entry,
                       int attempt);

void handle_feed_body(CrawlContext& ctx, const RegistryEntry& reg, const FetchResult& fetched) {
    std::vector<FeedEntry> entries;
    try {
        entries = parse_feed(fetched.body, reg.feed_url);
    } catch (const Error& e) {
        ctx.bump(reg.outlet_id, &OutletCounts::failed);
        ctx.record_error(reg.outlet_id + ": " + e.what());
        return;
    }
    for (const auto& entry : entries) {
        std::string canonical = canonical_url(entry.link);
        if (ctx.store.has_url(reg.outlet_id, canonical)) continue;
        {
            std::lock_guard lock(ctx.report_mu);
            if (!ctx.queued_urls.insert(reg.outlet_id + "\n" + canonical).second) continue;
        }
        FeedEntry queued = entry;
        queued.link = canonical;
        post_article_task(ctx, reg.outlet_id, queued, 0);
    }
}

void post_feed_task(CrawlContext& ctx, const RegistryEntry& reg, int attempt) {
    auto parts = parse_url(reg.feed_url);
    if (!parts) {
        ctx.bump(reg.outlet_id, &OutletCounts::failed);
        ctx.record_error(reg.outlet_id + ": bad feed URL " + reg.feed_url);
        return;
    }
    std::string host = parts->netloc();
    int extra = attempt > 0 ? ctx.policy.backoff_ms * (1 << (attempt - 1)) : 0;
    ctx.scheduler->post(host, [&ctx, reg, attempt, host] {
        auto start = Clock::now();
        FetchResult r = http_get_once(reg.feed_url, fetch_options(ctx.policy));
        ctx.log_request(host, reg.feed_url, start, r.transport_ok ? r.status : 0);

        if (retryable(r) && attempt < ctx.policy.retries) {
            post_feed_task(ctx, reg, attempt + 1);
            return;
        }
        if (!r.transport_ok || r.status >= 400) {
            ctx.bump(reg.outlet_id, &OutletCounts::failed);
            ctx.record_error(reg.outlet_id + ": feed fetch failed (" +
                             (r.transport_ok ? "HTTP " + std::to_string(r.status) : r.error) + ")");
            return;
        }
        handle_feed_body(ctx, reg, r);
    }, extra);
}

void post_article_task(CrawlContext& ctx, const std::string& outlet_id, const FeedEntry& entry,
                       int attempt) {
    auto parts = parse_url(entry.link);
    if (!parts) {
        ctx.bump(outlet_id, &OutletCounts::failed);
        return;
    }
    std::string host = parts->netloc();
    int extra = attempt > 0 ? ctx.policy.backoff_ms * (1 << (attempt - 1)) : 0;
    ctx.scheduler->post(host, [&ctx, outlet_id, entry, attempt, host] {
        auto start = Clock::now();
        FetchResult r = http_get_once(entry.link, fetch_options(ctx.policy));
        ctx.log_request(host, entry.link, start, r.transport_ok ? r.status : 0);
        if (attempt == 0) ctx.bump(outlet_id, &OutletCounts::fetched);

        if (retryable(r) && attempt < ctx.policy.retries) {
            post_article_task(ctx, outlet_id, entry, attempt + 1);
            return;
        }
        if (!r.transport_ok || r.status >= 400) {
            ctx.bump(outlet_id, &OutletCounts::failed);
            ctx.record_error(outlet_id + ": " + entry.link + " failed (" +
                             (r.transport_ok ? "HTTP " + std::to_string(r.status) : r.error) + ")");
            return;
        }

        RawArticle raw;
        raw.outlet_id = outlet_id;
        raw.url = entry.link;
        raw.fetched_at = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
        raw.html = r.body;
        ExtractOptions opts;
        opts.min_body_chars = ctx.policy.min_body_chars;
        try {
            raw.text = extract_text(r.body, charset_from_content_type(r.content_type), opts);
        } catch (const EmptyBody&) {
            ctx.bump(outlet_id, &OutletCounts::failed);
            ctx.record_error(outlet_id + ": " + entry.link + " has no article body");
            return;
        }
        if (ctx.store.ingest_article(raw, entry.published) == IngestResult::Inserted)
            ctx.bump(outlet_id, &OutletCounts::new_articles);
    }, extra);
}

} // namespace

CrawlReport crawl_cycle(const std::vector<RegistryEntry>& registry, ArticleStore& store,
                        const CrawlPolicy& policy) {
    HostScheduler scheduler(std::max(1, policy.max_parallel_hosts), policy.per_host_delay_ms);
    CrawlContext ctx{policy, store};
    ctx.scheduler = &scheduler;

    for (const auto& reg : registry) {
        ctx.report.outlets[reg.outlet_id]; // present even when nothing happens
        post_feed_task(ctx, reg, 0);
    }
    scheduler.run();
    return ctx.report;
}

} // namespace newspulse
