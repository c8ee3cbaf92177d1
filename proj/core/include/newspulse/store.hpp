#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "newspulse/timeutil.hpp"

namespace newspulse {

struct RawArticle {
    std::string outlet_id;
    std::string url; // canonical
    UtcTime fetched_at = 0;
    std::string html; // raw page bytes
    std::string text; // extracted body, markup-free
};

struct StoredArticle {
    std::string article_id; // sha256 of text
    std::string outlet_id;
    std::string url;
    UtcTime fetched_at = 0;
    int published_week = 0;
    std::string text;
    bool is_covid_full = false;
    bool is_covid_limited = false;
};

struct CurationThresholds {
    size_t min_articles = 50;      // retained outlets produce strictly more
    double min_covid_share = 0.10; // open interval on both ends
    double max_covid_share = 0.95;

    void validate() const;
};

enum class IngestResult { Inserted, Duplicate };

// Append-only article store: one newline-delimited record file per
// outlet under articles/, a sidecar hash index (index.ndjson), and a
// classification sidecar (flags.ndjson, last record wins). Writes are
// serialized internally; readers only ever see committed records.
//
// Dedup is scoped to the outlet: the same text syndicated across two
// outlets is stored for both (cross-outlet duplication stays visible),
// while a repeated URL or repeated body within one outlet is rejected.
class ArticleStore {
public:
    explicit ArticleStore(std::string dir);

    // Inserted iff neither the canonical URL nor the content hash is
    // already present for this outlet. `published` falls back to
    // fetched_at.
    IngestResult ingest_article(const RawArticle& raw, std::optional<UtcTime> published);

    bool has_url(const std::string& outlet_id, const std::string& canonical_url) const;
    size_t article_count() const;

    // Sorted by (outlet_id, article_id) for deterministic iteration.
    std::vector<StoredArticle> articles() const;
    std::vector<std::string> outlet_ids() const;

    // Overwrites both flags for the given articles (reclassification).
    void set_flags(const std::vector<std::pair<std::string, std::pair<bool, bool>>>& flags);

    const std::string& dir() const { return dir_; }

private:
    void load();
    std::string outlet_file(const std::string& outlet_id) const;

    std::string dir_;
    mutable std::mutex mu_;
    std::map<std::string, StoredArticle> by_id_;
    std::unordered_set<std::string> urls_;
};

// Applies the outlet-curation filters: article count strictly greater
// than min_articles, full-filter covid share strictly inside
// (min_covid_share, max_covid_share), minus externally excluded outlets
// and outlets whose corpus is predominantly Spanish.
std::set<std::string> curate_outlets(const ArticleStore& store, const CurationThresholds& thresholds,
                                     const std::set<std::string>& excluded);

// Stopword-ratio heuristic over the outlet's concatenated corpus.
bool spanish_dominant(const std::vector<const StoredArticle*>& articles);

} // namespace newspulse
