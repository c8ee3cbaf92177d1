#include "newspulse/store.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "newspulse/errors.hpp"
#include "newspulse/sha256.hpp"
#include "newspulse/textnorm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace newspulse {

void CurationThresholds::validate() const {
    if (!(0.0 <= min_covid_share && min_covid_share < max_covid_share && max_covid_share <= 1.0))
        throw Error("CurationThresholds: need 0 <= min_covid_share < max_covid_share <= 1");
}

namespace {

std::string sanitize_outlet(const std::string& outlet_id) {
    std::string out;
    out.reserve(outlet_id.size());
    for (char c : outlet_id) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') out.push_back(c);
        else out.push_back('_');
    }
    return out.empty() ? "_" : out;
}

void append_line(const std::string& path, const std::string& line) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw StoreUnavailable("cannot append to " + path);
    out << line << '\n';
    out.flush();
    if (!out) throw StoreUnavailable("short write to " + path);
}

} // namespace

ArticleStore::ArticleStore(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(fs::path(dir_) / "articles", ec);
    if (ec) throw StoreUnavailable(dir_ + ": " + ec.message());
    load();
}

std::string ArticleStore::outlet_file(const std::string& outlet_id) const {
    return (fs::path(dir_) / "articles" / (sanitize_outlet(outlet_id) + ".ndjson")).string();
}

void ArticleStore::load() {
    std::lock_guard lock(mu_);
    by_id_.clear();
    urls_.clear();

    fs::path articles_dir = fs::path(dir_) / "articles";
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(articles_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".ndjson") files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json rec = json::parse(line, nullptr, false);
            if (rec.is_discarded()) continue; // torn tail write
            StoredArticle a;
            a.article_id = rec.value("id", "");
            a.outlet_id = rec.value("outlet", "");
            a.url = rec.value("url", "");
            a.fetched_at = rec.value("fetched", int64_t(0));
            a.published_week = rec.value("week", 0);
            a.text = rec.value("text", "");
            if (a.article_id.empty() || a.text.empty()) continue;
            urls_.insert(a.outlet_id + "\n" + a.url);
            by_id_.emplace(a.article_id, std::move(a));
        }
    }

    fs::path flags_path = fs::path(dir_) / "flags.ndjson";
    if (fs::exists(flags_path)) {
        std::ifstream in(flags_path, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json rec = json::parse(line, nullptr, false);
            if (rec.is_discarded()) continue;
            auto it = by_id_.find(rec.value("id", ""));
            if (it == by_id_.end()) continue;
            it->second.is_covid_full = rec.value("full", false);
            it->second.is_covid_limited = rec.value("limited", false);
        }
    }
}

IngestResult ArticleStore::ingest_article(const RawArticle& raw, std::optional<UtcTime> published) {
    if (raw.text.empty()) throw Error("ingest_article: empty text");
    // Content hash keyed by outlet, so sibling outlets may carry the
    // same syndicated body.
    std::string article_id = Sha256::hex(raw.outlet_id + "\n" + raw.text);

    std::lock_guard lock(mu_);
    if (urls_.count(raw.outlet_id + "\n" + raw.url) || by_id_.count(article_id))
        return IngestResult::Duplicate;

    StoredArticle a;
    a.article_id = article_id;
    a.outlet_id = raw.outlet_id;
    a.url = raw.url;
    a.fetched_at = raw.fetched_at;
    a.published_week = week_index(published.value_or(raw.fetched_at));
    a.text = raw.text;

    json rec = {
        {"id", a.article_id}, {"outlet", a.outlet_id}, {"url", a.url},
        {"fetched", a.fetched_at}, {"week", a.published_week}, {"text", a.text},
    };
    append_line(outlet_file(a.outlet_id), rec.dump());

    json idx = {{"id", a.article_id}, {"url_sha", Sha256::hex(a.outlet_id + "\n" + a.url)}};
    append_line((fs::path(dir_) / "index.ndjson").string(), idx.dump());

    urls_.insert(a.outlet_id + "\n" + a.url);
    by_id_.emplace(a.article_id, std::move(a));
    return IngestResult::Inserted;
}

bool ArticleStore::has_url(const std::string& outlet_id, const std::string& canonical_url) const {
    std::lock_guard lock(mu_);
    return urls_.count(outlet_id + "\n" + canonical_url) > 0;
}

size_t ArticleStore::article_count() const {
    std::lock_guard lock(mu_);
    return by_id_.size();
}

std::vector<StoredArticle> ArticleStore::articles() const {
    std::lock_guard lock(mu_);
    std::vector<StoredArticle> out;
    out.reserve(by_id_.size());
    for (const auto& [id, a] : by_id_) out.push_back(a);
    std::sort(out.begin(), out.end(), [](const StoredArticle& x, const StoredArticle& y) {
        if (x.outlet_id != y.outlet_id) return x.outlet_id < y.outlet_id;
        return x.article_id < y.article_id;
    });
    return out;
}

std::vector<std::string> ArticleStore::outlet_ids() const {
    std::lock_guard lock(mu_);
    std::set<std::string> ids;
    for (const auto& [id, a] : by_id_) ids.insert(a.outlet_id);
    return {ids.begin(), ids.end()};
}

void ArticleStore::set_flags(const std::vector<std::pair<std::string, std::pair<bool, bool>>>& flags) {
    std::lock_guard lock(mu_);
    std::string lines;
    for (const auto& [id, fl] : flags) {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) continue;
        it->second.is_covid_full = fl.first;
        it->second.is_covid_limited = fl.second;
        json rec = {{"id", id}, {"full", fl.first}, {"limited", fl.second}};
        lines += rec.dump();
        lines += '\n';
    }
    std::ofstream out(fs::path(dir_) / "flags.ndjson", std::ios::binary | std::ios::app);
    if (!out) throw StoreUnavailable("cannot append flags in " + dir_);
    out << lines;
}

namespace {

// Top function words; enough signal to separate the two languages at
// the corpus level.
const std::vector<std::string>& spanish_stopwords() {
    static const std::vector<std::string> kWords = {
        "de", "la", "que", "el", "en", "los", "del", "se", "las", "por",
        "un", "para", "con", "una", "su", "al", "lo", "como", "más", "pero",
        "sus", "le", "ya", "o", "este", "sí", "porque", "esta", "entre", "cuando",
        "muy", "sin", "sobre", "también", "me", "hasta", "hay", "donde", "quien", "desde",
        "todo", "nos", "durante", "todos", "uno", "les", "ni", "contra", "otros", "ese",
    };
    return kWords;
}

const std::vector<std::string>& english_stopwords() {
    static const std::vector<std::string> kWords = {
        "the", "of", "and", "to", "in", "a", "is", "that", "it", "was",
        "for", "on", "are", "as", "with", "his", "they", "at", "be", "this",
        "have", "from", "or", "had", "by", "not", "but", "what", "were", "we",
        "when", "your", "can", "said", "there", "an", "which", "their", "if", "will",
        "each", "about", "how", "up", "out", "them", "she", "he", "has", "its",
    };
    return kWords;
}

} // namespace

bool spanish_dominant(const std::vector<const StoredArticle*>& articles) {
    std::unordered_set<std::string> es(spanish_stopwords().begin(), spanish_stopwords().end());
    std::unordered_set<std::string> en(english_stopwords().begin(), english_stopwords().end());
    size_t es_hits = 0, en_hits = 0, total = 0;
    for (const StoredArticle* a : articles) {
        std::string norm = normalize_for_match(a->text);
        for (const auto& tok : word_tokens(norm)) {
            ++total;
            if (es.count(tok)) ++es_hits;
            if (en.count(tok)) ++en_hits;
        }
    }
    if (total == 0) return false;
    return es_hits > en_hits;
}

std::set<std::string> curate_outlets(const ArticleStore& store, const CurationThresholds& thresholds,
                                     const std::set<std::string>& excluded) {
    thresholds.validate();

    std::map<std::string, std::vector<const StoredArticle*>> by_outlet;
    auto articles = store.articles();
    for (const auto& a : articles) by_outlet[a.outlet_id].push_back(&a);

    std::set<std::string> retained;
    for (const auto& [outlet, arts] : by_outlet) {
        if (excluded.count(outlet)) continue;
        if (arts.size() <= thresholds.min_articles) continue;
        size_t covid = 0;
        for (const StoredArticle* a : arts)
            if (a->is_covid_full) ++covid;
        double share = double(covid) / double(arts.size());
        if (!(share > thresholds.min_covid_share && share < thresholds.max_covid_share)) continue;
        if (spanish_dominant(arts)) continue;
        retained.insert(outlet);
    }
    return retained;
}

} // namespace newspulse
