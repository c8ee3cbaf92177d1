#include <doctest.h>

#include <filesystem>
#include <random>
#include <thread>

#include "newspulse/classify.hpp"
#include "newspulse/errors.hpp"
#include "newspulse/store.hpp"
#include "newspulse/timeutil.hpp"

using namespace newspulse;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("np_store_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

RawArticle make_raw(const std::string& outlet, const std::string& url, const std::string& text) {
    RawArticle raw;
    raw.outlet_id = outlet;
    raw.url = url;
    raw.fetched_at = *parse_date("2020-04-10");
    raw.text = text;
    return raw;
}

} // namespace

TEST_CASE("ingest dedups within an outlet by url and content") {
    TempDir dir;
    ArticleStore store(dir.path.string());

    auto a = make_raw("o1", "http://a.test/1", "First article body text.");
    CHECK(store.ingest_article(a, std::nullopt) == IngestResult::Inserted);
    CHECK(store.ingest_article(a, std::nullopt) == IngestResult::Duplicate);

    // identical text under a second url
    auto b = make_raw("o1", "http://a.test/2", "First article body text.");
    CHECK(store.ingest_article(b, std::nullopt) == IngestResult::Duplicate);

    // distinct text, distinct url
    auto c = make_raw("o1", "http://a.test/3", "A different article body.");
    CHECK(store.ingest_article(c, std::nullopt) == IngestResult::Inserted);

    // the same wire story on a sibling outlet stays visible
    auto d = make_raw("o2", "http://b.test/1", "First article body text.");
    CHECK(store.ingest_article(d, std::nullopt) == IngestResult::Inserted);

    CHECK(store.article_count() == 3);
    CHECK(store.has_url("o1", "http://a.test/1"));
    CHECK_FALSE(store.has_url("o2", "http://a.test/1"));
}

TEST_CASE("store reloads committed records and flags") {
    TempDir dir;
    {
        ArticleStore store(dir.path.string());
        store.ingest_article(make_raw("o1", "http://a.test/1", "Coronavirus case counts rose."),
                             parse_date("2020-04-08"));
        store.ingest_article(make_raw("o1", "http://a.test/2", "The county fair returns."),
                             parse_date("2020-04-09"));
        reclassify_store(store, KeywordFilter::limited(), KeywordFilter::limited());
    }
    ArticleStore reopened(dir.path.string());
    auto articles = reopened.articles();
    REQUIRE(articles.size() == 2);
    int covid = 0;
    for (const auto& a : articles) {
        CHECK(a.published_week == 14); // 2020-04-08 is week 14
        if (a.is_covid_full) ++covid;
    }
    CHECK(covid == 1);
}

TEST_CASE("classify_text examples") {
    KeywordFilter limited = KeywordFilter::limited();

    auto r1 = classify_text("The coronavirus pandemic upended schools.", limited);
    CHECK(r1.match);
    REQUIRE(r1.hits.size() == 1);
    CHECK(r1.hits[0] == "coronavirus");

    CHECK_FALSE(classify_text("", limited).match);
    CHECK_FALSE(classify_text("Officials praised Covidien's donation.", limited).match);

    CHECK(classify_text("COVID-19 cases rose.", limited).match);
    CHECK(classify_text("covid19 update", limited).match);
    CHECK(classify_text("New COVID guidance", limited).match);
}

TEST_CASE("case and hyphen normalization properties") {
    KeywordFilter limited = KeywordFilter::limited();
    // spaces, plain hyphens, and the non-breaking hyphen U+2011 all match
    CHECK(classify_text("sars cov 2 found", limited).match);
    CHECK(classify_text("sars-cov-2 found", limited).match);
    CHECK(classify_text("SARS\xE2\x80\x91" "CoV\xE2\x80\x91" "2 found", limited).match);

    std::string text = "Masks and COVID tests in Dallas";
    std::string upper;
    for (char c : text) upper.push_back(char(std::toupper((unsigned char)c)));
    CHECK(classify_text(text, limited).match == classify_text(upper, limited).match);
}

TEST_CASE("filter loading rejects twitter tokens and enforces the subset") {
    CHECK_THROWS_AS(KeywordFilter::from_terms({"#covid"}, "bad"), Error);
    CHECK_THROWS_AS(KeywordFilter::from_terms({"@cdc"}, "bad"), Error);

    KeywordFilter full = KeywordFilter::from_terms({"pandemic", "quarantine"}, "full");
    CHECK_FALSE(full.contains_all(KeywordFilter::limited()));
    full.ensure_superset_of(KeywordFilter::limited());
    CHECK(full.contains_all(KeywordFilter::limited()));
}

TEST_CASE("multi-word phrases match token subsequences") {
    KeywordFilter f = KeywordFilter::from_terms({"social distancing", "contact tracing"}, "t");
    CHECK(classify_text("New social distancing rules in force", f).match);
    CHECK(classify_text("social-distancing rules", f).match);
    CHECK_FALSE(classify_text("social club, distancing optional", f).match);
}

TEST_CASE("reclassify_store counts and idempotence") {
    TempDir dir;
    ArticleStore store(dir.path.string());
    store.ingest_article(make_raw("o1", "u://1", "covid numbers climbed again"), std::nullopt);
    store.ingest_article(make_raw("o1", "u://2", "coronavirus shutters schools"), std::nullopt);
    store.ingest_article(make_raw("o1", "u://3", "pandemic relief checks arrive"), std::nullopt);
    store.ingest_article(make_raw("o1", "u://4", "the bake sale went well"), std::nullopt);
    store.ingest_article(make_raw("o1", "u://5", "a quiet week at the lake"), std::nullopt);

    KeywordFilter full = KeywordFilter::from_terms(
        {"covid", "covid19", "coronavirus", "sars-cov-2", "pandemic"}, "full");
    auto counts = reclassify_store(store, full, KeywordFilter::limited());
    CHECK(counts.total == 5);
    CHECK(counts.full == 3);
    CHECK(counts.limited == 2);

    auto again = reclassify_store(store, full, KeywordFilter::limited());
    CHECK(again.full == counts.full);
    CHECK(again.limited == counts.limited);

    // empty store
    TempDir dir2;
    ArticleStore empty(dir2.path.string());
    auto zero = reclassify_store(empty, full, KeywordFilter::limited());
    CHECK(zero.total == 0);
    CHECK(zero.full == 0);
}

TEST_CASE("curation thresholds are strict bounds") {
    TempDir dir;
    ArticleStore store(dir.path.string());

    auto fill = [&](const std::string& outlet, int covid, int other) {
        for (int i = 0; i < covid; ++i)
            store.ingest_article(make_raw(outlet, "u://" + outlet + "/c" + std::to_string(i),
                                          outlet + " covid story number " + std::to_string(i)),
                                 std::nullopt);
        for (int i = 0; i < other; ++i)
            store.ingest_article(make_raw(outlet, "u://" + outlet + "/o" + std::to_string(i),
                                          outlet + " plain story number " + std::to_string(i)),
                                 std::nullopt);
    };

    fill("exactly50", 20, 30);   // 50 articles: excluded (strictly more than 50)
    fill("toocovid", 96, 4);     // 96% covid: excluded (>= 95% bound)
    fill("keeper", 40, 60);      // 40% covid on 100 articles: retained
    fill("toolittle", 5, 95);    // 5% covid: excluded
    reclassify_store(store, KeywordFilter::limited(), KeywordFilter::limited());

    CurationThresholds t;
    auto retained = curate_outlets(store, t, {});
    CHECK(retained == std::set<std::string>{"keeper"});

    // external exclusion removes an otherwise-retained outlet
    auto excluded = curate_outlets(store, t, {"keeper"});
    CHECK(excluded.empty());
}

TEST_CASE("curation monotonicity: adding a non-covid article never hurts a low-share outlet") {
    TempDir dir;
    ArticleStore store(dir.path.string());
    // 60 articles, 30% covid: passes min share comfortably
    for (int i = 0; i < 18; ++i)
        store.ingest_article(make_raw("o", "u://c" + std::to_string(i),
                                      "covid article number " + std::to_string(i)),
                             std::nullopt);
    for (int i = 0; i < 42; ++i)
        store.ingest_article(make_raw("o", "u://o" + std::to_string(i),
                                      "ordinary article number " + std::to_string(i)),
                             std::nullopt);
    reclassify_store(store, KeywordFilter::limited(), KeywordFilter::limited());
    CurationThresholds t;
    bool before = curate_outlets(store, t, {}).count("o") > 0;

    store.ingest_article(make_raw("o", "u://extra", "one more ordinary article"), std::nullopt);
    reclassify_store(store, KeywordFilter::limited(), KeywordFilter::limited());
    bool after = curate_outlets(store, t, {}).count("o") > 0;
    CHECK(before);
    CHECK(after);
}

TEST_CASE("concurrent ingest is safe under the single-writer contract") {
    TempDir dir;
    ArticleStore store(dir.path.string());
    const int threads = 4, per_thread = 25;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&store, t] {
            for (int i = 0; i < per_thread; ++i) {
                RawArticle raw;
                raw.outlet_id = "o" + std::to_string(t);
                raw.url = "u://t" + std::to_string(t) + "/" + std::to_string(i);
                raw.fetched_at = 1586277000;
                raw.text = "thread " + std::to_string(t) + " article " + std::to_string(i) +
                           " body text with enough substance to store";
                store.ingest_article(raw, std::nullopt);
            }
        });
    }
    for (auto& th : pool) th.join();
    CHECK(store.article_count() == size_t(threads * per_thread));

    // committed records all reload
    ArticleStore reopened(dir.path.string());
    CHECK(reopened.article_count() == size_t(threads * per_thread));
}

TEST_CASE("spanish-dominant outlets are excluded") {
    TempDir dir;
    ArticleStore store(dir.path.string());
    for (int i = 0; i < 60; ++i) {
        std::string text = i % 3 == 0
            ? "la ciudad anunci\xC3\xB3 que los casos de covid en el condado subieron durante la semana n" + std::to_string(i)
            : "el alcalde dijo que las escuelas de la ciudad van a abrir con las nuevas reglas para los estudiantes n" + std::to_string(i);
        store.ingest_article(make_raw("es_outlet", "u://es/" + std::to_string(i), text), std::nullopt);
    }
    reclassify_store(store, KeywordFilter::limited(), KeywordFilter::limited());
    CurationThresholds t;
    CHECK(curate_outlets(store, t, {}).empty());
}
