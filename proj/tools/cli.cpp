#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "newspulse/agreement.hpp"
#include "newspulse/classify.hpp"
#include "newspulse/config.hpp"
#include "newspulse/crawler.hpp"
#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"
#include "newspulse/geolink.hpp"
#include "newspulse/glm.hpp"
#include "newspulse/panel.hpp"
#include "newspulse/report.hpp"
#include "newspulse/spline.hpp"
#include "newspulse/store.hpp"
#include "newspulse/topics.hpp"

namespace newspulse::cli {

namespace {

namespace fs = std::filesystem;
using SteadyClock = std::chrono::steady_clock;

struct StageTimer {
    std::string name;
    SteadyClock::time_point start = SteadyClock::now();

    void done(size_t inputs, size_t outputs) const {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(SteadyClock::now() - start);
        std::printf("stage=%s wall_ms=%lld in=%zu out=%zu\n", name.c_str(),
                    static_cast<long long>(ms.count()), inputs, outputs);
    }
};

struct CommonArgs {
    std::string config_path;
    std::string seed_override;
};

Config load_config(const CommonArgs& args) {
    if (args.config_path.empty()) throw ConfigError("--config is required for this subcommand");
    return Config::load(args.config_path);
}

uint64_t run_seed(const Config& cfg, const CommonArgs& args) {
    if (!args.seed_override.empty()) return std::stoull(args.seed_override);
    return uint64_t(cfg.get_int("run", "seed", 42));
}

std::string out_dir(const Config& cfg) { return cfg.path("outdir", "out"); }

KeywordFilter load_full_filter(const Config& cfg) {
    cfg.require_paths({"keywords_full"});
    KeywordFilter full = KeywordFilter::load(cfg.path("keywords_full"), "full");
    full.ensure_superset_of(KeywordFilter::limited());
    return full;
}

std::set<std::string> load_retained(const std::string& store_dir) {
    std::set<std::string> retained;
    std::ifstream in(fs::path(store_dir) / "retained.txt");
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) retained.insert(line);
    }
    return retained;
}

std::set<std::string> retained_or_all(const ArticleStore& store) {
    auto retained = load_retained(store.dir());
    if (!retained.empty()) return retained;
    std::fprintf(stderr, "note: no curation result in store; using all outlets\n");
    auto ids = store.outlet_ids();
    return {ids.begin(), ids.end()};
}

ProfileInputs load_profile_inputs(const Config& cfg) {
    cfg.require_paths({"votes_2020", "population", "cre"});
    ProfileInputs inputs;
    inputs.votes_2020 = load_votes(cfg.path("votes_2020"));
    if (!cfg.path("votes_2016").empty()) inputs.votes_2016 = load_votes(cfg.path("votes_2016"));
    inputs.population = load_population(cfg.path("population"));
    inputs.cre = load_cre(cfg.path("cre"));
    if (!cfg.path("ranks").empty()) inputs.ranks = load_ranks(cfg.path("ranks"));
    return inputs;
}

std::map<std::string, OutletProfile> profiles_for(const Config& cfg,
                                                  const std::vector<RegistryEntry>& registry,
                                                  ProfileSet* details = nullptr) {
    ProfileInputs inputs = load_profile_inputs(cfg);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& r : registry) pairs.emplace_back(r.outlet_id, r.county_fips);
    ProfileSet set = build_profiles(pairs, inputs);
    if (details) *details = set;
    return set.profiles;
}

struct CorpusDocs {
    std::vector<std::string> texts;
    std::vector<int> weeks;
    std::vector<std::string> outlet_ids;
};

// Deterministic document order shared by `topics` and `report`.
CorpusDocs collect_docs(const ArticleStore& store, const std::set<std::string>& retained) {
    CorpusDocs docs;
    for (const auto& a : store.articles()) {
        if (!retained.count(a.outlet_id)) continue;
        docs.texts.push_back(a.text);
        docs.weeks.push_back(a.published_week);
        docs.outlet_ids.push_back(a.outlet_id);
    }
    return docs;
}

// ---------------------------------------------------------------- crawl

int cmd_crawl(const CommonArgs& common, const std::string& registry_path,
              const std::string& store_dir, bool once, int delay_override_ms) {
    Config cfg;
    if (!common.config_path.empty()) cfg = Config::load(common.config_path);

    std::string registry_file = !registry_path.empty() ? registry_path : cfg.path("registry");
    std::string store_path = !store_dir.empty() ? store_dir : cfg.path("store");
    if (registry_file.empty() || store_path.empty())
        throw ConfigError("crawl needs --registry and --store (or [paths] in the config)");

    auto registry = load_registry(registry_file);
    ArticleStore store(store_path);

    CrawlPolicy policy;
    policy.per_host_delay_ms = int(cfg.get_int("crawl", "per_host_delay_ms", policy.per_host_delay_ms));
    policy.retries = int(cfg.get_int("crawl", "retries", policy.retries));
    policy.timeout_sec = int(cfg.get_int("crawl", "timeout_sec", policy.timeout_sec));
    policy.max_parallel_hosts = int(cfg.get_int("crawl", "max_parallel_hosts", policy.max_parallel_hosts));
    if (delay_override_ms >= 0) policy.per_host_delay_ms = delay_override_ms;

    long interval_hours = cfg.get_int("crawl", "interval_hours", 12);
    for (;;) {
        StageTimer timer{"crawl"};
        CrawlReport report = crawl_cycle(registry, store, policy);
        for (const auto& err : report.errors) std::fprintf(stderr, "warn: %s\n", err.c_str());
        timer.done(registry.size(), report.total_new());
        if (once) break;
        std::this_thread::sleep_for(std::chrono::hours(interval_hours));
    }
    return 0;
}

// -------------------------------------------------------------- classify

int cmd_classify(const CommonArgs& common) {
    Config cfg = load_config(common);
    cfg.require_paths({"store"});
    StageTimer timer{"classify"};

    ArticleStore store(cfg.path("store"));
    KeywordFilter full = load_full_filter(cfg);
    ReclassifyCounts counts = reclassify_store(store, full, KeywordFilter::limited());
    std::printf("classified total=%zu full=%zu limited=%zu\n", counts.total, counts.full,
                counts.limited);
    timer.done(counts.total, counts.full);
    return 0;
}

// ---------------------------------------------------------------- curate

int cmd_curate(const CommonArgs& common) {
    Config cfg = load_config(common);
    cfg.require_paths({"store"});
    StageTimer timer{"curate"};

    ArticleStore store(cfg.path("store"));

    CurationThresholds thresholds;
    thresholds.min_articles = size_t(cfg.get_int("curate", "min_articles", 50));
    thresholds.min_covid_share = cfg.get_double("curate", "min_covid_share", 0.10);
    thresholds.max_covid_share = cfg.get_double("curate", "max_covid_share", 0.95);

    std::map<std::string, std::string> reasons;
    if (!cfg.path("exclusions").empty()) {
        for_each_csv_row(cfg.path("exclusions"), {"outlet_id", "reason"}, [&](const auto& row, size_t) {
            reasons[std::string(row.at("outlet_id"))] = std::string(row.at("reason"));
        });
    }

    // Alaska outlets (no 2016 vote data in the robustness source).
    if (!cfg.path("registry").empty()) {
        for (const auto& entry : load_registry(cfg.path("registry")))
            if (entry.state == "AK") reasons.emplace(entry.outlet_id, "alaska");
    }

    // Outlets whose county lacks epidemic or vote coverage.
    if (!cfg.path("cases").empty() && !cfg.path("population").empty()) {
        EpiData epi = load_epi(cfg.path("cases"), cfg.path("population"));
        ProfileSet details;
        auto registry = load_registry(cfg.path("registry"));
        profiles_for(cfg, registry, &details);
        for (const auto& id : details.missing_county) reasons.emplace(id, "missing_county_data");
        for (const auto& id : details.missing_votes) reasons.emplace(id, "missing_vote_data");
        for (const auto& entry : registry) {
            std::string geo = epi_geo_for_county(entry.county_fips);
            if (!epi.counties.count(geo)) reasons.emplace(entry.outlet_id, "missing_case_data");
        }
    }

    std::set<std::string> excluded;
    for (const auto& [id, reason] : reasons) excluded.insert(id);
    std::set<std::string> retained = curate_outlets(store, thresholds, excluded);

    std::string retained_txt;
    for (const auto& id : retained) retained_txt += id + "\n";
    write_file((fs::path(store.dir()) / "retained.txt").string(), retained_txt);

    std::string excl_csv = "outlet_id,reason\n";
    for (const auto& [id, reason] : reasons) excl_csv += csv_escape(id) + "," + csv_escape(reason) + "\n";
    write_file((fs::path(store.dir()) / "exclusions_applied.csv").string(), excl_csv);

    std::printf("retained %zu of %zu outlets\n", retained.size(), store.outlet_ids().size());
    timer.done(store.outlet_ids().size(), retained.size());
    return 0;
}

// ------------------------------------------------------------------ link

int cmd_link(const CommonArgs& common) {
    Config cfg = load_config(common);
    cfg.require_paths({"registry", "cases", "population"});
    StageTimer timer{"link"};

    auto registry = load_registry(cfg.path("registry"));
    EpiData epi = load_epi(cfg.path("cases"), cfg.path("population"));
    ProfileSet details;
    auto profiles = profiles_for(cfg, registry, &details);

    for (const auto& id : details.missing_county)
        std::fprintf(stderr, "warn: %s: county absent from census tables\n", id.c_str());
    for (const auto& id : details.missing_votes)
        std::fprintf(stderr, "warn: %s: county absent from vote returns\n", id.c_str());

    std::string dir = out_dir(cfg) + "/link";
    std::string prof_csv =
        "outlet_id,county_fips,trump_logodds_2020,trump_share_2016,log_population,"
        "cre_risk0,cre_risk12,cre_risk3plus,popularity\n";
    char buf[256];
    for (const auto& [id, p] : profiles) {
        std::snprintf(buf, sizeof(buf), ",%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      p.county_fips.c_str(), p.trump_logodds_2020, p.trump_share_2016,
                      p.log_population, p.cre_risk0, p.cre_risk12, p.cre_risk3plus, p.popularity);
        prof_csv += csv_escape(id) + buf;
    }
    write_file(dir + "/profiles.csv", prof_csv);

    std::string epi_csv = "geo_id,week,new_cases,new_deaths,population\n";
    auto emit_series = [&](const EpiSeries& s) {
        for (int w = epi.min_week; w <= epi.max_week; ++w) {
            std::snprintf(buf, sizeof(buf), "%s,%d,%lld,%lld,%.0f\n", s.geo_id.c_str(), w,
                          s.cases_at(w), s.deaths_at(w), s.population);
            epi_csv += buf;
        }
    };
    for (const auto& [geo, s] : epi.counties) emit_series(s);
    for (const auto& [geo, s] : epi.states) emit_series(s);
    emit_series(epi.national);
    write_file(dir + "/epi_weekly.csv", epi_csv);

    std::printf("linked %zu outlets, %zu counties\n", profiles.size(), epi.counties.size());
    timer.done(registry.size(), profiles.size());
    return 0;
}

// ----------------------------------------------------------------- panel

Panel build_stage_panel(const Config& cfg, ArticleStore& store, CovidFilter filter,
                        std::map<std::string, OutletProfile>* profiles_out = nullptr) {
    cfg.require_paths({"registry", "cases", "population"});
    auto registry = load_registry(cfg.path("registry"));
    EpiData epi = load_epi(cfg.path("cases"), cfg.path("population"));
    auto profiles = profiles_for(cfg, registry);

    std::set<std::string> retained = retained_or_all(store);
    std::map<std::string, OutletProfile> used;
    for (const auto& [id, p] : profiles)
        if (retained.count(id)) used.emplace(id, p);

    Panel panel = build_panel(store, epi, used, filter);
    for (const auto& [outlet, week] : panel.coverage_gaps)
        std::fprintf(stderr, "warn: no epidemic data for %s week %d; row dropped\n", outlet.c_str(),
                     week);
    if (profiles_out) *profiles_out = std::move(used);
    return panel;
}

int cmd_panel(const CommonArgs& common, const std::string& filter_name, const std::string& lag_name) {
    Config cfg = load_config(common);
    cfg.require_paths({"store"});
    StageTimer timer{"panel"};

    ArticleStore store(cfg.path("store"));
    CovidFilter filter = covid_filter_from_name(
        !filter_name.empty() ? filter_name : cfg.get("panel", "filter", "full"));
    LagSetting lag = lag_setting_from_name(!lag_name.empty() ? lag_name : "none");

    Panel panel = build_stage_panel(cfg, store, filter);
    if (lag != LagSetting::none) panel = lag_covariates(panel, lag);

    std::string name = "panel_" + covid_filter_name(filter) +
                       (lag == LagSetting::none ? "" : "_lag_" + lag_setting_name(lag)) + ".csv";
    std::string path = out_dir(cfg) + "/panel/" + name;
    write_panel_csv(panel, path);

    std::string scalings = "variable,mean,sd\n";
    char buf[128];
    for (const auto& rec : panel.scalings) {
        std::snprintf(buf, sizeof(buf), ",%.10g,%.10g\n", rec.mean, rec.sd);
        scalings += rec.variable + buf;
    }
    write_file(out_dir(cfg) + "/panel/scalings_" + covid_filter_name(filter) + ".csv", scalings);

    std::set<std::string> panel_outlets;
    for (const auto& r : panel.rows) panel_outlets.insert(r.outlet_id);
    std::printf("panel rows=%zu outlets=%zu -> %s\n", panel.rows.size(), panel_outlets.size(),
                path.c_str());
    timer.done(store.article_count(), panel.rows.size());
    return 0;
}

// --------------------------------------------------------------- regress

int cmd_regress(const CommonArgs& common, const std::string& model_name) {
    Config cfg = load_config(common);
    cfg.require_paths({"store"});
    StageTimer timer{"regress"};

    std::vector<std::string> names;
    if (model_name == "all") names = ModelSpec::builtin_names();
    else if (!model_name.empty()) names = {model_name};
    else names = cfg.get_list("regress", "models");
    if (names.empty()) names = {"model1"};

    ArticleStore store(cfg.path("store"));
    std::map<CovidFilter, Panel> panels;
    std::vector<GlmFit> fits;
    std::vector<const GlmFit*> fit_ptrs;
    for (const auto& name : names) {
        ModelSpec spec = ModelSpec::builtin(name);
        if (!panels.count(spec.filter)) panels[spec.filter] = build_stage_panel(cfg, store, spec.filter);
        fits.push_back(fit(panels[spec.filter], spec));
    }
    for (const auto& f : fits) fit_ptrs.push_back(&f);

    std::string dir = out_dir(cfg) + "/regress";
    write_file(dir + "/regression.txt", format_regression_table(fit_ptrs, names));
    for (size_t i = 0; i < fits.size(); ++i) {
        const GlmFit& f = fits[i];
        std::string csv = "term,coefficient,clustered_se,z,odds_change\n";
        char buf[256];
        for (int j = 0; j < f.beta.size(); ++j) {
            double se = f.beta_se(j);
            std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%.6g,%.6g\n", f.coef_names[j].c_str(),
                          f.beta[j], se, se > 0 ? f.beta[j] / se : 0.0, odds_change(f.beta[j]));
            csv += buf;
        }
        write_file(dir + "/coefficients_" + names[i] + ".csv", csv);

        Eigen::VectorXd mult = centered_fe(f);
        std::string fe_csv = "outlet_id,alpha,multiplier\n";
        for (size_t o = 0; o < f.outlet_ids.size(); ++o) {
            std::snprintf(buf, sizeof(buf), ",%.10g,%.10g\n", f.fe[long(o)], mult[long(o)]);
            fe_csv += csv_escape(f.outlet_ids[o]) + buf;
        }
        write_file(dir + "/fe_" + names[i] + ".csv", fe_csv);
        std::printf("%s: loglik=%.4f bic=%.2f sq_corr=%.5f converged=%d iterations=%d\n",
                    names[i].c_str(), f.loglik, f.bic, f.squared_correlation, int(f.converged),
                    f.iterations);
    }

    auto comparison = compare_models(fit_ptrs, names);
    std::string cmp = "model,bic,loglik,parameters,squared_correlation,n_obs\n";
    char buf[256];
    for (const auto& row : comparison) {
        std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%d,%.6g,%d\n", row.name.c_str(), row.bic,
                      row.loglik, row.parameters, row.squared_correlation, row.n_obs);
        cmp += buf;
    }
    write_file(dir + "/model_comparison.csv", cmp);

    timer.done(names.size(), fits.size());
    return 0;
}

// ---------------------------------------------------------------- topics

VocabOptions vocab_options(const Config& cfg) {
    VocabOptions opts;
    opts.min_df = int(cfg.get_int("topics", "min_df", 5));
    if (!cfg.path("stopwords").empty()) opts.stopwords = load_stopwords(cfg.path("stopwords"));
    return opts;
}

int cmd_topics(const CommonArgs& common, const std::string& k_arg) {
    Config cfg = load_config(common);
    cfg.require_paths({"store"});
    StageTimer timer{"topics"};

    ArticleStore store(cfg.path("store"));
    auto retained = retained_or_all(store);
    CorpusDocs docs = collect_docs(store, retained);
    if (docs.texts.empty()) throw Error("topics: no documents (run crawl/curate first)");

    CorpusMatrix corpus = build_vocab(docs.texts, vocab_options(cfg));

    int df = int(cfg.get_int("topics", "spline_df", 10));
    std::vector<double> weeks(docs.weeks.begin(), docs.weeks.end());
    Eigen::MatrixXd basis = spline_basis(weeks, df);

    uint64_t seed = run_seed(cfg, common);
    TopicFitOptions fit_opts;
    fit_opts.max_iterations = int(cfg.get_int("topics", "max_iterations", 200));
    fit_opts.threads = int(cfg.get_int("topics", "threads", 1));

    std::vector<int> grid;
    if (!k_arg.empty()) {
        grid = {std::stoi(k_arg)};
    } else {
        for (const auto& item : cfg.get_list("topics", "k_grid")) grid.push_back(std::stoi(item));
        if (grid.empty()) grid = {5};
    }

    std::string dir = out_dir(cfg) + "/topics";
    int best_k = grid[0];
    if (grid.size() > 1) {
        double holdout = cfg.get_double("topics", "holdout_fraction", 0.10);
        KSelection sel = select_k(corpus.docs, corpus.vocab.size(), basis, grid, holdout, seed, fit_opts);
        best_k = sel.best_k;
        std::string csv = "k,heldout_loglik,perplexity,heldout_tokens\n";
        char buf[128];
        for (const auto& e : sel.entries) {
            std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%lld\n", e.k, e.heldout_loglik,
                          e.perplexity, e.heldout_tokens);
            csv += buf;
        }
        write_file(dir + "/selection.csv", csv);
        std::printf("selected k=%d\n", best_k);
    }

    TopicModel model = fit_model(corpus.docs, corpus.vocab.size(), basis, best_k, seed, fit_opts);
    save_topic_model(model, corpus.vocab, dir + "/model.bin");

    std::string words_csv = "topic,top_words\n";
    for (int k = 0; k < model.K; ++k) {
        auto words = top_words(model, corpus.vocab, k, 7);
        std::string joined;
        for (const auto& w : words) {
            if (!joined.empty()) joined += " ";
            joined += w;
        }
        words_csv += std::to_string(k) + "," + csv_escape(joined) + "\n";
    }
    write_file(dir + "/top_words.csv", words_csv);

    std::set<int> week_set(docs.weeks.begin(), docs.weeks.end());
    std::string shares_csv = "week,topic,share_pct\n";
    char buf[128];
    for (int w : week_set) {
        Eigen::VectorXd shares = expected_topic_share(model, docs.weeks, w);
        for (int k = 0; k < model.K; ++k) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.10g\n", w, k, shares[k]);
            shares_csv += buf;
        }
    }
    write_file(dir + "/shares.csv", shares_csv);

    std::printf("topics k=%d docs=%zu vocab=%d elbo_iterations=%zu\n", model.K, docs.texts.size(),
                corpus.vocab.size(), model.elbo_trace.size());
    timer.done(docs.texts.size(), size_t(model.K));
    return 0;
}

// ---------------------------------------------------------------- report

int cmd_report(const CommonArgs& common) {
    Config cfg = load_config(common);
    cfg.require_paths({"store"});
    StageTimer timer{"report"};

    ArticleStore store(cfg.path("store"));
    auto retained = retained_or_all(store);

    cfg.require_paths({"registry", "cases", "population"});
    auto registry = load_registry(cfg.path("registry"));
    EpiData epi = load_epi(cfg.path("cases"), cfg.path("population"));
    auto all_profiles = profiles_for(cfg, registry);
    std::map<std::string, OutletProfile> profiles;
    for (const auto& [id, p] : all_profiles)
        if (retained.count(id)) profiles.emplace(id, p);

    ReportBundle bundle;

    // Regressions: headline model, limited-filter variant, lag variants.
    std::vector<std::string> names = cfg.get_list("report", "models");
    if (names.empty()) names = {"model1", "model2", "model4", "model5", "lag_both", "lag_cases",
                                "lag_deaths"};
    std::map<CovidFilter, Panel> panels;
    std::vector<GlmFit> fits;
    for (const auto& name : names) {
        ModelSpec spec = ModelSpec::builtin(name);
        if (!panels.count(spec.filter)) {
            Panel p = build_panel(store, epi, profiles, spec.filter);
            panels.emplace(spec.filter, std::move(p));
        }
        fits.push_back(fit(panels.at(spec.filter), spec));
    }
    bundle.fit_names = names;
    for (const auto& f : fits) bundle.fits.push_back(&f);

    // Weekly coverage trend (full filter).
    {
        std::map<int, std::pair<long long, long long>> weekly; // (covid, total)
        for (const auto& a : store.articles()) {
            if (!retained.count(a.outlet_id)) continue;
            auto& c = weekly[a.published_week];
            if (a.is_covid_full) ++c.first;
            ++c.second;
        }
        std::map<int, double> shares;
        for (const auto& [week, c] : weekly)
            if (c.second > 0) shares[week] = 100.0 * double(c.first) / double(c.second);
        if (shares.size() >= 10)
            bundle.trend = coverage_trend(shares, cfg.get_double("report", "trend_span", 0.75));
        else
            bundle.warnings.push_back("coverage trend skipped: fewer than 10 weeks of data");
    }

    // Fixed-effect vs audience relationships from the headline model.
    const GlmFit& head = fits.front();
    if (profiles.size() >= 3) {
        bundle.fe_audience = fe_audience_table(head.outlet_ids, centered_fe(head), profiles);
    } else {
        bundle.warnings.push_back("fe/audience correlations skipped: fewer than 3 profiled outlets");
    }

    // Full-vs-limited fixed effect agreement when both filters are fitted.
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] != "model2" || head.outlet_ids.size() < 3) continue;
        const GlmFit& lim = fits[i];
        if (lim.outlet_ids != head.outlet_ids) break;
        std::vector<double> a(head.fe.data(), head.fe.data() + head.fe.size());
        std::vector<double> b(lim.fe.data(), lim.fe.data() + lim.fe.size());
        try {
            CorrelationCell cell = pearson(a, b, "fe_full", "fe_limited");
            bundle.fe_audience.cells.push_back(cell);
        } catch (const ZeroVariance&) {
        }
        break;
    }

    bundle.warnings = [&] {
        auto w = collinearity_warnings(profiles);
        w.insert(w.end(), bundle.warnings.begin(), bundle.warnings.end());
        return w;
    }();

    // Topic block: requires a saved model; labels unlock the heatmap.
    std::string model_path = out_dir(cfg) + "/topics/model.bin";
    if (fs::exists(model_path)) {
        LoadedTopicModel loaded = load_topic_model(model_path);
        CorpusDocs docs = collect_docs(store, retained);
        if (long(docs.texts.size()) == loaded.model.theta.rows()) {
            for (int k = 0; k < loaded.model.K; ++k)
                bundle.topic_words[k] = top_words(loaded.model, loaded.vocab, k, 7);
            std::set<int> week_set(docs.weeks.begin(), docs.weeks.end());
            for (int w : week_set) {
                Eigen::VectorXd shares = expected_topic_share(loaded.model, docs.weeks, w);
                for (int k = 0; k < loaded.model.K; ++k) bundle.topic_shares[{w, k}] = shares[k];
            }

            if (!cfg.path("labels").empty() && fs::exists(cfg.path("labels"))) {
                std::vector<int> topic_ids;
                std::vector<std::string> annotators;
                LabelTable table = load_label_table(cfg.path("labels"), &topic_ids, &annotators);
                ResolvedLabels resolved = resolve_topic_labels(table, topic_ids, annotators);
                char abuf[128];
                std::snprintf(abuf, sizeof(abuf), "annotator agreement: krippendorff_alpha=%.4f%s",
                              resolved.alpha.alpha, resolved.alpha.no_variation ? " (no variation)" : "");
                bundle.warnings.push_back(abuf);

                std::vector<int> covid_topics;
                for (size_t i = 0; i < resolved.topic_ids.size(); ++i)
                    if (resolved.final_labels[i] == "covid") covid_topics.push_back(resolved.topic_ids[i]);

                if (!covid_topics.empty() && profiles.size() >= 3) {
                    // Outlet-level topic shares restricted to covid topics.
                    std::vector<std::string> outlet_order;
                    for (const auto& [id, p] : profiles) outlet_order.push_back(id);
                    Eigen::MatrixXd shares =
                        Eigen::MatrixXd::Zero(long(outlet_order.size()), long(covid_topics.size()));
                    std::map<std::string, long> outlet_row;
                    for (size_t i = 0; i < outlet_order.size(); ++i) outlet_row[outlet_order[i]] = long(i);
                    Eigen::VectorXd doc_count = Eigen::VectorXd::Zero(long(outlet_order.size()));
                    for (size_t d = 0; d < docs.texts.size(); ++d) {
                        auto it = outlet_row.find(docs.outlet_ids[d]);
                        if (it == outlet_row.end()) continue;
                        for (size_t t = 0; t < covid_topics.size(); ++t)
                            shares(it->second, long(t)) += loaded.model.theta(long(d), covid_topics[t]);
                        doc_count[it->second] += 1;
                    }
                    for (long o = 0; o < shares.rows(); ++o) {
                        double total = shares.row(o).sum();
                        if (total > 0) shares.row(o) /= total; // renormalize over covid topics
                    }
                    bundle.heatmap = topic_audience_heatmap(
                        shares, covid_topics, outlet_order, profiles,
                        cfg.get_double("report", "heatmap_alpha", 0.01));
                }
            }
        } else {
            bundle.warnings.push_back("topic model ignored: document count differs from the store");
        }
    }

    auto manifest = emit_tables(bundle, out_dir(cfg) + "/report");
    std::printf("report: %zu files -> %s/report/manifest.txt\n", manifest.size(), out_dir(cfg).c_str());
    timer.done(store.article_count(), manifest.size());
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"newspulse: local news pandemic-coverage monitor and analysis pipeline"};
    app.require_subcommand(1);

    CommonArgs common;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "pipeline configuration file");
        sub->add_option("--seed", common.seed_override, "override [run] seed");
    };

    std::string registry_path, store_dir, filter_name, lag_name, model_name, k_arg;
    bool once = false;
    int delay_ms = -1;

    CLI::App* crawl = app.add_subcommand("crawl", "fetch feeds and store article text");
    add_common(crawl);
    crawl->add_option("--registry", registry_path, "feed registry CSV");
    crawl->add_option("--store", store_dir, "article store directory");
    crawl->add_flag("--once", once, "run a single cycle and exit");
    crawl->add_option("--delay-ms", delay_ms, "per-host politeness delay override");

    CLI::App* classify = app.add_subcommand("classify", "tag articles with the COVID keyword filters");
    add_common(classify);

    CLI::App* curate = app.add_subcommand("curate", "apply outlet curation filters");
    add_common(curate);

    CLI::App* link = app.add_subcommand("link", "join outlets to county data and audience proxies");
    add_common(link);

    CLI::App* panel = app.add_subcommand("panel", "assemble the outlet-week analysis panel");
    add_common(panel);
    panel->add_option("--filter", filter_name, "keyword filter: full|limited");
    panel->add_option("--lag", lag_name, "lag setting: none|cases|deaths|both");

    CLI::App* regress = app.add_subcommand("regress", "fit binomial fixed-effects regressions");
    add_common(regress);
    regress->add_option("--model", model_name, "builtin model name or 'all'");

    CLI::App* topics = app.add_subcommand("topics", "fit the covariate-aware topic model");
    add_common(topics);
    topics->add_option("--k", k_arg, "fixed topic count (skips the grid search)");

    CLI::App* report = app.add_subcommand("report", "emit tables, trends and correlations");
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        std::fprintf(stderr, "%s", app.help().c_str());
        return 1;
    }

    try {
        if (crawl->parsed()) return cmd_crawl(common, registry_path, store_dir, once, delay_ms);
        if (classify->parsed()) return cmd_classify(common);
        if (curate->parsed()) return cmd_curate(common);
        if (link->parsed()) return cmd_link(common);
        if (panel->parsed()) return cmd_panel(common, filter_name, lag_name);
        if (regress->parsed()) return cmd_regress(common, model_name);
        if (topics->parsed()) return cmd_topics(common, k_arg);
        if (report->parsed()) return cmd_report(common);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}

} // namespace newspulse::cli
