#include "newspulse/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"

namespace newspulse {

CovidFilter covid_filter_from_name(const std::string& name) {
    if (name == "full") return CovidFilter::full;
    if (name == "limited") return CovidFilter::limited;
    throw Error("unknown covid filter '" + name + "' (expected full|limited)");
}

std::string covid_filter_name(CovidFilter f) {
    return f == CovidFilter::full ? "full" : "limited";
}

LagSetting lag_setting_from_name(const std::string& name) {
    if (name == "none") return LagSetting::none;
    if (name == "cases") return LagSetting::cases;
    if (name == "deaths") return LagSetting::deaths;
    if (name == "both") return LagSetting::both;
    throw Error("unknown lag setting '" + name + "' (expected none|cases|deaths|both)");
}

std::string lag_setting_name(LagSetting lag) {
    switch (lag) {
    case LagSetting::none: return "none";
    case LagSetting::cases: return "cases";
    case LagSetting::deaths: return "deaths";
    case LagSetting::both: return "both";
    }
    return "none";
}

std::pair<std::vector<double>, ScalingRecord> standardize(const std::vector<double>& values,
                                                          const std::string& variable) {
    if (values.size() < 2)
        throw DegenerateColumn(variable + ": need at least 2 values to standardize");
    double mean = 0;
    for (double v : values) mean += v;
    mean /= double(values.size());
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / double(values.size() - 1));
    if (sd <= 0 || !std::isfinite(sd))
        throw DegenerateColumn(variable + ": zero variance (constant column indicates a data fault)");

    std::vector<double> z(values.size());
    for (size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - mean) / sd;
    return {std::move(z), ScalingRecord{variable, mean, sd}};
}

namespace {

void standardize_panel(Panel& panel) {
    const size_t n = panel.rows.size();
    for (int c = 0; c < kNumCovariates; ++c) {
        std::vector<double> col(n);
        for (size_t i = 0; i < n; ++i) col[i] = panel.raw[i][c];
        auto [z, rec] = standardize(col, kCovariateNames[c]);
        for (size_t i = 0; i < n; ++i) panel.rows[i].z[c] = z[i];
        panel.scalings[c] = rec;
    }
}

} // namespace

Panel build_panel(const ArticleStore& store, const EpiData& epi,
                  const std::map<std::string, OutletProfile>& profiles, CovidFilter filter) {
    // Outlet-week article counts.
    std::map<std::pair<std::string, int>, std::pair<long long, long long>> counts; // (y, n)
    for (const auto& a : store.articles()) {
        if (!profiles.count(a.outlet_id)) continue;
        auto& c = counts[{a.outlet_id, a.published_week}];
        bool covid = (filter == CovidFilter::full) ? a.is_covid_full : a.is_covid_limited;
        if (covid) ++c.first;
        ++c.second;
    }

    Panel panel;
    for (const auto& [key, yn] : counts) {
        const auto& [outlet_id, week] = key;
        const OutletProfile& profile = profiles.at(outlet_id);

        std::string county_geo = epi_geo_for_county(profile.county_fips);
        std::string state = state_for_fips(profile.county_fips);
        auto county_it = epi.counties.find(county_geo);
        auto state_it = epi.states.find(state);
        if (!epi.covers(week) || county_it == epi.counties.end() || state_it == epi.states.end()) {
            panel.coverage_gaps.emplace_back(outlet_id, week);
            continue;
        }
        const EpiSeries& county = county_it->second;
        const EpiSeries& st = state_it->second;

        PanelRow row;
        row.outlet_id = outlet_id;
        row.week = week;
        row.covid_count = yn.first;
        row.total_count = yn.second;
        panel.rows.push_back(row);

        std::array<double, kNumCovariates> raw;
        raw[0] = double(week);
        raw[1] = log_rate_per_1000(double(county.cases_at(week)), county.population);
        raw[2] = log_rate_per_1000(double(st.cases_at(week)), st.population);
        raw[3] = log_rate_per_1000(double(epi.national.cases_at(week)), epi.national.population);
        raw[4] = log_rate_per_1000(double(county.deaths_at(week)), county.population);
        raw[5] = log_rate_per_1000(double(st.deaths_at(week)), st.population);
        raw[6] = log_rate_per_1000(double(epi.national.deaths_at(week)), epi.national.population);
        panel.raw.push_back(raw);
    }

    if (panel.rows.size() < 2) throw Error("panel has fewer than 2 rows; nothing to standardize");
    standardize_panel(panel);
    return panel;
}

Panel lag_covariates(const Panel& panel, LagSetting which) {
    if (which == LagSetting::none) return panel;

    std::vector<int> lag_cols;
    if (which == LagSetting::cases || which == LagSetting::both) lag_cols.insert(lag_cols.end(), {1, 2, 3});
    if (which == LagSetting::deaths || which == LagSetting::both) lag_cols.insert(lag_cols.end(), {4, 5, 6});

    // Index raw rows by (outlet, week) so t-1 lookups use week arithmetic,
    // not adjacency in the row list.
    std::map<std::pair<std::string, int>, size_t> index;
    for (size_t i = 0; i < panel.rows.size(); ++i)
        index[{panel.rows[i].outlet_id, panel.rows[i].week}] = i;

    Panel out;
    for (size_t i = 0; i < panel.rows.size(); ++i) {
        const PanelRow& row = panel.rows[i];
        auto prev = index.find({row.outlet_id, row.week - 1});
        if (prev == index.end()) continue; // first observed week (or gap) drops
        std::array<double, kNumCovariates> raw = panel.raw[i];
        for (int c : lag_cols) raw[c] = panel.raw[prev->second][c];
        out.rows.push_back(row);
        out.raw.push_back(raw);
    }

    if (out.rows.size() < 2) throw Error("lagged panel has fewer than 2 rows");
    standardize_panel(out);
    return out;
}

void write_panel_csv(const Panel& panel, const std::string& path) {
    std::string csv = "outlet_id,week,covid_count,total_count";
    for (const char* name : kCovariateNames) {
        csv += ',';
        csv += name;
    }
    csv += '\n';
    char buf[64];
    for (const auto& row : panel.rows) {
        csv += csv_escape(row.outlet_id);
        std::snprintf(buf, sizeof(buf), ",%d,%lld,%lld", row.week, row.covid_count, row.total_count);
        csv += buf;
        for (int c = 0; c < kNumCovariates; ++c) {
            std::snprintf(buf, sizeof(buf), ",%.10g", row.z[c]);
            csv += buf;
        }
        csv += '\n';
    }
    write_file(path, csv);
}

} // namespace newspulse
