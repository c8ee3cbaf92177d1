#include "newspulse/geolink.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"
#include "newspulse/timeutil.hpp"

namespace newspulse {

namespace {

const std::unordered_map<std::string, std::string>& fips_state_table() {
    static const std::unordered_map<std::string, std::string> kTable = {
        {"01", "AL"}, {"02", "AK"}, {"04", "AZ"}, {"05", "AR"}, {"06", "CA"}, {"08", "CO"},
        {"09", "CT"}, {"10", "DE"}, {"11", "DC"}, {"12", "FL"}, {"13", "GA"}, {"15", "HI"},
        {"16", "ID"}, {"17", "IL"}, {"18", "IN"}, {"19", "IA"}, {"20", "KS"}, {"21", "KY"},
        {"22", "LA"}, {"23", "ME"}, {"24", "MD"}, {"25", "MA"}, {"26", "MI"}, {"27", "MN"},
        {"28", "MS"}, {"29", "MO"}, {"30", "MT"}, {"31", "NE"}, {"32", "NV"}, {"33", "NH"},
        {"34", "NJ"}, {"35", "NM"}, {"36", "NY"}, {"37", "NC"}, {"38", "ND"}, {"39", "OH"},
        {"40", "OK"}, {"41", "OR"}, {"42", "PA"}, {"44", "RI"}, {"45", "SC"}, {"46", "SD"},
        {"47", "TN"}, {"48", "TX"}, {"49", "UT"}, {"50", "VT"}, {"51", "VA"}, {"53", "WA"},
        {"54", "WV"}, {"55", "WI"}, {"56", "WY"}, {"60", "AS"}, {"66", "GU"}, {"69", "MP"},
        {"72", "PR"}, {"78", "VI"},
    };
    return kTable;
}

const std::vector<std::string>& nyc_borough_fips() {
    static const std::vector<std::string> kBoroughs = {"36005", "36047", "36061", "36081", "36085"};
    return kBoroughs;
}

long long parse_count(std::string_view s, const std::string& path, size_t line) {
    if (s.empty()) return 0;
    try {
        size_t used = 0;
        std::string str(s);
        long long v = std::stoll(str, &used);
        if (used != str.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(path + " line " + std::to_string(line) + ": bad count '" + std::string(s) + "'");
    }
}

double parse_real(std::string_view s, const std::string& path, size_t line) {
    try {
        size_t used = 0;
        std::string str(s);
        double v = std::stod(str, &used);
        if (used != str.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(path + " line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    }
}

} // namespace

long long EpiSeries::cases_at(int week) const {
    auto it = cases.find(week);
    return it == cases.end() ? 0 : it->second;
}

long long EpiSeries::deaths_at(int week) const {
    auto it = deaths.find(week);
    return it == deaths.end() ? 0 : it->second;
}

std::string epi_geo_for_county(const std::string& county_fips) {
    for (const auto& b : nyc_borough_fips())
        if (b == county_fips) return "NYC";
    return county_fips;
}

std::string state_for_fips(const std::string& fips) {
    if (fips == "NYC") return "NY";
    if (fips.size() < 2) return {};
    auto it = fips_state_table().find(fips.substr(0, 2));
    return it == fips_state_table().end() ? std::string() : it->second;
}

std::map<std::string, EpiSeries> load_case_data(const std::string& path) {
    struct DayObs {
        int64_t day;
        long long cases;
        long long deaths;
    };
    std::map<std::string, std::vector<DayObs>> daily;

    for_each_csv_row(path, {"date", "county", "state", "fips", "cases", "deaths"},
                     [&](const auto& row, size_t line) {
                         std::string geo(row.at("fips"));
                         if (geo.empty()) {
                             if (row.at("county") == "New York City") geo = "NYC";
                             else return; // "Unknown" county rows carry no geography
                         }
                         auto date = parse_date(row.at("date"));
                         if (!date)
                             throw ParseError(path + " line " + std::to_string(line) + ": bad date '" +
                                              std::string(row.at("date")) + "'");
                         daily[geo].push_back({*date / 86400,
                                               parse_count(row.at("cases"), path, line),
                                               parse_count(row.at("deaths"), path, line)});
                     });

    std::map<std::string, EpiSeries> out;
    for (auto& [geo, obs] : daily) {
        std::sort(obs.begin(), obs.end(), [](const DayObs& a, const DayObs& b) { return a.day < b.day; });
        // NYC rows arrive one per borough-less city entry; collapse same-day
        // duplicates (cumulative values, keep the max).
        std::vector<DayObs> dedup;
        for (const auto& o : obs) {
            if (!dedup.empty() && dedup.back().day == o.day) {
                dedup.back().cases = std::max(dedup.back().cases, o.cases);
                dedup.back().deaths = std::max(dedup.back().deaths, o.deaths);
            } else {
                dedup.push_back(o);
            }
        }

        EpiSeries series;
        series.geo_id = geo;
        long long prev_cases = 0, prev_deaths = 0;
        for (const auto& o : dedup) {
            long long new_cases = std::max<long long>(0, o.cases - prev_cases);
            long long new_deaths = std::max<long long>(0, o.deaths - prev_deaths);
            prev_cases = o.cases;
            prev_deaths = o.deaths;
            int week = week_index(o.day * 86400);
            series.cases[week] += new_cases;
            series.deaths[week] += new_deaths;
        }
        out.emplace(geo, std::move(series));
    }
    return out;
}

std::vector<std::string> attach_populations(std::map<std::string, EpiSeries>& counties,
                                            const std::map<std::string, long long>& county_pop) {
    std::vector<std::string> dropped;
    for (auto it = counties.begin(); it != counties.end();) {
        double pop = 0;
        if (it->first == "NYC") {
            for (const auto& b : nyc_borough_fips()) {
                auto p = county_pop.find(b);
                if (p != county_pop.end()) pop += double(p->second);
            }
        } else {
            auto p = county_pop.find(it->first);
            if (p != county_pop.end()) pop = double(p->second);
        }
        if (pop <= 0) {
            dropped.push_back(it->first);
            it = counties.erase(it);
        } else {
            it->second.population = pop;
            ++it;
        }
    }
    return dropped;
}

StateNational aggregate_geo(const std::map<std::string, EpiSeries>& counties) {
    StateNational out;
    out.national.geo_id = "US";
    for (const auto& [geo, series] : counties) {
        std::string state = state_for_fips(geo);
        if (state.empty()) continue;
        EpiSeries& st = out.states[state];
        if (st.geo_id.empty()) st.geo_id = state;
        st.population += series.population;
        out.national.population += series.population;
        for (const auto& [week, n] : series.cases) {
            st.cases[week] += n;
            out.national.cases[week] += n;
        }
        for (const auto& [week, n] : series.deaths) {
            st.deaths[week] += n;
            out.national.deaths[week] += n;
        }
    }
    return out;
}

double log_rate_per_1000(double count, double population) {
    if (population <= 0) throw InvalidPopulation("population must be positive, got " +
                                                 std::to_string(population));
    return std::log1p(1000.0 * count / population);
}

EpiData load_epi(const std::string& cases_csv, const std::string& population_csv) {
    EpiData epi;
    epi.counties = load_case_data(cases_csv);
    attach_populations(epi.counties, load_population(population_csv));
    auto agg = aggregate_geo(epi.counties);
    epi.states = std::move(agg.states);
    epi.national = std::move(agg.national);

    bool first = true;
    for (const auto& [geo, series] : epi.counties) {
        for (const auto* weekly : {&series.cases, &series.deaths}) {
            if (weekly->empty()) continue;
            int lo = weekly->begin()->first;
            int hi = weekly->rbegin()->first;
            if (first) {
                epi.min_week = lo;
                epi.max_week = hi;
                first = false;
            } else {
                epi.min_week = std::min(epi.min_week, lo);
                epi.max_week = std::max(epi.max_week, hi);
            }
        }
    }
    return epi;
}

std::map<std::string, long long> load_population(const std::string& path) {
    std::map<std::string, long long> out;
    for_each_csv_row(path, {"fips", "pop_2019"}, [&](const auto& row, size_t line) {
        out[std::string(row.at("fips"))] = parse_count(row.at("pop_2019"), path, line);
    });
    return out;
}

std::map<std::string, VoteCounts> load_votes(const std::string& path) {
    std::map<std::string, VoteCounts> out;
    for_each_csv_row(path, {"fips", "votes_trump", "votes_biden"}, [&](const auto& row, size_t line) {
        VoteCounts v;
        v.trump = parse_count(row.at("votes_trump"), path, line);
        v.other = parse_count(row.at("votes_biden"), path, line);
        out[std::string(row.at("fips"))] = v;
    });
    return out;
}

std::map<std::string, CreShares> load_cre(const std::string& path) {
    std::map<std::string, CreShares> out;
    for_each_csv_row(path, {"fips", "pct_0", "pct_1_2", "pct_3plus"}, [&](const auto& row, size_t line) {
        CreShares c;
        c.pct0 = parse_real(row.at("pct_0"), path, line);
        c.pct12 = parse_real(row.at("pct_1_2"), path, line);
        c.pct3plus = parse_real(row.at("pct_3plus"), path, line);
        double sum = c.pct0 + c.pct12 + c.pct3plus;
        if (std::abs(sum - 100.0) > 0.5)
            throw ParseError(path + " line " + std::to_string(line) + ": CRE shares sum to " +
                             std::to_string(sum) + ", expected 100 +- 0.5");
        out[std::string(row.at("fips"))] = c;
    });
    return out;
}

std::map<std::string, double> load_ranks(const std::string& path) {
    std::map<std::string, double> out;
    for_each_csv_row(path, {"outlet_id", "rank"}, [&](const auto& row, size_t line) {
        double rank = parse_real(row.at("rank"), path, line);
        if (rank < 1)
            throw ParseError(path + " line " + std::to_string(line) + ": rank must be >= 1");
        out[std::string(row.at("outlet_id"))] = rank;
    });
    return out;
}

namespace {

double logodds_from_votes(const VoteCounts& v) {
    double total = double(v.trump) + double(v.other);
    double share = total > 0 ? double(v.trump) / total : 0.5;
    share = std::clamp(share, 0.001, 0.999);
    return std::log(share / (1.0 - share));
}

} // namespace

OutletProfile build_profile(const std::string& outlet_id, const std::string& county_fips,
                            const ProfileInputs& inputs, double imputed_rank) {
    auto pop = inputs.population.find(county_fips);
    if (pop == inputs.population.end())
        throw MissingCounty("outlet " + outlet_id + ": county " + county_fips + " not in population table");
    auto cre = inputs.cre.find(county_fips);
    if (cre == inputs.cre.end())
        throw MissingCounty("outlet " + outlet_id + ": county " + county_fips + " not in CRE table");

    OutletProfile p;
    p.outlet_id = outlet_id;
    p.county_fips = county_fips;
    p.log_population = std::log(double(pop->second));
    p.cre_risk0 = cre->second.pct0;
    p.cre_risk12 = cre->second.pct12;
    p.cre_risk3plus = cre->second.pct3plus;

    auto v20 = inputs.votes_2020.find(county_fips);
    if (v20 == inputs.votes_2020.end())
        throw MissingCounty("outlet " + outlet_id + ": county " + county_fips + " not in 2020 vote table");
    p.trump_logodds_2020 = logodds_from_votes(v20->second);

    auto v16 = inputs.votes_2016.find(county_fips);
    if (v16 != inputs.votes_2016.end()) {
        double total = double(v16->second.trump) + double(v16->second.other);
        p.trump_share_2016 = total > 0 ? double(v16->second.trump) / total : 0.5;
    }

    auto rank = inputs.ranks.find(outlet_id);
    p.popularity = -std::log(rank == inputs.ranks.end() ? imputed_rank : rank->second);
    return p;
}

ProfileSet build_profiles(const std::vector<std::pair<std::string, std::string>>& outlet_counties,
                          const ProfileInputs& inputs) {
    // Missing outlets take the worst (maximum) observed rank.
    double imputed_rank = 1.0;
    for (const auto& [outlet, rank] : inputs.ranks) imputed_rank = std::max(imputed_rank, rank);

    ProfileSet out;
    for (const auto& [outlet_id, county] : outlet_counties) {
        if (!inputs.population.count(county) || !inputs.cre.count(county)) {
            out.missing_county.insert(outlet_id);
            continue;
        }
        if (!inputs.votes_2020.count(county)) {
            out.missing_votes.insert(outlet_id);
            continue;
        }
        out.profiles[outlet_id] = build_profile(outlet_id, county, inputs, imputed_rank);
    }
    return out;
}

} // namespace newspulse
