#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace newspulse {

// Weekly epidemic series for one geography. geo_id is a 5-digit county
// FIPS, the synthetic "NYC" unit, a state postal code, or "US".
struct EpiSeries {
    std::string geo_id;
    double population = 0;
    std::map<int, long long> cases;  // week -> new cases
    std::map<int, long long> deaths; // week -> new deaths

    long long cases_at(int week) const;
    long long deaths_at(int week) const;
};

struct EpiData {
    std::map<std::string, EpiSeries> counties; // keyed by FIPS or "NYC"
    std::map<std::string, EpiSeries> states;   // keyed by postal code
    EpiSeries national;                        // geo_id "US"
    int min_week = 0;
    int max_week = -1;

    bool covers(int week) const { return week >= min_week && week <= max_week; }
};

// NYT-style cumulative daily counts: header date,county,state,fips,cases,deaths.
// Daily cumulatives are differenced (first observation counts in full),
// negative corrections clip to zero, and days sum into week bins. All
// New York City rows collapse into the synthetic geography "NYC".
// Population fields are left at zero; see attach_populations.
std::map<std::string, EpiSeries> load_case_data(const std::string& path);

// Census populations, header fips,pop_2019. The "NYC" series receives
// the sum of the five borough counties. Returns geo ids dropped for
// lack of population data.
std::vector<std::string> attach_populations(std::map<std::string, EpiSeries>& counties,
                                            const std::map<std::string, long long>& county_pop);

struct StateNational {
    std::map<std::string, EpiSeries> states;
    EpiSeries national;
};

// Sums counts and populations by state (FIPS prefix; NYC -> NY) and
// nationally. Precondition: populations attached.
StateNational aggregate_geo(const std::map<std::string, EpiSeries>& counties);

// ln(1 + 1000 * count / population). Throws InvalidPopulation.
double log_rate_per_1000(double count, double population);

// Convenience: full load + attach + aggregate, with the week span set
// to the observed range of the county data.
EpiData load_epi(const std::string& cases_csv, const std::string& population_csv);

std::map<std::string, long long> load_population(const std::string& path);

struct VoteCounts {
    long long trump = 0;
    long long other = 0; // Biden (2020) or Clinton (2016)
};
// Header fips,votes_trump,votes_biden.
std::map<std::string, VoteCounts> load_votes(const std::string& path);

struct CreShares {
    double pct0 = 0;
    double pct12 = 0;
    double pct3plus = 0;
};
// Header fips,pct_0,pct_1_2,pct_3plus; shares must sum to 100 +- 0.5.
std::map<std::string, CreShares> load_cre(const std::string& path);

// Header outlet_id,rank.
std::map<std::string, double> load_ranks(const std::string& path);

struct OutletProfile {
    std::string outlet_id;
    std::string county_fips;
    double trump_logodds_2020 = 0;
    double trump_share_2016 = 0; // robustness only
    double log_population = 0;
    double cre_risk0 = 0;
    double cre_risk12 = 0;
    double cre_risk3plus = 0;
    double popularity = 0; // -ln(rank); higher = more popular
};

struct ProfileInputs {
    std::map<std::string, VoteCounts> votes_2020;
    std::map<std::string, VoteCounts> votes_2016;
    std::map<std::string, long long> population;
    std::map<std::string, CreShares> cre;
    std::map<std::string, double> ranks; // by outlet_id
};

// Builds one profile; throws MissingCounty when the county is absent
// from the population or CRE tables (the caller turns that into a
// curation exclusion). `imputed_rank` is the worst observed rank, used
// for outlets missing from the rank source.
OutletProfile build_profile(const std::string& outlet_id, const std::string& county_fips,
                            const ProfileInputs& inputs, double imputed_rank);

struct ProfileSet {
    std::map<std::string, OutletProfile> profiles;       // by outlet_id
    std::set<std::string> missing_county;                // excluded outlets
    std::set<std::string> missing_votes;
};

// Profiles every (outlet_id, county_fips) pair, collecting exclusions
// instead of failing the batch. Rank imputation uses the maximum rank
// across the rank table.
ProfileSet build_profiles(const std::vector<std::pair<std::string, std::string>>& outlet_counties,
                          const ProfileInputs& inputs);

// "NYC" for the five borough counties, otherwise the FIPS itself.
std::string epi_geo_for_county(const std::string& county_fips);

// Postal code for a county FIPS prefix ("36" -> "NY"); empty if unknown.
std::string state_for_fips(const std::string& fips);

} // namespace newspulse
