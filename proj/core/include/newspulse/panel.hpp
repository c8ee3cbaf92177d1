#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "newspulse/geolink.hpp"
#include "newspulse/store.hpp"

namespace newspulse {

enum class CovidFilter { full, limited };
CovidFilter covid_filter_from_name(const std::string& name);
std::string covid_filter_name(CovidFilter f);

// Column order of the seven panel covariates.
inline constexpr int kNumCovariates = 7;
inline constexpr std::array<const char*, kNumCovariates> kCovariateNames = {
    "weeks_since_2020", "cases_county", "cases_state", "cases_country",
    "deaths_county",    "deaths_state", "deaths_country",
};

struct ScalingRecord {
    std::string variable;
    double mean = 0;
    double sd = 1;
};

struct PanelRow {
    std::string outlet_id;
    int week = 0;
    long long covid_count = 0; // y
    long long total_count = 0; // n >= 1
    std::array<double, kNumCovariates> z{}; // standardized covariates
};

struct Panel {
    std::vector<PanelRow> rows; // sorted by (outlet_id, week)
    std::array<ScalingRecord, kNumCovariates> scalings;
    // Raw (pre-standardization) covariates, row-aligned; kept for lagging
    // and for back-transforming coefficients.
    std::vector<std::array<double, kNumCovariates>> raw;
    std::vector<std::pair<std::string, int>> coverage_gaps; // dropped outlet-weeks
};

// Standardizes to mean 0, sd 1 (n-1 denominator). Throws
// DegenerateColumn when the column is constant.
std::pair<std::vector<double>, ScalingRecord> standardize(const std::vector<double>& values,
                                                          const std::string& variable);

// One row per profiled outlet per week with at least one article.
// Covariates are the week index plus logged case/death rates per 1,000
// at the outlet's county, state and national levels, standardized over
// the included rows. Outlet-weeks outside the epidemic data's span are
// dropped and listed in coverage_gaps.
Panel build_panel(const ArticleStore& store, const EpiData& epi,
                  const std::map<std::string, OutletProfile>& profiles, CovidFilter filter);

enum class LagSetting { none, cases, deaths, both };
LagSetting lag_setting_from_name(const std::string& name);
std::string lag_setting_name(LagSetting lag);

// Substitutes week t-1 values (same geography) for the selected rate
// covariates; rows without a predecessor row drop out and all columns
// are re-standardized over the surviving rows.
Panel lag_covariates(const Panel& panel, LagSetting which);

void write_panel_csv(const Panel& panel, const std::string& path);

} // namespace newspulse
