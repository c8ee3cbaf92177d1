#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "newspulse/geolink.hpp"
#include "newspulse/glm.hpp"
#include "newspulse/stats.hpp"

namespace newspulse {

// The five audience variables of the outlet-variation analysis, in
// output order.
std::vector<std::string> audience_variable_names();
double audience_variable(const OutletProfile& profile, const std::string& name);

struct TrendPoint {
    int week = 0;
    double value = 0;    // observed weekly share
    double smoothed = 0; // local-regression curve
};

// Locally weighted trend through weekly values (>= 10 points).
std::vector<TrendPoint> coverage_trend(const std::map<int, double>& weekly_shares, double span = 0.75);

struct FeAudienceResult {
    std::vector<CorrelationCell> cells;
    // variable -> (standardized x, log multiplier) scatter points in
    // outlet order.
    std::map<std::string, std::vector<std::pair<double, double>>> scatter;
    std::vector<std::string> outlet_order;
};

// Correlates centered fixed-effect log multipliers with each audience
// variable. `multipliers` come from centered_fe, aligned with outlet_ids;
// outlets without a profile are skipped.
FeAudienceResult fe_audience_table(const std::vector<std::string>& outlet_ids,
                                   const Eigen::VectorXd& multipliers,
                                   const std::map<std::string, OutletProfile>& profiles);

struct HeatmapCell {
    int topic = 0;
    std::string variable;
    double r = 0;
    double p = 1;
    bool masked = true; // not significant at the chosen alpha (strict <)
};

// Per-outlet COVID-topic shares (rows align with outlet_order, columns
// with topic_ids; rows renormalized over the covid topics) against the
// audience variables. Cells with p >= alpha are masked.
std::vector<HeatmapCell> topic_audience_heatmap(const Eigen::MatrixXd& outlet_topic_shares,
                                                const std::vector<int>& topic_ids,
                                                const std::vector<std::string>& outlet_order,
                                                const std::map<std::string, OutletProfile>& profiles,
                                                double alpha = 0.01);

// Pairwise |r| > threshold between audience variables, mirroring the
// collinearity caution in the outlet-variation analysis.
std::vector<std::string> collinearity_warnings(const std::map<std::string, OutletProfile>& profiles,
                                               double threshold = 0.6);

// Plain-text regression table: one column per fit, coefficients with
// significance stars and clustered SEs in parentheses, fixed-effect and
// fit-statistics blocks.
std::string format_regression_table(const std::vector<const GlmFit*>& fits,
                                    const std::vector<std::string>& names);

struct ReportBundle {
    // Named fits in presentation order.
    std::vector<std::string> fit_names;
    std::vector<const GlmFit*> fits;

    std::vector<TrendPoint> trend;
    FeAudienceResult fe_audience;
    std::vector<HeatmapCell> heatmap;
    std::vector<std::string> warnings;

    // topic id -> top stemmed words.
    std::map<int, std::vector<std::string>> topic_words;
    // (week, topic) -> expected share percentage.
    std::map<std::pair<int, int>, double> topic_shares;
};

struct ManifestEntry {
    std::string path; // relative to outdir
    std::string sha256;
};

// Writes tables/, trends/ and correlations/ under outdir plus a
// manifest.txt listing every emitted file with its content hash.
// Output is byte-deterministic for identical inputs.
std::vector<ManifestEntry> emit_tables(const ReportBundle& bundle, const std::string& outdir);

} // namespace newspulse
