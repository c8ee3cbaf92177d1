#include "newspulse/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"
#include "newspulse/sha256.hpp"

namespace newspulse {

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string stars(double z) {
    double a = std::abs(z);
    if (a > 2.5758293035489004) return "***"; // p < 0.01
    if (a > 1.959963984540054) return "**";   // p < 0.05
    if (a > 1.6448536269514722) return "*";   // p < 0.1
    return "";
}

std::vector<double> standardize_simple(const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= double(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    double sd = v.size() > 1 ? std::sqrt(ss / double(v.size() - 1)) : 0.0;
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = sd > 0 ? (v[i] - mean) / sd : 0.0;
    return out;
}

} // namespace

std::vector<std::string> audience_variable_names() {
    return {"popularity", "trump_logodds_2020", "log_population", "cre_risk12", "cre_risk3plus"};
}

double audience_variable(const OutletProfile& p, const std::string& name) {
    if (name == "popularity") return p.popularity;
    if (name == "trump_logodds_2020") return p.trump_logodds_2020;
    if (name == "log_population") return p.log_population;
    if (name == "cre_risk12") return p.cre_risk12;
    if (name == "cre_risk3plus") return p.cre_risk3plus;
    if (name == "cre_risk0") return p.cre_risk0;
    throw Error("unknown audience variable '" + name + "'");
}

std::vector<TrendPoint> coverage_trend(const std::map<int, double>& weekly_shares, double span) {
    if (weekly_shares.size() < 10) throw Error("coverage_trend: need >= 10 weekly points");
    std::vector<double> x, y;
    for (const auto& [week, share] : weekly_shares) {
        x.push_back(double(week));
        y.push_back(share);
    }
    std::vector<double> smooth = loess_smooth(x, y, span);
    std::vector<TrendPoint> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = {int(x[i]), y[i], smooth[i]};
    return out;
}

FeAudienceResult fe_audience_table(const std::vector<std::string>& outlet_ids,
                                   const Eigen::VectorXd& multipliers,
                                   const std::map<std::string, OutletProfile>& profiles) {
    if (int(outlet_ids.size()) != multipliers.size())
        throw Error("fe_audience_table: multiplier per outlet required");

    FeAudienceResult result;
    std::vector<double> log_mult;
    std::vector<const OutletProfile*> kept;
    for (size_t i = 0; i < outlet_ids.size(); ++i) {
        auto it = profiles.find(outlet_ids[i]);
        if (it == profiles.end()) continue;
        kept.push_back(&it->second);
        log_mult.push_back(std::log(multipliers[long(i)]));
        result.outlet_order.push_back(outlet_ids[i]);
    }

    for (const auto& name : audience_variable_names()) {
        std::vector<double> x;
        for (const OutletProfile* p : kept) x.push_back(audience_variable(*p, name));
        result.cells.push_back(pearson(x, log_mult, name, "log_fe_multiplier"));

        std::vector<double> xz = standardize_simple(x);
        auto& points = result.scatter[name];
        for (size_t i = 0; i < xz.size(); ++i) points.emplace_back(xz[i], log_mult[i]);
    }
    return result;
}

std::vector<HeatmapCell> topic_audience_heatmap(const Eigen::MatrixXd& outlet_topic_shares,
                                                const std::vector<int>& topic_ids,
                                                const std::vector<std::string>& outlet_order,
                                                const std::map<std::string, OutletProfile>& profiles,
                                                double alpha) {
    if (outlet_topic_shares.rows() != long(outlet_order.size()) ||
        outlet_topic_shares.cols() != long(topic_ids.size()))
        throw Error("topic_audience_heatmap: shares shape mismatch");

    std::vector<HeatmapCell> cells;
    for (size_t t = 0; t < topic_ids.size(); ++t) {
        std::vector<double> shares;
        std::vector<const OutletProfile*> kept;
        for (size_t o = 0; o < outlet_order.size(); ++o) {
            auto it = profiles.find(outlet_order[o]);
            if (it == profiles.end()) continue;
            kept.push_back(&it->second);
            shares.push_back(outlet_topic_shares(long(o), long(t)));
        }
        for (const auto& name : audience_variable_names()) {
            std::vector<double> x;
            for (const OutletProfile* p : kept) x.push_back(audience_variable(*p, name));
            HeatmapCell cell;
            cell.topic = topic_ids[t];
            cell.variable = name;
            try {
                CorrelationCell c = pearson(x, shares, name, "topic_share");
                cell.r = c.r;
                cell.p = c.p;
                cell.masked = !(c.p < alpha);
            } catch (const ZeroVariance&) {
                cell.masked = true;
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

std::vector<std::string> collinearity_warnings(const std::map<std::string, OutletProfile>& profiles,
                                               double threshold) {
    std::vector<std::string> names = audience_variable_names();
    std::vector<std::string> warnings;
    if (profiles.size() < 3) return warnings;

    for (size_t i = 0; i < names.size(); ++i) {
        for (size_t j = i + 1; j < names.size(); ++j) {
            std::vector<double> a, b;
            for (const auto& [id, p] : profiles) {
                a.push_back(audience_variable(p, names[i]));
                b.push_back(audience_variable(p, names[j]));
            }
            try {
                CorrelationCell c = pearson(a, b, names[i], names[j]);
                if (std::abs(c.r) > threshold)
                    warnings.push_back(names[i] + " and " + names[j] + " are correlated (r = " +
                                       fmt(c.r, "%.3f") + "); their separate effects are unreliable");
            } catch (const ZeroVariance&) {
                // constant variable carries no collinearity signal
            }
        }
    }
    return warnings;
}

std::string format_regression_table(const std::vector<const GlmFit*>& fits,
                                    const std::vector<std::string>& names) {
    if (fits.size() != names.size()) throw Error("format_regression_table: names must match fits");

    // Union of covariate names in first-seen order.
    std::vector<std::string> terms;
    for (const GlmFit* fit : fits)
        for (const auto& term : fit->coef_names)
            if (std::find(terms.begin(), terms.end(), term) == terms.end()) terms.push_back(term);

    const size_t label_w = 22, col_w = 14;
    auto pad = [&](const std::string& s, size_t w) {
        return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
    };

    std::string out;
    out += pad("Model:", label_w);
    for (const auto& name : names) out += pad(name, col_w);
    out += "\n";
    out += std::string(label_w + col_w * fits.size(), '-') + "\n";

    for (const auto& term : terms) {
        std::string coef_line = pad(term, label_w);
        std::string se_line = pad("", label_w);
        for (const GlmFit* fit : fits) {
            auto it = std::find(fit->coef_names.begin(), fit->coef_names.end(), term);
            if (it == fit->coef_names.end()) {
                coef_line += pad("", col_w);
                se_line += pad("", col_w);
            } else {
                int j = int(it - fit->coef_names.begin());
                double se = fit->beta_se(j);
                double z = se > 0 ? fit->beta[j] / se : 0.0;
                coef_line += pad(fmt(fit->beta[j], "%.4f") + stars(z), col_w);
                se_line += pad("(" + fmt(se, "%.4f") + ")", col_w);
            }
        }
        out += coef_line + "\n" + se_line + "\n";
    }

    out += pad("Fixed effects:", label_w);
    for (size_t i = 0; i < fits.size(); ++i) out += pad("outlet", col_w);
    out += "\n";
    out += pad("Observations", label_w);
    for (const GlmFit* fit : fits) out += pad(std::to_string(fit->n_obs), col_w);
    out += "\n";
    out += pad("Squared Correlation", label_w);
    for (const GlmFit* fit : fits) out += pad(fmt(fit->squared_correlation, "%.5f"), col_w);
    out += "\n";
    out += pad("Pseudo R2", label_w);
    for (const GlmFit* fit : fits) out += pad(fmt(fit->pseudo_r2, "%.5f"), col_w);
    out += "\n";
    out += pad("BIC", label_w);
    for (const GlmFit* fit : fits) out += pad(fmt(fit->bic, "%.1f"), col_w);
    out += "\n";
    out += "One-way (outlet) clustered standard errors in parentheses\n";
    out += "Signif. codes: ***: 0.01, **: 0.05, *: 0.1\n";
    return out;
}

std::vector<ManifestEntry> emit_tables(const ReportBundle& bundle, const std::string& outdir) {
    std::vector<ManifestEntry> manifest;
    auto emit = [&](const std::string& rel, const std::string& content) {
        write_file(outdir + "/" + rel, content);
        manifest.push_back({rel, Sha256::hex(content)});
    };

    if (!bundle.fits.empty()) {
        emit("tables/regression.txt", format_regression_table(bundle.fits, bundle.fit_names));

        for (size_t i = 0; i < bundle.fits.size(); ++i) {
            const GlmFit* fit = bundle.fits[i];
            std::string csv = "term,coefficient,clustered_se,z,odds_change\n";
            for (int j = 0; j < fit->beta.size(); ++j) {
                double se = fit->beta_se(j);
                double z = se > 0 ? fit->beta[j] / se : 0.0;
                csv += fit->coef_names[j] + "," + fmt(fit->beta[j], "%.10g") + "," +
                       fmt(se, "%.10g") + "," + fmt(z, "%.6g") + "," +
                       fmt(odds_change(fit->beta[j]), "%.6g") + "\n";
            }
            emit("tables/coefficients_" + bundle.fit_names[i] + ".csv", csv);

            Eigen::VectorXd mult = centered_fe(*fit);
            std::string fe_csv = "outlet_id,alpha,multiplier\n";
            for (size_t o = 0; o < fit->outlet_ids.size(); ++o)
                fe_csv += csv_escape(fit->outlet_ids[o]) + "," + fmt(fit->fe[long(o)], "%.10g") + "," +
                          fmt(mult[long(o)], "%.10g") + "\n";
            emit("tables/fe_" + bundle.fit_names[i] + ".csv", fe_csv);
        }

        auto comparison = compare_models(bundle.fits, bundle.fit_names);
        std::string cmp = "model,bic,loglik,parameters,squared_correlation,n_obs\n";
        for (const auto& row : comparison)
            cmp += row.name + "," + fmt(row.bic, "%.10g") + "," + fmt(row.loglik, "%.10g") + "," +
                   std::to_string(row.parameters) + "," + fmt(row.squared_correlation, "%.6g") + "," +
                   std::to_string(row.n_obs) + "\n";
        emit("tables/model_comparison.csv", cmp);
    }

    if (!bundle.trend.empty()) {
        std::string csv = "week,share,smoothed\n";
        for (const auto& pt : bundle.trend)
            csv += std::to_string(pt.week) + "," + fmt(pt.value, "%.10g") + "," +
                   fmt(pt.smoothed, "%.10g") + "\n";
        emit("trends/coverage_trend.csv", csv);
    }

    if (!bundle.fe_audience.cells.empty()) {
        std::string csv = "variable,target,r,p,n\n";
        for (const auto& cell : bundle.fe_audience.cells)
            csv += cell.variable + "," + cell.target + "," + fmt(cell.r, "%.10g") + "," +
                   fmt(cell.p, "%.6g") + "," + std::to_string(cell.n) + "\n";
        emit("correlations/fe_audience.csv", csv);

        std::string scatter = "variable,outlet_id,x_standardized,log_multiplier\n";
        for (const auto& [name, points] : bundle.fe_audience.scatter)
            for (size_t i = 0; i < points.size(); ++i)
                scatter += name + "," + csv_escape(bundle.fe_audience.outlet_order[i]) + "," +
                           fmt(points[i].first, "%.10g") + "," + fmt(points[i].second, "%.10g") + "\n";
        emit("correlations/fe_audience_scatter.csv", scatter);
    }

    if (!bundle.heatmap.empty()) {
        std::string csv = "topic,variable,r,p,masked\n";
        for (const auto& cell : bundle.heatmap)
            csv += std::to_string(cell.topic) + "," + cell.variable + "," + fmt(cell.r, "%.10g") +
                   "," + fmt(cell.p, "%.6g") + "," + (cell.masked ? "1" : "0") + "\n";
        emit("correlations/topic_audience.csv", csv);
    }

    if (!bundle.topic_words.empty()) {
        std::string csv = "topic,top_words\n";
        for (const auto& [topic, words] : bundle.topic_words) {
            std::string joined;
            for (const auto& w : words) {
                if (!joined.empty()) joined += " ";
                joined += w;
            }
            csv += std::to_string(topic) + "," + csv_escape(joined) + "\n";
        }
        emit("tables/topic_top_words.csv", csv);
    }

    if (!bundle.topic_shares.empty()) {
        std::string csv = "week,topic,share_pct\n";
        for (const auto& [key, share] : bundle.topic_shares)
            csv += std::to_string(key.first) + "," + std::to_string(key.second) + "," +
                   fmt(share, "%.10g") + "\n";
        emit("trends/topic_shares.csv", csv);
    }

    if (!bundle.warnings.empty()) {
        std::string txt;
        for (const auto& w : bundle.warnings) txt += w + "\n";
        emit("tables/warnings.txt", txt);
    }

    std::sort(manifest.begin(), manifest.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    std::string manifest_txt;
    for (const auto& entry : manifest) manifest_txt += entry.sha256 + "  " + entry.path + "\n";
    write_file(outdir + "/manifest.txt", manifest_txt);
    return manifest;
}

} // namespace newspulse
