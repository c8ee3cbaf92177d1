#include "newspulse/glm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "newspulse/errors.hpp"

namespace newspulse {

namespace {

constexpr double kEtaClamp = 30.0;
constexpr double kSeparationTol = 1e-10;

double log1pexp(double eta) {
    if (eta > kEtaClamp) return eta;
    if (eta < -kEtaClamp) return std::exp(eta);
    return std::log1p(std::exp(eta));
}

double logistic(double eta) {
    if (eta >= 0) {
        double e = std::exp(-eta);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(eta);
    return e / (1.0 + e);
}

// Binomial coefficient terms; constant in the parameters.
double comb_constant(const GlmData& data) {
    double c = 0;
    for (int i = 0; i < data.n_rows(); ++i)
        c += std::lgamma(data.trials[i] + 1) - std::lgamma(data.y[i] + 1) -
             std::lgamma(data.trials[i] - data.y[i] + 1);
    return c;
}

Eigen::MatrixXd full_design(const GlmData& data) {
    const int n = data.n_rows(), k = data.n_covariates(), g = data.n_outlets();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, k + g);
    if (k > 0) x.leftCols(k) = data.x;
    for (int i = 0; i < n; ++i) x(i, k + data.outlet[i]) = 1.0;
    return x;
}

void validate_data(const GlmData& data) {
    const int n = data.n_rows();
    if (n == 0) throw Error("glm: empty data");
    if (int(data.outlet.size()) != n || data.y.size() != n || data.trials.size() != n)
        throw Error("glm: inconsistent row counts");
    std::map<int, int> rows_per_outlet;
    for (int i = 0; i < n; ++i) {
        if (data.outlet[i] < 0 || data.outlet[i] >= data.n_outlets())
            throw Error("glm: outlet index out of range");
        if (data.trials[i] < 1) throw Error("glm: row with zero trials");
        if (data.y[i] < 0 || data.y[i] > data.trials[i]) throw Error("glm: y outside [0, n]");
        rows_per_outlet[data.outlet[i]]++;
    }
    for (int gi = 0; gi < data.n_outlets(); ++gi) {
        auto it = rows_per_outlet.find(gi);
        if (it == rows_per_outlet.end() || it->second < 2)
            throw Error("glm: outlet '" + data.outlet_ids[gi] + "' has fewer than 2 rows");
    }
}

void check_rank(const GlmData& data, const Eigen::MatrixXd& x) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    const int p = int(x.cols());
    int rank = int(qr.rank());
    if (rank >= p) return;
    std::string names;
    const auto& perm = qr.colsPermutation().indices();
    for (int j = rank; j < p; ++j) {
        int col = perm[j];
        if (!names.empty()) names += ", ";
        names += (col < data.n_covariates()) ? data.coef_names[col]
                                             : ("fe:" + data.outlet_ids[col - data.n_covariates()]);
    }
    throw RankDeficient("design rank " + std::to_string(rank) + " < " + std::to_string(p) +
                        "; dependent columns: " + names);
}

void check_separation(const GlmData& data, const Eigen::VectorXd& p) {
    const int g = data.n_outlets();
    std::vector<char> all_low(g, 1), all_high(g, 1), seen(g, 0);
    for (int i = 0; i < data.n_rows(); ++i) {
        int gi = data.outlet[i];
        seen[gi] = 1;
        if (p[i] > kSeparationTol) all_low[gi] = 0;
        if (p[i] < 1.0 - kSeparationTol) all_high[gi] = 0;
    }
    for (int gi = 0; gi < g; ++gi)
        if (seen[gi] && (all_low[gi] || all_high[gi]))
            throw Separation("outlet '" + data.outlet_ids[gi] +
                             "' is perfectly separated (all fitted p at " +
                             (all_low[gi] ? std::string("0") : std::string("1")) + ")");
}

double loglik_at(const GlmData& data, const Eigen::VectorXd& eta, double comb) {
    double ll = comb;
    for (int i = 0; i < data.n_rows(); ++i)
        ll += data.y[i] * eta[i] - data.trials[i] * log1pexp(eta[i]);
    return ll;
}

double pearson_corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double n = double(a.size());
    double ma = a.mean(), mb = b.mean();
    double sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    (void)n;
    if (saa <= 0 || sbb <= 0) return 0;
    return sab / std::sqrt(saa * sbb);
}

} // namespace

void ModelSpec::validate() const {
    if (covariates.empty()) throw Error("ModelSpec: no covariates");
    std::set<int> seen;
    bool has_weeks = false;
    for (int c : covariates) {
        if (c < 0 || c >= kNumCovariates) throw Error("ModelSpec: covariate index out of range");
        if (!seen.insert(c).second) throw Error("ModelSpec: duplicate covariate");
        if (c == 0) has_weeks = true;
    }
    if (!has_weeks) throw Error("ModelSpec: weeks_since_2020 (column 0) must be included");
}

ModelSpec ModelSpec::builtin(const std::string& name) {
    ModelSpec spec;
    spec.name = name;
    spec.covariates = {0, 1, 2, 3, 4, 5, 6};
    if (name == "model1") {
    } else if (name == "model2") {
        spec.filter = CovidFilter::limited;
    } else if (name == "model3") {
        // Same specification as model1; the Massachusetts-cluster removal
        // is applied through the exclusion list at curation time.
    } else if (name == "model4") {
        spec.covariates = {0, 1, 3, 4, 6}; // no state-level rates
    } else if (name == "model5") {
        spec.covariates = {0, 2, 3, 5, 6}; // no county-level rates
    } else if (name == "lag_both") {
        spec.lag = LagSetting::both;
    } else if (name == "lag_cases") {
        spec.lag = LagSetting::cases;
    } else if (name == "lag_deaths") {
        spec.lag = LagSetting::deaths;
    } else {
        throw Error("unknown model '" + name + "'");
    }
    return spec;
}

std::vector<std::string> ModelSpec::builtin_names() {
    return {"model1", "model2", "model3", "model4", "model5", "lag_both", "lag_cases", "lag_deaths"};
}

Eigen::VectorXd GlmFit::full_coefs() const {
    Eigen::VectorXd out(beta.size() + fe.size());
    out << beta, fe;
    return out;
}

double glm_loglik(const GlmData& data, const Eigen::VectorXd& full_coefs) {
    Eigen::MatrixXd x = full_design(data);
    Eigen::VectorXd eta = x * full_coefs;
    return loglik_at(data, eta, comb_constant(data));
}

GlmFit fit_glm(const GlmData& data, const FitOptions& options) {
    validate_data(data);
    const int n = data.n_rows(), k = data.n_covariates(), g = data.n_outlets();
    const int p = k + g;

    Eigen::MatrixXd x = full_design(data);
    check_rank(data, x);

    const double comb = comb_constant(data);

    // Start covariates at zero and fixed effects at the smoothed
    // empirical log-odds of each outlet.
    Eigen::VectorXd coefs = Eigen::VectorXd::Zero(p);
    {
        Eigen::VectorXd sum_y = Eigen::VectorXd::Zero(g), sum_n = Eigen::VectorXd::Zero(g);
        for (int i = 0; i < n; ++i) {
            sum_y[data.outlet[i]] += data.y[i];
            sum_n[data.outlet[i]] += data.trials[i];
        }
        for (int gi = 0; gi < g; ++gi)
            coefs[k + gi] = std::log((sum_y[gi] + 0.5) / (sum_n[gi] - sum_y[gi] + 0.5));
    }

    Eigen::VectorXd eta = x * coefs;
    double ll = loglik_at(data, eta, comb);

    bool converged = false;
    int iter = 0;
    Eigen::VectorXd prob(n), w(n), z(n);
    for (; iter < options.max_iterations; ++iter) {
        for (int i = 0; i < n; ++i) {
            double e = std::clamp(eta[i], -kEtaClamp, kEtaClamp);
            double pi = logistic(e);
            prob[i] = pi;
            double wi = data.trials[i] * pi * (1 - pi);
            w[i] = std::max(wi, 1e-12);
            z[i] = e + (data.y[i] - data.trials[i] * pi) / w[i];
        }

        Eigen::MatrixXd xtwx = x.transpose() * w.asDiagonal() * x;
        Eigen::VectorXd xtwz = x.transpose() * (w.asDiagonal() * z);
        Eigen::VectorXd proposal = xtwx.ldlt().solve(xtwz);
        if (!proposal.allFinite()) throw SingularInformation("IRLS normal equations are singular");

        // Step-halving keeps the deviance non-increasing.
        Eigen::VectorXd candidate = proposal;
        double new_ll = loglik_at(data, x * candidate, comb);
        int halvings = 0;
        while (new_ll < ll && halvings < options.max_halvings) {
            candidate = 0.5 * (candidate + coefs);
            new_ll = loglik_at(data, x * candidate, comb);
            ++halvings;
        }

        double max_delta = (candidate - coefs).cwiseAbs().maxCoeff();
        coefs = candidate;
        eta = x * coefs;
        ll = new_ll;

        for (int i = 0; i < n; ++i) prob[i] = logistic(std::clamp(eta[i], -kEtaClamp, kEtaClamp));
        check_separation(data, prob);

        if (max_delta < options.coef_tol) {
            converged = true;
            ++iter;
            break;
        }
    }

    GlmFit fit;
    fit.coef_names = data.coef_names;
    fit.outlet_ids = data.outlet_ids;
    fit.beta = coefs.head(k);
    fit.fe = coefs.tail(g);
    fit.loglik = ll;
    fit.n_obs = n;
    fit.converged = converged;
    fit.iterations = iter;
    fit.data = data;
    fit.fitted_p = prob;
    fit.bic = -2.0 * ll + double(p) * std::log(double(n));

    // One-way clustering on the outlet is the default covariance; a
    // single-outlet fit falls back to the model-based A^-1.
    if (g >= 2) {
        fit.vcov_clustered = clustered_vcov(fit, data.outlet);
    } else {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
        Eigen::VectorXd fx(p);
        for (int i = 0; i < n; ++i) {
            fx.setZero();
            for (int c = 0; c < k; ++c) fx[c] = data.x(i, c);
            fx[k + data.outlet[i]] = 1.0;
            double wi = data.trials[i] * prob[i] * (1 - prob[i]);
            a.noalias() += wi * fx * fx.transpose();
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) throw SingularInformation("information matrix is singular");
        fit.vcov_clustered = lu.inverse();
    }

    // Squared correlation of observed shares with fitted probabilities.
    Eigen::VectorXd shares(n);
    for (int i = 0; i < n; ++i) shares[i] = data.y[i] / data.trials[i];
    double r = pearson_corr(shares, prob);
    fit.squared_correlation = r * r;

    // McFadden pseudo R^2 against the intercept-only grouped binomial.
    double total_y = data.y.sum(), total_n = data.trials.sum();
    double p0 = std::clamp(total_y / total_n, 1e-12, 1.0 - 1e-12);
    double eta0 = std::log(p0 / (1.0 - p0));
    double ll_null = comb;
    for (int i = 0; i < n; ++i) ll_null += data.y[i] * eta0 - data.trials[i] * log1pexp(eta0);
    fit.pseudo_r2 = (std::abs(ll_null) > 1e-300) ? 1.0 - ll / ll_null : 0.0;

    return fit;
}

GlmFit fit(const Panel& panel, const ModelSpec& spec, const FitOptions& options) {
    spec.validate();
    const Panel* source = &panel;
    Panel lagged;
    if (spec.lag != LagSetting::none) {
        lagged = lag_covariates(panel, spec.lag);
        source = &lagged;
    }

    std::map<std::string, int> outlet_index;
    for (const auto& row : source->rows)
        outlet_index.emplace(row.outlet_id, 0);
    int next = 0;
    for (auto& [id, idx] : outlet_index) idx = next++;

    GlmData data;
    const int n = int(source->rows.size());
    const int k = int(spec.covariates.size());
    data.x.resize(n, k);
    data.y.resize(n);
    data.trials.resize(n);
    data.outlet.resize(n);
    data.outlet_ids.resize(outlet_index.size());
    for (const auto& [id, idx] : outlet_index) data.outlet_ids[idx] = id;
    for (int c = 0; c < k; ++c) data.coef_names.push_back(kCovariateNames[spec.covariates[c]]);

    for (int i = 0; i < n; ++i) {
        const PanelRow& row = source->rows[i];
        for (int c = 0; c < k; ++c) data.x(i, c) = row.z[spec.covariates[c]];
        data.y[i] = double(row.covid_count);
        data.trials[i] = double(row.total_count);
        data.outlet[i] = outlet_index[row.outlet_id];
    }
    return fit_glm(data, options);
}

Eigen::MatrixXd clustered_vcov(const GlmFit& fit, const std::vector<int>& cluster_of_row) {
    const GlmData& data = fit.data;
    const int n = data.n_rows(), k = data.n_covariates(), g = data.n_outlets();
    const int p = k + g;
    if (int(cluster_of_row.size()) != n) throw Error("clustered_vcov: cluster id per row required");

    // Bread and meat are accumulated row by row so the single-row-cluster
    // case reproduces the robust sandwich bit for bit.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd fx(p);
    for (int i = 0; i < n; ++i) {
        fx.setZero();
        for (int c = 0; c < k; ++c) fx[c] = data.x(i, c);
        fx[k + data.outlet[i]] = 1.0;
        double pi = fit.fitted_p[i];
        double wi = data.trials[i] * pi * (1 - pi);
        a.noalias() += wi * fx * fx.transpose();
    }

    std::map<int, Eigen::VectorXd> scores;
    for (int i = 0; i < n; ++i) {
        fx.setZero();
        for (int c = 0; c < k; ++c) fx[c] = data.x(i, c);
        fx[k + data.outlet[i]] = 1.0;
        double resid = data.y[i] - data.trials[i] * fit.fitted_p[i];
        auto [it, inserted] = scores.try_emplace(cluster_of_row[i], Eigen::VectorXd::Zero(p));
        it->second.noalias() += resid * fx;
    }

    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(p, p);
    for (const auto& [cid, gvec] : scores) b.noalias() += gvec * gvec.transpose();

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw SingularInformation("information matrix is singular");
    Eigen::MatrixXd ainv = lu.inverse();

    const double n_clusters = double(scores.size());
    if (n_clusters < 2) throw SingularInformation("need at least 2 clusters");
    double factor = n_clusters / (n_clusters - 1.0);
    return factor * (ainv * b * ainv);
}

double odds_change(double beta_j) { return std::expm1(beta_j); }

Eigen::VectorXd centered_fe(const GlmFit& fit) {
    double mean = fit.fe.mean();
    return (fit.fe.array() - mean).exp();
}

FitStats fit_stats(const GlmFit& fit) {
    return FitStats{fit.squared_correlation, fit.pseudo_r2, fit.bic};
}

std::vector<ModelComparisonRow> compare_models(const std::vector<const GlmFit*>& fits,
                                               const std::vector<std::string>& names) {
    if (fits.size() != names.size()) throw Error("compare_models: names must match fits");
    std::vector<ModelComparisonRow> rows;
    for (size_t i = 0; i < fits.size(); ++i) {
        const GlmFit* f = fits[i];
        rows.push_back({names[i], f->bic, f->loglik,
                        int(f->beta.size() + f->fe.size()), f->squared_correlation, f->n_obs});
    }
    std::sort(rows.begin(), rows.end(), [](const ModelComparisonRow& a, const ModelComparisonRow& b) {
        if (a.bic != b.bic) return a.bic < b.bic;
        if (a.parameters != b.parameters) return a.parameters < b.parameters;
        return a.name < b.name;
    });
    return rows;
}

} // namespace newspulse
