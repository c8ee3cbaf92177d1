#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "newspulse/panel.hpp"

namespace newspulse {

// Grouped binomial observations with an outlet fixed effect per group.
// The design solved is [covariates | outlet dummies], no global intercept.
struct GlmData {
    Eigen::MatrixXd x;              // n_rows x k covariate matrix
    std::vector<int> outlet;        // 0..G-1 group index per row
    Eigen::VectorXd y;              // successes
    Eigen::VectorXd trials;         // n >= 1
    std::vector<std::string> coef_names;
    std::vector<std::string> outlet_ids;

    int n_rows() const { return int(x.rows()); }
    int n_covariates() const { return int(x.cols()); }
    int n_outlets() const { return int(outlet_ids.size()); }
};

struct ModelSpec {
    std::string name = "model1";
    std::vector<int> covariates;   // panel column indices; must include 0 (weeks)
    LagSetting lag = LagSetting::none;
    CovidFilter filter = CovidFilter::full;

    void validate() const;

    // The paper's specifications: model1 (all covariates, full filter),
    // model2 (limited filter), model4/model5 (drop state / county rates),
    // and the lagged variants lag_both, lag_cases, lag_deaths.
    static ModelSpec builtin(const std::string& name);
    static std::vector<std::string> builtin_names();
};

struct FitOptions {
    double coef_tol = 1e-8;
    int max_iterations = 100;
    int max_halvings = 10;
};

struct GlmFit {
    std::vector<std::string> coef_names;
    Eigen::VectorXd beta;          // covariate coefficients
    std::vector<std::string> outlet_ids;
    Eigen::VectorXd fe;            // alpha_i per outlet

    // Sandwich covariance of the full parameter vector
    // [beta; fe], one-way clustered by outlet.
    Eigen::MatrixXd vcov_clustered;

    double loglik = 0;
    double bic = 0;
    double squared_correlation = 0;
    double pseudo_r2 = 0;
    int n_obs = 0;
    bool converged = false;
    int iterations = 0;

    // Row-level state retained for covariance recomputation and checks.
    GlmData data;
    Eigen::VectorXd fitted_p;

    double beta_se(int j) const { return std::sqrt(vcov_clustered(j, j)); }
    Eigen::VectorXd full_coefs() const;
};

// Maximizes the grouped binomial log-likelihood by IRLS over the joint
// [covariates | dummies] design. Throws RankDeficient (naming the
// collinear columns), Separation (naming the outlet) and Error for
// precondition violations (an outlet with fewer than 2 rows).
GlmFit fit_glm(const GlmData& data, const FitOptions& options = {});

// Builds GlmData from a standardized panel and fits the given spec.
// Lagging per spec.lag is applied here.
GlmFit fit(const Panel& panel, const ModelSpec& spec, const FitOptions& options = {});

// Sandwich estimator A^-1 B A^-1 with A the expected information, B the
// clustered score outer products, and small-sample factor G/(G-1).
// cluster_of_row maps each row to a cluster id.
Eigen::MatrixXd clustered_vcov(const GlmFit& fit, const std::vector<int>& cluster_of_row);

// Log-likelihood (including binomial coefficients) at arbitrary
// parameter values [beta; fe]; used by gradient checks.
double glm_loglik(const GlmData& data, const Eigen::VectorXd& full_coefs);

// exp(beta_j) - 1: fractional odds change per one-unit (one-SD, for
// standardized covariates) predictor change.
double odds_change(double beta_j);

// exp(alpha_i - mean(alpha)); log-multipliers average to zero.
Eigen::VectorXd centered_fe(const GlmFit& fit);

struct FitStats {
    double squared_correlation = 0;
    double pseudo_r2 = 0;
    double bic = 0;
};
FitStats fit_stats(const GlmFit& fit);

struct ModelComparisonRow {
    std::string name;
    double bic = 0;
    double loglik = 0;
    int parameters = 0;
    double squared_correlation = 0;
    int n_obs = 0;
};

// Ascending BIC; ties break toward fewer parameters, then name.
std::vector<ModelComparisonRow> compare_models(const std::vector<const GlmFit*>& fits,
                                               const std::vector<std::string>& names);

} // namespace newspulse
