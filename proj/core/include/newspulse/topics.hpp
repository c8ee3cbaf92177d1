#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "newspulse/vocab.hpp"

namespace newspulse {

// Covariate-aware mixed-membership topic model: document-topic
// proportions follow a logistic-normal prior whose mean is a linear
// function of the document's spline basis row (time), so topic
// prevalence varies smoothly with the covariate. Fitting is variational
// EM with a per-document Gaussian posterior and the usual log-sum-exp
// linearization, which makes every update a block maximization of the
// ELBO.
struct TopicModel {
    int K = 0;
    Eigen::MatrixXd phi;    // K x V topic-word distributions, rows sum to 1
    Eigen::MatrixXd theta;  // D x K document-topic proportions, rows sum to 1
    Eigen::MatrixXd lambda; // D x (K-1) variational posterior means
    Eigen::MatrixXd gamma;  // df x (K-1): spline basis -> prevalence mean
    Eigen::MatrixXd sigma;  // (K-1) x (K-1) prevalence covariance
    std::vector<double> elbo_trace; // one value per EM iteration, non-decreasing
    uint64_t seed = 0;
    int spline_df = 0;
};

struct TopicFitOptions {
    int max_iterations = 200;
    double rel_tol = 1e-5;         // relative ELBO change stopping rule
    int inner_max_iterations = 50; // per-document updates
    double inner_tol = 1e-6;
    double phi_smoothing = 1e-3;   // Dirichlet(1 + s) prior on topic rows
    int threads = 1;               // E-step chunks; results agree across thread counts

    // Random Dirichlet starts evaluated for burn_iterations each; the
    // best ELBO continues to a full fit. All derived from the seed.
    int n_starts = 3;
    int burn_iterations = 15;
};

// Fits K topics to the document-term counts with the given basis
// (rows = docs). Deterministic for a fixed seed. Throws Diverged when
// the ELBO falls beyond slack for 3 consecutive iterations.
TopicModel fit_model(const std::vector<DocTerms>& docs, int vocab_size, const Eigen::MatrixXd& basis,
                     int K, uint64_t seed, const TopicFitOptions& options = {});

// Posterior topic proportions for one document against a fitted model
// (used for held-out scoring and new documents).
Eigen::VectorXd infer_theta(const TopicModel& model, const DocTerms& doc,
                            const Eigen::RowVectorXd& basis_row, const TopicFitOptions& options = {});

struct KSelection {
    struct Entry {
        int k = 0;
        double heldout_loglik = 0;
        double perplexity = 0;
        long long heldout_tokens = 0;
    };
    int best_k = 0;
    std::vector<Entry> entries;
};

// Document-completion evaluation: a random `holdout_fraction` of the
// documents have half their tokens held out; models train on the rest,
// theta is inferred from the observed halves, and held-out tokens score
// log sum_k theta_k phi_kw. Best K maximizes held-out log-likelihood
// (equivalently minimizes perplexity).
KSelection select_k(const std::vector<DocTerms>& docs, int vocab_size, const Eigen::MatrixXd& basis,
                    const std::vector<int>& k_grid, double holdout_fraction, uint64_t seed,
                    const TopicFitOptions& options = {});

// The m highest-probability terms of a topic; ties break alphabetically.
std::vector<std::string> top_words(const TopicModel& model, const Vocabulary& vocab, int topic,
                                   int m = 7);

// Mean topic proportions (as percentages) over the documents of one
// week. Throws EmptyWeek when the week has no documents.
Eigen::VectorXd expected_topic_share(const TopicModel& model, const std::vector<int>& doc_weeks,
                                     int week);

// Single-file serialization: plain-text header (K, V, D, df, seed) and
// vocabulary, then little-endian 64-bit floats for the parameter blocks.
void save_topic_model(const TopicModel& model, const Vocabulary& vocab, const std::string& path);

struct LoadedTopicModel {
    TopicModel model;
    Vocabulary vocab;
};
LoadedTopicModel load_topic_model(const std::string& path);

} // namespace newspulse
