#include "newspulse/topics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "newspulse/errors.hpp"

namespace newspulse {

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa draw; identical across platforms.
    return double(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Per-document variational state. lambda/nu2 live in R^{K-1}; the K-th
// logit is pinned at zero.
struct DocVar {
    Eigen::VectorXd lambda;
    Eigen::VectorXd nu2;
    double zeta = 1.0;
};

struct ModelState {
    int K = 0;
    int V = 0;
    Eigen::MatrixXd log_phi; // K x V
    Eigen::MatrixXd gamma;   // df x (K-1)
    Eigen::MatrixXd sigma_inv;
    double sigma_logdet = 0;
};

struct DocResult {
    double lse_sum = 0;        // sum_u n_u * logsumexp_k(lambda~_k + log phi_ku)
    double cross_old = 0;      // sum_ku n_u q_uk log phi_ku (against current phi)
    double zeta_term = 0;      // -N * c_d
};

// One full variational update pass for a document: optimal q(z), then
// zeta, then a Newton step chain on lambda, then exact nu2 roots. Each
// block maximizes the document's ELBO contribution given the others.
DocResult e_step_doc(const DocTerms& doc, const Eigen::RowVectorXd& mu, const ModelState& model,
                     DocVar& var, const TopicFitOptions& options, Eigen::MatrixXd* counts_out) {
    const int K = model.K;
    const int Km1 = K - 1;
    const int U = int(doc.counts.size());
    const double N = double(doc.total);
    const Eigen::VectorXd s_diag = model.sigma_inv.diagonal();

    Eigen::MatrixXd q(U, K);        // responsibilities per unique term
    Eigen::VectorXd m = Eigen::VectorXd::Zero(K); // expected topic counts
    Eigen::VectorXd lam_t(K);       // lambda~ (lambda, 0)

    auto lambda_tilde = [&]() {
        lam_t.head(Km1) = var.lambda;
        lam_t[Km1] = 0.0;
    };

    auto update_q = [&]() -> double {
        lambda_tilde();
        m.setZero();
        double lse_sum = 0;
        for (int u = 0; u < U; ++u) {
            const int w = doc.counts[u].first;
            const double n_u = double(doc.counts[u].second);
            double mx = -1e300;
            for (int k = 0; k < K; ++k) {
                double v = lam_t[k] + model.log_phi(k, w);
                q(u, k) = v;
                if (v > mx) mx = v;
            }
            double sum = 0;
            for (int k = 0; k < K; ++k) sum += std::exp(q(u, k) - mx);
            double lse = mx + std::log(sum);
            lse_sum += n_u * lse;
            for (int k = 0; k < K; ++k) {
                q(u, k) = std::exp(q(u, k) - lse);
                m[k] += n_u * q(u, k);
            }
        }
        return lse_sum;
    };

    auto update_zeta = [&]() {
        lambda_tilde();
        double z = 1.0; // k = K term: exp(0 + 0)
        for (int k = 0; k < Km1; ++k) z += std::exp(var.lambda[k] + 0.5 * var.nu2[k]);
        var.zeta = z;
    };

    // Bound terms that depend on lambda with q, zeta, nu2 fixed.
    auto lambda_objective = [&](const Eigen::VectorXd& lam) {
        Eigen::VectorXd r = lam - mu.transpose();
        double g = -0.5 * r.dot(model.sigma_inv * r);
        g += m.head(Km1).dot(lam);
        double expsum = 1.0;
        for (int k = 0; k < Km1; ++k) expsum += std::exp(lam[k] + 0.5 * var.nu2[k]);
        g -= (N / var.zeta) * expsum;
        return g;
    };

    auto update_lambda = [&]() {
        for (int newton = 0; newton < 8; ++newton) {
            Eigen::VectorXd u(Km1);
            for (int k = 0; k < Km1; ++k) u[k] = std::exp(var.lambda[k] + 0.5 * var.nu2[k]);
            Eigen::VectorXd grad = -model.sigma_inv * (var.lambda - mu.transpose()) + m.head(Km1) -
                                   (N / var.zeta) * u;
            if (grad.cwiseAbs().maxCoeff() < 1e-10) break;
            Eigen::MatrixXd hess = model.sigma_inv;
            hess.diagonal() += (N / var.zeta) * u;
            Eigen::VectorXd step = hess.ldlt().solve(grad);

            double g0 = lambda_objective(var.lambda);
            double scale = 1.0;
            bool accepted = false;
            for (int half = 0; half < 20; ++half) {
                Eigen::VectorXd cand = var.lambda + scale * step;
                if (lambda_objective(cand) > g0) {
                    var.lambda = cand;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if (!accepted) break;
        }
    };

    auto update_nu2 = [&]() {
        for (int k = 0; k < Km1; ++k) {
            const double a = s_diag[k];
            const double b = (N / var.zeta) * std::exp(var.lambda[k]);
            // Unique root of 1/x = a + b exp(x/2).
            double lo = 1e-12, hi = std::max(2.0 / std::max(a, 1e-12), 1.0);
            auto h = [&](double x) { return 1.0 / x - a - b * std::exp(0.5 * x); };
            while (h(hi) > 0 && hi < 1e8) hi *= 2;
            double x = std::clamp(var.nu2[k], lo, hi);
            for (int it = 0; it < 50; ++it) {
                double hx = h(x);
                if (hx > 0) lo = x;
                else hi = x;
                double dh = -1.0 / (x * x) - 0.5 * b * std::exp(0.5 * x);
                double nx = x - hx / dh;
                if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
                if (std::abs(nx - x) < 1e-13 * (1.0 + x)) {
                    x = nx;
                    break;
                }
                x = nx;
            }
            var.nu2[k] = x;
        }
    };

    auto bound_value = [&](double lse_sum) {
        lambda_tilde();
        Eigen::VectorXd r = var.lambda - mu.transpose();
        double gauss = -0.5 * model.sigma_logdet - 0.5 * s_diag.dot(var.nu2) -
                       0.5 * r.dot(model.sigma_inv * r) + 0.5 * var.nu2.array().log().sum() +
                       0.5 * double(Km1);
        double expsum = 1.0;
        for (int k = 0; k < Km1; ++k) expsum += std::exp(var.lambda[k] + 0.5 * var.nu2[k]);
        double c = expsum / var.zeta - 1.0 + std::log(var.zeta);
        return gauss + lse_sum - N * c;
    };

    double prev_bound = -1e300;
    double lse_sum = 0;
    for (int inner = 0; inner < options.inner_max_iterations; ++inner) {
        lse_sum = update_q();
        update_zeta();
        update_lambda();
        update_nu2();
        double bound = bound_value(lse_sum);
        if (std::abs(bound - prev_bound) < options.inner_tol * (1.0 + std::abs(bound))) {
            prev_bound = bound;
            break;
        }
        prev_bound = bound;
    }
    // Final q consistent with the final lambda.
    lse_sum = update_q();
    update_zeta();

    DocResult result;
    result.lse_sum = lse_sum;
    for (int u = 0; u < U; ++u) {
        const int w = doc.counts[u].first;
        const double n_u = double(doc.counts[u].second);
        for (int k = 0; k < K; ++k) {
            double c = n_u * q(u, k);
            result.cross_old += c * model.log_phi(k, w);
            if (counts_out) (*counts_out)(k, w) += c;
        }
    }
    lambda_tilde();
    double expsum = 1.0;
    for (int k = 0; k < Km1; ++k) expsum += std::exp(var.lambda[k] + 0.5 * var.nu2[k]);
    double c_d = expsum / var.zeta - 1.0 + std::log(var.zeta);
    result.zeta_term = -N * c_d;
    return result;
}

Eigen::VectorXd softmax_theta(const Eigen::VectorXd& lambda) {
    const int Km1 = int(lambda.size());
    Eigen::VectorXd logits(Km1 + 1);
    logits.head(Km1) = lambda;
    logits[Km1] = 0;
    double mx = logits.maxCoeff();
    Eigen::VectorXd theta = (logits.array() - mx).exp();
    return theta / theta.sum();
}

void refresh_sigma(ModelState& state, const Eigen::MatrixXd& sigma) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    Eigen::MatrixXd work = sigma;
    if (llt.info() != Eigen::Success) {
        work.diagonal().array() += 1e-10;
        llt.compute(work);
        if (llt.info() != Eigen::Success) throw Diverged("prevalence covariance lost positive definiteness");
    }
    state.sigma_inv = llt.solve(Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols()));
    state.sigma_logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

} // namespace

namespace {

TopicModel run_em(const std::vector<DocTerms>& docs, int vocab_size, const Eigen::MatrixXd& basis,
                  int K, uint64_t init_seed, const TopicFitOptions& options, int max_iterations) {
    const int D = int(docs.size());
    const int df = int(basis.cols());
    const int Km1 = K - 1;

    TopicModel model;
    model.K = K;
    model.seed = init_seed;
    model.spline_df = df;

    // Seeded random Dirichlet(1) topic rows; prevalence starts flat.
    std::mt19937_64 rng(init_seed);
    model.phi.resize(K, vocab_size);
    for (int k = 0; k < K; ++k) {
        double sum = 0;
        for (int w = 0; w < vocab_size; ++w) {
            double e = -std::log(std::max(uniform01(rng), 1e-300));
            model.phi(k, w) = e;
            sum += e;
        }
        model.phi.row(k) /= sum;
    }
    model.gamma = Eigen::MatrixXd::Zero(df, Km1);
    model.sigma = Eigen::MatrixXd::Identity(Km1, Km1);

    std::vector<DocVar> vars(D);
    for (auto& v : vars) {
        v.lambda = Eigen::VectorXd::Zero(Km1);
        v.nu2 = Eigen::VectorXd::Ones(Km1);
    }

    ModelState state;
    state.K = K;
    state.V = vocab_size;
    state.gamma = model.gamma;
    refresh_sigma(state, model.sigma);

    // The basis never changes; factor once for the gamma regressions.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> basis_qr(basis);

    const double smoothing = options.phi_smoothing;
    const int n_threads = std::max(1, options.threads);
    int drops = 0;

    for (int iter = 0; iter < max_iterations; ++iter) {
        state.log_phi = model.phi.array().max(1e-300).log();
        Eigen::MatrixXd mu = basis * state.gamma; // D x (K-1)

        // E-step over fixed contiguous chunks; chunk partials combine in
        // order, so results do not depend on scheduling.
        std::vector<Eigen::MatrixXd> counts(n_threads, Eigen::MatrixXd::Zero(K, vocab_size));
        std::vector<double> lse(n_threads, 0.0), cross(n_threads, 0.0), zterm(n_threads, 0.0);
        auto run_chunk = [&](int t) {
            const int lo = int(int64_t(D) * t / n_threads);
            const int hi = int(int64_t(D) * (t + 1) / n_threads);
            for (int d = lo; d < hi; ++d) {
                DocResult r = e_step_doc(docs[d], mu.row(d), state, vars[d], options, &counts[t]);
                lse[t] += r.lse_sum;
                cross[t] += r.cross_old;
                zterm[t] += r.zeta_term;
            }
        };
        if (n_threads == 1) {
            run_chunk(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < n_threads; ++t) pool.emplace_back(run_chunk, t);
            for (auto& th : pool) th.join();
        }
        Eigen::MatrixXd expected_counts = std::move(counts[0]);
        double lse_total = lse[0], cross_total = cross[0], zeta_total = zterm[0];
        for (int t = 1; t < n_threads; ++t) {
            expected_counts += counts[t];
            lse_total += lse[t];
            cross_total += cross[t];
            zeta_total += zterm[t];
        }

        // M-step: topic rows from expected counts (Dirichlet-smoothed),
        // prevalence coefficients by least squares of the posterior
        // means on the basis, then the covariance.
        for (int k = 0; k < K; ++k) {
            double row_sum = expected_counts.row(k).sum() + smoothing * vocab_size;
            model.phi.row(k) = (expected_counts.row(k).array() + smoothing) / row_sum;
        }

        Eigen::MatrixXd lambda_mat(D, Km1);
        Eigen::MatrixXd nu2_mat(D, Km1);
        for (int d = 0; d < D; ++d) {
            lambda_mat.row(d) = vars[d].lambda.transpose();
            nu2_mat.row(d) = vars[d].nu2.transpose();
        }
        model.gamma = basis_qr.solve(lambda_mat);
        state.gamma = model.gamma;

        Eigen::MatrixXd resid = lambda_mat - basis * model.gamma;
        Eigen::MatrixXd sigma = (resid.transpose() * resid) / double(D);
        sigma.diagonal() += nu2_mat.colwise().mean();
        sigma = 0.5 * (sigma + sigma.transpose()).eval();
        model.sigma = sigma;
        refresh_sigma(state, model.sigma);

        // ELBO with the updated model.
        Eigen::MatrixXd log_phi_new = model.phi.array().max(1e-300).log();
        double token_part = (expected_counts.array() * log_phi_new.array()).sum() +
                            smoothing * log_phi_new.sum();
        Eigen::MatrixXd mu_new = basis * state.gamma;
        Eigen::MatrixXd resid_new = lambda_mat - mu_new;
        double quad = (resid_new * state.sigma_inv).cwiseProduct(resid_new).sum();
        double trace_term = state.sigma_inv.diagonal().dot(nu2_mat.colwise().sum().transpose());
        double gauss = -0.5 * double(D) * state.sigma_logdet - 0.5 * trace_term - 0.5 * quad +
                       0.5 * nu2_mat.array().log().sum() + 0.5 * double(D) * double(Km1);
        // lse_total carries the token bound against the pre-update phi;
        // swap in the refreshed topic rows via the expected counts.
        double elbo = (lse_total - cross_total) + token_part + zeta_total + gauss;

        model.elbo_trace.push_back(elbo);
        size_t t = model.elbo_trace.size();
        if (t >= 2) {
            double prev = model.elbo_trace[t - 2];
            if (elbo < prev - 1e-6) {
                if (++drops >= 3)
                    throw Diverged("ELBO fell for 3 consecutive iterations (" + std::to_string(prev) +
                                   " -> " + std::to_string(elbo) + ")");
            } else {
                drops = 0;
            }
            if (std::abs(elbo - prev) < options.rel_tol * std::abs(elbo)) break;
        }
    }

    model.lambda.resize(D, Km1);
    model.theta.resize(D, K);
    for (int d = 0; d < D; ++d) {
        model.lambda.row(d) = vars[d].lambda.transpose();
        model.theta.row(d) = softmax_theta(vars[d].lambda).transpose();
    }
    return model;
}

} // namespace

TopicModel fit_model(const std::vector<DocTerms>& docs, int vocab_size, const Eigen::MatrixXd& basis,
                     int K, uint64_t seed, const TopicFitOptions& options) {
    if (K < 2) throw Error("fit_model: K must be >= 2");
    if (vocab_size < 1) throw EmptyVocabulary("fit_model: empty vocabulary");
    if (basis.rows() != long(docs.size())) throw Error("fit_model: basis rows must match document count");

    // Short burn runs pick the best of a few seeded Dirichlet starts;
    // the winner is refit in full so its ELBO trace stands alone.
    uint64_t best_seed = seed;
    if (options.n_starts > 1 && options.burn_iterations > 0) {
        double best_elbo = -std::numeric_limits<double>::infinity();
        for (int r = 0; r < options.n_starts; ++r) {
            uint64_t candidate = seed + 0x51'7c'c1'b7'27'22'0a95ULL * uint64_t(r);
            TopicModel burn = run_em(docs, vocab_size, basis, K, candidate, options,
                                     options.burn_iterations);
            if (!burn.elbo_trace.empty() && burn.elbo_trace.back() > best_elbo) {
                best_elbo = burn.elbo_trace.back();
                best_seed = candidate;
            }
        }
    }
    TopicModel model = run_em(docs, vocab_size, basis, K, best_seed, options, options.max_iterations);
    model.seed = seed;
    return model;
}

Eigen::VectorXd infer_theta(const TopicModel& model, const DocTerms& doc,
                            const Eigen::RowVectorXd& basis_row, const TopicFitOptions& options) {
    ModelState state;
    state.K = model.K;
    state.V = int(model.phi.cols());
    state.log_phi = model.phi.array().max(1e-300).log();
    state.gamma = model.gamma;
    refresh_sigma(state, model.sigma);

    DocVar var;
    var.lambda = Eigen::VectorXd::Zero(model.K - 1);
    var.nu2 = Eigen::VectorXd::Ones(model.K - 1);
    Eigen::RowVectorXd mu = basis_row * model.gamma;
    e_step_doc(doc, mu, state, var, options, nullptr);
    return softmax_theta(var.lambda);
}

KSelection select_k(const std::vector<DocTerms>& docs, int vocab_size, const Eigen::MatrixXd& basis,
                    const std::vector<int>& k_grid, double holdout_fraction, uint64_t seed,
                    const TopicFitOptions& options) {
    if (k_grid.empty()) throw Error("select_k: empty grid");
    const int D = int(docs.size());

    // Pick held-out documents among those with at least 2 tokens.
    std::vector<int> eligible;
    for (int d = 0; d < D; ++d)
        if (docs[d].total >= 2) eligible.push_back(d);
    if (eligible.empty()) throw Error("select_k: no documents with >= 2 tokens");

    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 1);
    for (size_t i = eligible.size(); i > 1; --i) {
        size_t j = size_t(uniform01(rng) * double(i));
        if (j >= i) j = i - 1;
        std::swap(eligible[i - 1], eligible[j]);
    }
    size_t n_test = std::max<size_t>(1, size_t(holdout_fraction * double(eligible.size()) + 0.5));
    n_test = std::min(n_test, eligible.size());
    std::vector<int> test_docs(eligible.begin(), eligible.begin() + long(n_test));
    std::sort(test_docs.begin(), test_docs.end());

    // Split each test document's tokens in half.
    std::vector<DocTerms> train = docs;
    std::vector<DocTerms> held(test_docs.size());
    for (size_t t = 0; t < test_docs.size(); ++t) {
        const DocTerms& doc = docs[test_docs[t]];
        std::vector<int> instances;
        for (const auto& [w, c] : doc.counts)
            for (int i = 0; i < c; ++i) instances.push_back(w);
        for (size_t i = instances.size(); i > 1; --i) {
            size_t j = size_t(uniform01(rng) * double(i));
            if (j >= i) j = i - 1;
            std::swap(instances[i - 1], instances[j]);
        }
        size_t n_held = instances.size() / 2;
        std::map<int, int> obs, hld;
        for (size_t i = 0; i < instances.size(); ++i) {
            if (i < n_held) ++hld[instances[i]];
            else ++obs[instances[i]];
        }
        DocTerms obs_doc, held_doc;
        for (const auto& [w, c] : obs) {
            obs_doc.counts.emplace_back(w, c);
            obs_doc.total += c;
        }
        for (const auto& [w, c] : hld) {
            held_doc.counts.emplace_back(w, c);
            held_doc.total += c;
        }
        train[test_docs[t]] = obs_doc;
        held[t] = held_doc;
    }

    KSelection selection;
    double best_ll = -1e300;
    for (int k : k_grid) {
        uint64_t k_seed = seed * 1000003ULL + uint64_t(k);
        TopicModel model = fit_model(train, vocab_size, basis, k, k_seed, options);

        double ll = 0;
        long long tokens = 0;
        for (size_t t = 0; t < test_docs.size(); ++t) {
            if (held[t].total == 0) continue;
            Eigen::VectorXd theta =
                infer_theta(model, train[test_docs[t]], basis.row(test_docs[t]), options);
            for (const auto& [w, c] : held[t].counts) {
                double p = theta.dot(model.phi.col(w));
                ll += double(c) * std::log(std::max(p, 1e-300));
                tokens += c;
            }
        }
        KSelection::Entry entry;
        entry.k = k;
        entry.heldout_loglik = ll;
        entry.heldout_tokens = tokens;
        entry.perplexity = tokens > 0 ? std::exp(-ll / double(tokens)) : 0.0;
        selection.entries.push_back(entry);
        if (ll > best_ll) {
            best_ll = ll;
            selection.best_k = k;
        }
    }
    return selection;
}

std::vector<std::string> top_words(const TopicModel& model, const Vocabulary& vocab, int topic,
                                   int m) {
    if (topic < 0 || topic >= model.K) throw Error("top_words: topic index out of range");
    const int V = int(model.phi.cols());
    std::vector<int> order(V);
    for (int w = 0; w < V; ++w) order[w] = w;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (model.phi(topic, a) != model.phi(topic, b)) return model.phi(topic, a) > model.phi(topic, b);
        return vocab.terms[a] < vocab.terms[b];
    });
    std::vector<std::string> out;
    for (int i = 0; i < std::min(m, V); ++i) out.push_back(vocab.terms[order[i]]);
    return out;
}

Eigen::VectorXd expected_topic_share(const TopicModel& model, const std::vector<int>& doc_weeks,
                                     int week) {
    if (int(doc_weeks.size()) != model.theta.rows())
        throw Error("expected_topic_share: doc_weeks size mismatch");
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(model.K);
    int count = 0;
    for (size_t d = 0; d < doc_weeks.size(); ++d) {
        if (doc_weeks[d] != week) continue;
        sum += model.theta.row(long(d)).transpose();
        ++count;
    }
    if (count == 0) throw EmptyWeek("no documents in week " + std::to_string(week));
    return 100.0 * sum / double(count);
}

namespace {

void write_doubles(std::ofstream& out, const double* data, size_t count) {
    for (size_t i = 0; i < count; ++i) {
        uint64_t bits;
        std::memcpy(&bits, &data[i], 8);
        uint8_t bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = uint8_t(bits >> (8 * b)); // little-endian
        out.write(reinterpret_cast<const char*>(bytes), 8);
    }
}

void read_doubles(std::ifstream& in, double* data, size_t count) {
    for (size_t i = 0; i < count; ++i) {
        uint8_t bytes[8];
        in.read(reinterpret_cast<char*>(bytes), 8);
        uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= uint64_t(bytes[b]) << (8 * b);
        std::memcpy(&data[i], &bits, 8);
    }
}

} // namespace

void save_topic_model(const TopicModel& model, const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    const int V = int(model.phi.cols());
    const int D = int(model.theta.rows());
    out << "newspulse-topic-model 1\n";
    out << "K " << model.K << " V " << V << " D " << D << " df " << model.spline_df << " seed "
        << model.seed << " elbo " << model.elbo_trace.size() << "\n";
    for (const auto& term : vocab.terms) out << term << "\n";

    write_doubles(out, model.phi.data(), size_t(model.phi.size()));
    write_doubles(out, model.theta.data(), size_t(model.theta.size()));
    write_doubles(out, model.lambda.data(), size_t(model.lambda.size()));
    write_doubles(out, model.gamma.data(), size_t(model.gamma.size()));
    write_doubles(out, model.sigma.data(), size_t(model.sigma.size()));
    write_doubles(out, model.elbo_trace.data(), model.elbo_trace.size());
    if (!out) throw IoError("short write to " + path);
}

LoadedTopicModel load_topic_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string magic;
    std::getline(in, magic);
    if (magic != "newspulse-topic-model 1") throw IoError(path + ": not a topic model file");

    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string kw;
    int K = 0, V = 0, D = 0, df = 0;
    uint64_t seed = 0;
    size_t elbo_len = 0;
    hs >> kw >> K >> kw >> V >> kw >> D >> kw >> df >> kw >> seed >> kw >> elbo_len;
    if (K < 2 || V < 1 || D < 0) throw IoError(path + ": bad header");

    LoadedTopicModel loaded;
    loaded.model.K = K;
    loaded.model.seed = seed;
    loaded.model.spline_df = df;
    loaded.vocab.terms.resize(size_t(V));
    for (int w = 0; w < V; ++w) std::getline(in, loaded.vocab.terms[size_t(w)]);
    loaded.vocab.doc_freq.assign(size_t(V), 0);

    loaded.model.phi.resize(K, V);
    loaded.model.theta.resize(D, K);
    loaded.model.lambda.resize(D, K - 1);
    loaded.model.gamma.resize(df, K - 1);
    loaded.model.sigma.resize(K - 1, K - 1);
    loaded.model.elbo_trace.resize(elbo_len);
    read_doubles(in, loaded.model.phi.data(), size_t(loaded.model.phi.size()));
    read_doubles(in, loaded.model.theta.data(), size_t(loaded.model.theta.size()));
    read_doubles(in, loaded.model.lambda.data(), size_t(loaded.model.lambda.size()));
    read_doubles(in, loaded.model.gamma.data(), size_t(loaded.model.gamma.size()));
    read_doubles(in, loaded.model.sigma.data(), size_t(loaded.model.sigma.size()));
    read_doubles(in, loaded.model.elbo_trace.data(), elbo_len);
    if (!in) throw IoError(path + ": truncated model file");
    return loaded;
}

} // namespace newspulse
