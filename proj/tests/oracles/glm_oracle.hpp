#pragma once

#include <cmath>
#include <vector>

// Independent grouped-binomial machinery for checking the IRLS fitter:
// plain-loop likelihood, cyclic coordinate grid ascent, and a
// score-enumeration sandwich. Deliberately avoids the library path.
namespace oracle {

struct GroupedBinomial {
    // row-major covariates, k per row
    std::vector<double> x;
    int k = 0;
    std::vector<int> outlet; // 0..G-1
    int n_outlets = 0;
    std::vector<double> y;
    std::vector<double> trials;

    int rows() const { return int(y.size()); }
    int params() const { return k + n_outlets; }

    double eta(const std::vector<double>& coefs, int i) const {
        double e = 0;
        for (int c = 0; c < k; ++c) e += x[size_t(i) * k + c] * coefs[size_t(c)];
        e += coefs[size_t(k + outlet[size_t(i)])];
        return e;
    }

    // Log-likelihood without the binomial-coefficient constant.
    double loglik_core(const std::vector<double>& coefs) const {
        double ll = 0;
        for (int i = 0; i < rows(); ++i) {
            double e = eta(coefs, i);
            double lse = e > 30 ? e : std::log1p(std::exp(std::min(e, 30.0)));
            ll += y[size_t(i)] * e - trials[size_t(i)] * lse;
        }
        return ll;
    }
};

// Cyclic coordinate ascent on a fixed grid step: from each point, try
// +-step on every coordinate repeatedly until no single move improves.
// For a smooth strictly concave objective this lands within ~step of
// the maximizer per coordinate.
inline std::vector<double> grid_ascent(const GroupedBinomial& data, double step,
                                       int max_sweeps = 200000) {
    std::vector<double> coefs(size_t(data.params()), 0.0);
    double best = data.loglik_core(coefs);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool improved = false;
        for (int j = 0; j < data.params(); ++j) {
            for (double direction : {+1.0, -1.0}) {
                for (;;) {
                    coefs[size_t(j)] += direction * step;
                    double candidate = data.loglik_core(coefs);
                    if (candidate > best) {
                        best = candidate;
                        improved = true;
                    } else {
                        coefs[size_t(j)] -= direction * step;
                        break;
                    }
                }
            }
        }
        if (!improved) break;
    }
    return coefs;
}

// Sandwich covariance by explicit row enumeration: A = sum w_i x_i x_i',
// B = sum over clusters of score-sum outer products, factor G/(G-1).
// Dense Gauss-Jordan inverse, no library calls.
struct Sandwich {
    std::vector<std::vector<double>> vcov;
};

inline std::vector<std::vector<double>> invert(std::vector<std::vector<double>> a) {
    const int n = int(a.size());
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) inv[size_t(i)][size_t(i)] = 1.0;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[size_t(r)][size_t(col)]) > std::abs(a[size_t(pivot)][size_t(col)])) pivot = r;
        std::swap(a[size_t(col)], a[size_t(pivot)]);
        std::swap(inv[size_t(col)], inv[size_t(pivot)]);
        double d = a[size_t(col)][size_t(col)];
        for (int c = 0; c < n; ++c) {
            a[size_t(col)][size_t(c)] /= d;
            inv[size_t(col)][size_t(c)] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[size_t(r)][size_t(col)];
            if (f == 0) continue;
            for (int c = 0; c < n; ++c) {
                a[size_t(r)][size_t(c)] -= f * a[size_t(col)][size_t(c)];
                inv[size_t(r)][size_t(c)] -= f * inv[size_t(col)][size_t(c)];
            }
        }
    }
    return inv;
}

inline Sandwich clustered_sandwich(const GroupedBinomial& data, const std::vector<double>& coefs,
                                   const std::vector<int>& cluster_of_row) {
    const int p = data.params();
    auto full_x = [&](int i, int c) -> double {
        if (c < data.k) return data.x[size_t(i) * data.k + c];
        return data.outlet[size_t(i)] == (c - data.k) ? 1.0 : 0.0;
    };

    std::vector<std::vector<double>> a(size_t(p), std::vector<double>(size_t(p), 0.0));
    for (int i = 0; i < data.rows(); ++i) {
        double e = data.eta(coefs, i);
        double pi = 1.0 / (1.0 + std::exp(-e));
        double w = data.trials[size_t(i)] * pi * (1 - pi);
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < p; ++c) a[size_t(r)][size_t(c)] += w * full_x(i, r) * full_x(i, c);
    }

    int max_cluster = 0;
    for (int id : cluster_of_row) max_cluster = std::max(max_cluster, id);
    std::vector<std::vector<double>> scores(size_t(max_cluster) + 1, std::vector<double>(size_t(p), 0.0));
    for (int i = 0; i < data.rows(); ++i) {
        double e = data.eta(coefs, i);
        double pi = 1.0 / (1.0 + std::exp(-e));
        double resid = data.y[size_t(i)] - data.trials[size_t(i)] * pi;
        for (int c = 0; c < p; ++c) scores[size_t(cluster_of_row[size_t(i)])][size_t(c)] += resid * full_x(i, c);
    }

    std::vector<char> cluster_used(size_t(max_cluster) + 1, 0);
    for (int id : cluster_of_row) cluster_used[size_t(id)] = 1;
    int n_clusters = 0;
    for (char used : cluster_used) n_clusters += used;

    std::vector<std::vector<double>> b(size_t(p), std::vector<double>(size_t(p), 0.0));
    for (size_t g_idx = 0; g_idx < scores.size(); ++g_idx) {
        if (!cluster_used[g_idx]) continue;
        const auto& g = scores[g_idx];
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < p; ++c) b[size_t(r)][size_t(c)] += g[size_t(r)] * g[size_t(c)];
    }

    auto ainv = invert(a);
    auto mul = [&](const std::vector<std::vector<double>>& l, const std::vector<std::vector<double>>& r) {
        std::vector<std::vector<double>> out(size_t(p), std::vector<double>(size_t(p), 0.0));
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                double s = 0;
                for (int m = 0; m < p; ++m) s += l[size_t(i)][size_t(m)] * r[size_t(m)][size_t(j)];
                out[size_t(i)][size_t(j)] = s;
            }
        return out;
    };
    auto v = mul(mul(ainv, b), ainv);
    double factor = double(n_clusters) / double(n_clusters - 1);
    for (auto& row : v)
        for (auto& cell : row) cell *= factor;
    return {v};
}

} // namespace oracle
