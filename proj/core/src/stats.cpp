#include "newspulse/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "newspulse/errors.hpp"

namespace newspulse {

CorrelationCell pearson(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& variable, const std::string& target) {
    if (x.size() != y.size()) throw Error("pearson: length mismatch");
    const size_t n = x.size();
    if (n < 3) throw Error("pearson: need at least 3 observations");

    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);

    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0) throw ZeroVariance(variable.empty() ? "x is constant" : variable + " is constant");
    if (syy <= 0) throw ZeroVariance(target.empty() ? "y is constant" : target + " is constant");

    CorrelationCell cell;
    cell.variable = variable;
    cell.target = target;
    cell.n = int(n);
    cell.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);

    double df = double(n) - 2.0;
    double r2 = cell.r * cell.r;
    if (1.0 - r2 < 1e-15) {
        cell.p = 0.0;
    } else {
        double t = cell.r * std::sqrt(df / (1.0 - r2));
        boost::math::students_t_distribution<double> dist(df);
        cell.p = 2.0 * boost::math::cdf(dist, -std::abs(t));
    }
    return cell;
}

std::vector<double> loess_smooth(const std::vector<double>& x, const std::vector<double>& y,
                                 double span) {
    if (x.size() != y.size()) throw Error("loess_smooth: length mismatch");
    const size_t n = x.size();
    if (n == 0) return {};
    span = std::clamp(span, 0.05, 1.0);
    size_t q = std::max<size_t>(2, size_t(std::ceil(span * double(n))));
    q = std::min(q, n);

    std::vector<double> out(n);
    std::vector<std::pair<double, size_t>> dist(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) dist[j] = {std::abs(x[j] - x[i]), j};
        std::nth_element(dist.begin(), dist.begin() + long(q - 1), dist.end());
        double h = dist[q - 1].first;
        if (h <= 0) h = 1.0; // all points coincide: plain average

        // Tricube-weighted linear fit around x[i].
        double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
        for (size_t j = 0; j < n; ++j) {
            double d = std::abs(x[j] - x[i]) / h;
            if (d >= 1.0) continue;
            double w = 1.0 - d * d * d;
            w = w * w * w;
            double dx = x[j] - x[i];
            sw += w;
            swx += w * dx;
            swy += w * y[j];
            swxx += w * dx * dx;
            swxy += w * dx * y[j];
        }
        double denom = sw * swxx - swx * swx;
        if (std::abs(denom) < 1e-12 * std::max(1.0, sw * swxx)) {
            out[i] = sw > 0 ? swy / sw : y[i];
        } else {
            // Intercept at dx = 0 is the fitted value at x[i].
            out[i] = (swxx * swy - swx * swxy) / denom;
        }
    }
    return out;
}

} // namespace newspulse
