#include "newspulse/spline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "newspulse/errors.hpp"

namespace newspulse {

namespace {

constexpr int kOrder = 4; // cubic

double quantile(const std::vector<double>& sorted, double p) {
    const size_t n = sorted.size();
    double h = (double(n) - 1.0) * p;
    size_t lo = size_t(std::floor(h));
    size_t hi = std::min(lo + 1, n - 1);
    double frac = h - double(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

std::vector<double> spline_knots(const std::vector<double>& values, int df) {
    if (df < 4) throw InsufficientSpan("spline df must be >= 4, got " + std::to_string(df));
    std::set<double> distinct(values.begin(), values.end());
    if (int(distinct.size()) < df)
        throw InsufficientSpan("need >= " + std::to_string(df) + " distinct values, got " +
                               std::to_string(distinct.size()));

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    double lo = sorted.front(), hi = sorted.back();

    std::vector<double> knots;
    knots.reserve(size_t(df) + kOrder);
    for (int i = 0; i < kOrder; ++i) knots.push_back(lo);
    int interior = df - kOrder;
    for (int i = 1; i <= interior; ++i)
        knots.push_back(quantile(sorted, double(i) / double(interior + 1)));
    for (int i = 0; i < kOrder; ++i) knots.push_back(hi);
    return knots;
}

Eigen::RowVectorXd spline_basis_row(const std::vector<double>& knots, double x) {
    const int df = int(knots.size()) - kOrder;
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(df);

    double lo = knots.front(), hi = knots.back();
    x = std::clamp(x, lo, hi);

    // Knot span containing x: largest j with knots[j] <= x < knots[j+1],
    // with x == hi assigned to the last non-empty span.
    int span = df - 1;
    if (x < hi) {
        span = kOrder - 1;
        while (span < df - 1 && x >= knots[span + 1]) ++span;
    } else {
        while (span > kOrder - 1 && knots[span] == knots[span + 1]) --span;
    }

    // de Boor triangle: basis[j] holds N_{span-deg+j, deg+1}(x).
    double basis[kOrder];
    double left[kOrder], right[kOrder];
    basis[0] = 1.0;
    for (int deg = 1; deg < kOrder; ++deg) {
        left[deg] = x - knots[span + 1 - deg];
        right[deg] = knots[span + deg] - x;
        double saved = 0.0;
        for (int r = 0; r < deg; ++r) {
            double denom = right[r + 1] + left[deg - r];
            double temp = denom != 0.0 ? basis[r] / denom : 0.0;
            basis[r] = saved + right[r + 1] * temp;
            saved = left[deg - r] * temp;
        }
        basis[deg] = saved;
    }

    for (int j = 0; j < kOrder; ++j) {
        int col = span - (kOrder - 1) + j;
        if (col >= 0 && col < df) row[col] = basis[j];
    }
    return row;
}

Eigen::MatrixXd spline_basis(const std::vector<double>& values, int df) {
    std::vector<double> knots = spline_knots(values, df);
    Eigen::MatrixXd basis(values.size(), df);
    for (size_t i = 0; i < values.size(); ++i) basis.row(long(i)) = spline_basis_row(knots, values[i]);
    return basis;
}

} // namespace newspulse
