#pragma once

#include <string>
#include <vector>

namespace newspulse {

struct CorrelationCell {
    std::string variable;
    std::string target;
    double r = 0;
    double p = 1;
    int n = 0;
};

// Product-moment correlation with a two-sided p-value from the t
// transform on n-2 degrees of freedom. Requires n >= 3; throws
// ZeroVariance when either argument is constant.
CorrelationCell pearson(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& variable = {}, const std::string& target = {});

// Locally weighted linear regression (tricube kernel, nearest-neighbor
// span) evaluated at each x. Span is the fraction of points in each
// local window.
std::vector<double> loess_smooth(const std::vector<double>& x, const std::vector<double>& y,
                                 double span = 0.75);

} // namespace newspulse
