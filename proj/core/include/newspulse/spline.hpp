#pragma once

#include <Eigen/Dense>
#include <vector>

namespace newspulse {

// Clamped cubic B-spline knot vector with interior knots at quantiles
// of `values`: 4 copies of the minimum, df-4 interior quantile knots,
// 4 copies of the maximum (df + 4 knots total, df basis functions).
std::vector<double> spline_knots(const std::vector<double>& values, int df);

// Basis values at x for the given clamped cubic knot vector; the row
// sums to 1. x at or beyond the right boundary evaluates in the last
// non-empty span so the boundary point gets basis value 1.
Eigen::RowVectorXd spline_basis_row(const std::vector<double>& knots, double x);

// Rows = values, cols = df. Throws InsufficientSpan when df < 4 or the
// values cover fewer than df distinct points.
Eigen::MatrixXd spline_basis(const std::vector<double>& values, int df);

} // namespace newspulse
