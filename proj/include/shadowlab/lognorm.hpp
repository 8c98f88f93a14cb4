#pragma once

#include <functional>
#include <vector>

#include "shadowlab/types.hpp"

namespace shadowlab {

/// Logarithmic norm (Lozinskii measure) from the closed forms:
///   inf: max_i (a_ii + sum_{k != i} |a_ik|)
///   one: max_k (a_kk + sum_{i != k} |a_ik|)
///   two: largest eigenvalue of (A + A^T) / 2
/// Throws DimensionError for non-square input.
[[nodiscard]] double mu_closed(const Matrix& a, NormKind k);

/// One-sided difference quotient (|I + hA| - 1) / h. Independent of mu_closed.
[[nodiscard]] double mu_limit(const Matrix& a, NormKind k, double h = 1e-6);

/// Piecewise-linear matrix-valued path on [0, 1].
class MatrixPath {
public:
    MatrixPath(std::vector<double> s, std::vector<Matrix> m);

    [[nodiscard]] Matrix at(double s) const;
    [[nodiscard]] Eigen::Index dim() const { return m_.front().rows(); }
    [[nodiscard]] const std::vector<double>& knots() const { return s_; }

private:
    std::vector<double> s_;
    std::vector<Matrix> m_;
};

struct IntegralCheck {
    double lhs = 0.0;  // mu of the integrated matrix
    double rhs = 0.0;  // integral of mu along the path
};

/// Composite trapezoid on `quadrature_points` uniform nodes for both sides of
/// mu(int M) <= int mu(M).
[[nodiscard]] IntegralCheck mu_integral_check(const MatrixPath& path, NormKind k, int quadrature_points);
[[nodiscard]] IntegralCheck mu_integral_check(const std::function<Matrix(double)>& path, NormKind k,
                                              int quadrature_points);

}  // namespace shadowlab
