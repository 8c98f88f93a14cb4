#include "shadowlab/lognorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shadowlab/errors.hpp"

namespace shadowlab {

namespace {

void require_square(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw DimensionError("logarithmic norm needs a non-empty square matrix, got " + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()));
    }
}

}  // namespace

double mu_closed(const Matrix& a, NormKind k) {
    require_square(a);
    const auto n = a.rows();
    switch (k) {
        case NormKind::Inf: {
            double best = -std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < n; ++i) {
                double row = a(i, i);
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (j != i) row += std::abs(a(i, j));
                }
                best = std::max(best, row);
            }
            return best;
        }
        case NormKind::One: {
            double best = -std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < n; ++j) {
                double col = a(j, j);
                for (Eigen::Index i = 0; i < n; ++i) {
                    if (i != j) col += std::abs(a(i, j));
                }
                best = std::max(best, col);
            }
            return best;
        }
        case NormKind::Two: {
            const Matrix sym = 0.5 * (a + a.transpose());
            Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
            return eig.eigenvalues()(n - 1);
        }
    }
    return 0.0;
}

double mu_limit(const Matrix& a, NormKind k, double h) {
    require_square(a);
    if (!(h > 0.0)) throw ArgumentError("mu_limit step must be positive");
    const Matrix shifted = Matrix::Identity(a.rows(), a.cols()) + h * a;
    return (matrix_norm(shifted, k) - 1.0) / h;
}

MatrixPath::MatrixPath(std::vector<double> s, std::vector<Matrix> m) : s_(std::move(s)), m_(std::move(m)) {
    if (s_.size() < 2 || s_.size() != m_.size()) {
        throw ArgumentError("matrix path needs at least two (s, M) samples");
    }
    if (s_.front() != 0.0 || s_.back() != 1.0) throw ArgumentError("matrix path must start at s=0 and end at s=1");
    for (std::size_t i = 1; i < s_.size(); ++i) {
        if (!(s_[i] > s_[i - 1])) throw ArgumentError("matrix path knots must be strictly increasing");
    }
    for (const auto& mi : m_) {
        if (mi.rows() != m_.front().rows() || mi.cols() != m_.front().cols() || mi.rows() != mi.cols()) {
            throw DimensionError("matrix path samples must be square and of equal dimension");
        }
    }
}

Matrix MatrixPath::at(double s) const {
    if (s <= s_.front()) return m_.front();
    if (s >= s_.back()) return m_.back();
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const auto j = static_cast<std::size_t>(it - s_.begin());
    const double w = (s - s_[j - 1]) / (s_[j] - s_[j - 1]);
    return (1.0 - w) * m_[j - 1] + w * m_[j];
}

IntegralCheck mu_integral_check(const std::function<Matrix(double)>& path, NormKind k, int quadrature_points) {
    if (quadrature_points < 2) throw ArgumentError("quadrature needs at least two points");
    const double h = 1.0 / (quadrature_points - 1);
    Matrix integral;
    double rhs = 0.0;
    for (int j = 0; j < quadrature_points; ++j) {
        const double w = (j == 0 || j == quadrature_points - 1) ? 0.5 * h : h;
        const Matrix mj = path(j * h);
        if (j == 0) {
            integral = Matrix::Zero(mj.rows(), mj.cols());
        } else if (mj.rows() != integral.rows() || mj.cols() != integral.cols()) {
            throw DimensionError("matrix path changes dimension");
        }
        integral += w * mj;
        rhs += w * mu_closed(mj, k);
    }
    return {mu_closed(integral, k), rhs};
}

IntegralCheck mu_integral_check(const MatrixPath& path, NormKind k, int quadrature_points) {
    return mu_integral_check([&path](double s) { return path.at(s); }, k, quadrature_points);
}

}  // namespace shadowlab
