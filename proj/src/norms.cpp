#include "shadowlab/errors.hpp"
#include "shadowlab/types.hpp"

#include <algorithm>
#include <cmath>

namespace shadowlab {

double vector_norm(const Vector& x, NormKind k) {
    switch (k) {
        case NormKind::Inf: return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
        case NormKind::One: return x.cwiseAbs().sum();
        case NormKind::Two: return x.norm();
    }
    return 0.0;
}

namespace {

template <typename M>
double induced_norm(const M& a, NormKind k) {
    if (a.size() == 0) return 0.0;
    switch (k) {
        case NormKind::Inf: return a.cwiseAbs().rowwise().sum().maxCoeff();
        case NormKind::One: return a.cwiseAbs().colwise().sum().maxCoeff();
        case NormKind::Two: {
            Eigen::JacobiSVD<M> svd(a);
            return svd.singularValues()(0);
        }
    }
    return 0.0;
}

}  // namespace

double matrix_norm(const Matrix& a, NormKind k) { return induced_norm(a, k); }

double complex_matrix_norm(const Eigen::MatrixXcd& a, NormKind k) { return induced_norm(a, k); }

std::string to_string(NormKind k) {
    switch (k) {
        case NormKind::Inf: return "inf";
        case NormKind::One: return "one";
        case NormKind::Two: return "two";
    }
    return "?";
}

NormKind parse_norm(std::string_view name) {
    if (name == "inf" || name == "Inf" || name == "infinity") return NormKind::Inf;
    if (name == "one" || name == "One" || name == "1") return NormKind::One;
    if (name == "two" || name == "Two" || name == "2") return NormKind::Two;
    throw ArgumentError("unknown norm '" + std::string(name) + "' (expected inf, one or two)");
}

bool all_finite(const Vector& x) { return x.allFinite(); }

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace shadowlab
