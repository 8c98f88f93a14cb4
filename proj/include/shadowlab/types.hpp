#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace shadowlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// The three vector norms with closed-form induced norms and logarithmic norms.
enum class NormKind { Inf, One, Two };

inline constexpr NormKind kAllNorms[] = {NormKind::Inf, NormKind::One, NormKind::Two};

[[nodiscard]] double vector_norm(const Vector& x, NormKind k);

/// Induced (operator) norm.
[[nodiscard]] double matrix_norm(const Matrix& a, NormKind k);

/// Induced norm of a complex matrix, used for eigenvector conditioning.
[[nodiscard]] double complex_matrix_norm(const Eigen::MatrixXcd& a, NormKind k);

[[nodiscard]] std::string to_string(NormKind k);
[[nodiscard]] NormKind parse_norm(std::string_view name);

[[nodiscard]] bool all_finite(const Vector& x);
[[nodiscard]] bool all_finite(const Matrix& a);

}  // namespace shadowlab
