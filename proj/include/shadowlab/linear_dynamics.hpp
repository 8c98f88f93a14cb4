#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "shadowlab/types.hpp"

namespace shadowlab {

/// Coefficient matrix A(t) of x' = A(t) x. Immutable after construction.
class LinearSystem {
public:
    static LinearSystem constant(Matrix a);
    /// Piecewise-linear interpolation between grid samples, held constant outside.
    static LinearSystem piecewise(std::vector<double> grid, std::vector<Matrix> samples);
    static LinearSystem analytic(Eigen::Index n, std::function<Matrix(double)> a);

    [[nodiscard]] Matrix operator()(double t) const;
    [[nodiscard]] Eigen::Index dim() const { return n_; }
    [[nodiscard]] bool is_constant() const { return constant_; }
    [[nodiscard]] const Matrix& constant_value() const { return value_; }

private:
    LinearSystem() = default;

    Eigen::Index n_ = 0;
    bool constant_ = false;
    Matrix value_;
    std::function<Matrix(double)> fn_;
};

enum class DichotomyKind { Dichotomy, Contraction, Expansion };

[[nodiscard]] std::string to_string(DichotomyKind kind);
[[nodiscard]] DichotomyKind parse_dichotomy_kind(const std::string& name);

/// Projection family and constants of an exponential dichotomy on [0, inf).
/// Supplied by the caller and checked by verify_dichotomy, never estimated
/// for general A(t).
struct DichotomyData {
    std::function<Matrix(double)> projection;
    double N = 1.0;
    double lambda = 1.0;
    DichotomyKind kind = DichotomyKind::Dichotomy;
    Eigen::Index n = 0;

    static DichotomyData contraction(Eigen::Index n, double N, double lambda);
    static DichotomyData expansion(Eigen::Index n, double N, double lambda);
    static DichotomyData constant_projection(Matrix p, double N, double lambda);
    static DichotomyData varying(Eigen::Index n, std::function<Matrix(double)> p, double N, double lambda);

    [[nodiscard]] Matrix P(double t) const { return projection(t); }
};

/// T(t, s). Constant systems use the matrix exponential; otherwise the matrix
/// ODE X' = A(u) X is integrated from u = s to u = t (either direction).
/// Throws StiffnessError on step underflow.
[[nodiscard]] Matrix transition(const LinearSystem& sys, double t, double s, double tol = 1e-12);

/// One-step maps along a grid: forward[i] = T(t_{i+1}, t_i), backward[i] = T(t_i, t_{i+1}).
struct StepTransitions {
    std::vector<Matrix> forward;
    std::vector<Matrix> backward;
};

[[nodiscard]] StepTransitions step_transitions(const LinearSystem& sys, std::span<const double> grid,
                                               double tol = 1e-12);

struct ConditionCheck {
    std::string name;
    bool passed = true;
    double worst_t = 0.0;
    double worst_s = 0.0;
    double worst_margin = 0.0;  // allowed - observed; negative beyond tolerance means violation
    long pairs = 0;
};

struct DichotomyReport {
    ConditionCheck commutation;  // P(t) T(t,s) = T(t,s) P(s)
    ConditionCheck forward;      // |T(t,s) P(s)| <= N e^{-lambda (t-s)}, t >= s
    ConditionCheck backward;     // |T(t,s) (I - P(s))| <= N e^{-lambda (s-t)}, t <= s
    bool projections_idempotent = true;
    bool kind_consistent = true;
    double tol = 0.0;
    NormKind norm = NormKind::Inf;
    std::size_t grid_points = 0;

    [[nodiscard]] bool passed() const {
        return commutation.passed && forward.passed && backward.passed && projections_idempotent && kind_consistent;
    }
    /// Plain "key = value" summary, one condition per block.
    [[nodiscard]] std::string to_text() const;
};

/// Checks the three dichotomy conditions on every pair of grid points. This is
/// sampled evidence only; nothing is asserted between grid points.
[[nodiscard]] DichotomyReport verify_dichotomy(const LinearSystem& sys, const DichotomyData& d,
                                               std::span<const double> grid, double tol,
                                               NormKind k = NormKind::Inf);

/// exp(int_s^t mu_k(A(u)) du), the growth bound on |T(t,s)|_k.
[[nodiscard]] double coppel_bound(const LinearSystem& sys, double s, double t, NormKind k);

/// Dichotomy data for a constant diagonalizable hyperbolic matrix: P from the
/// stable spectral subspace, lambda = min |Re eig|, N = cond_k(V).
[[nodiscard]] DichotomyData spectral_dichotomy(const Matrix& a, NormKind k);

}  // namespace shadowlab
