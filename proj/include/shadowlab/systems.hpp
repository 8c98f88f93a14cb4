#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shadowlab/linear_dynamics.hpp"
#include "shadowlab/types.hpp"

namespace shadowlab {

using VectorField = std::function<Vector(double, const Vector&)>;
using JacobianField = std::function<Matrix(double, const Vector&)>;

/// x' = A(t) x + f(t, x).
struct SemilinearSplit {
    LinearSystem a;
    VectorField f;
    JacobianField fx;
};

/// Named systems whose Jacobian bounds are known in closed form.
enum class SystemTag { Generic, Exm, Logistic, Si, LinearPoly };

struct OdeSystem {
    std::string name;
    SystemTag tag = SystemTag::Generic;
    Eigen::Index n = 0;
    VectorField g;
    JacobianField gx;
    std::optional<SemilinearSplit> split;
    std::map<std::string, double> params;
};

[[nodiscard]] OdeSystem make_system(std::string name, Eigen::Index n, VectorField g, JacobianField gx);
[[nodiscard]] OdeSystem make_semilinear(std::string name, LinearSystem a, VectorField f, JacobianField fx);

/// c * prod_j x_j^{e_j}
struct Monomial {
    double coef = 0.0;
    std::vector<int> exponents;
};
using Polynomial = std::vector<Monomial>;

[[nodiscard]] double eval_polynomial(const Polynomial& p, const Vector& x);
[[nodiscard]] Vector polynomial_gradient(const Polynomial& p, const Vector& x);

/// x' = -(x + 1/2)^2, split as A = -1, f = -x^2 - 1/4.
[[nodiscard]] OdeSystem exm_system();
/// x' = x (a x + b), split as A = b, f = a x^2.
[[nodiscard]] OdeSystem logistic_system(double a, double b);
/// S' = 1 - I S - S, I' = I S - I.
[[nodiscard]] OdeSystem si_system();
/// x' = A x + f(x), f given by one polynomial per component.
[[nodiscard]] OdeSystem linear_poly_system(const Matrix& a, std::vector<Polynomial> f);

/// x' = A x + a sin(x), sine taken componentwise; |f_x| <= |a| in every norm.
[[nodiscard]] OdeSystem linear_sin_system(const Matrix& a, double amplitude);

struct RegistryParams {
    std::map<std::string, double> scalars;
    std::optional<Matrix> a;
    std::vector<Polynomial> poly;
};

/// Names: exm, logistic (a, b), si, linear_poly (A, poly), linear_sin (A, a).
/// Throws RegistryError.
[[nodiscard]] OdeSystem registry(std::string_view name, const RegistryParams& params = {});

struct Trajectory {
    std::vector<double> t;
    std::vector<Vector> x;
    /// Final time covered; +inf marks a pseudosolution meant on [0, inf).
    double horizon = 0.0;
    bool infinite_horizon = false;
    bool blew_up = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] std::size_t size() const { return t.size(); }
    [[nodiscard]] Eigen::Index dim() const { return x.empty() ? 0 : x.front().size(); }
};

struct IntegrateOptions {
    double tol = 1e-10;
    double blowup_threshold = 1e8;
};

/// Adaptive solution on [0, min(T, blow-up)), recording every accepted step.
[[nodiscard]] Trajectory integrate(const OdeSystem& sys, const Vector& x0, double T, double tol = 1e-10);

/// Same, reporting the state on a given increasing output grid starting at 0.
[[nodiscard]] Trajectory integrate_on(const OdeSystem& sys, const Vector& x0, std::span<const double> grid,
                                      const IntegrateOptions& options = {});

/// Closed-form solution of x' = -(x + 1/2)^2 with x(0) = c. Throws DomainError
/// when t lies outside the maximal interval of existence.
[[nodiscard]] double exm_exact(double c, double t);

/// Header `t,x1..xn`, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

[[nodiscard]] std::vector<double> uniform_grid(double t0, double t1, std::size_t points);

}  // namespace shadowlab
