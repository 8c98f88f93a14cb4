#include "shadowlab/systems.hpp"

#include <cmath>
#include <iomanip>

#include "shadowlab/errors.hpp"
#include "shadowlab/ode_solver.hpp"

namespace shadowlab {

OdeSystem make_system(std::string name, Eigen::Index n, VectorField g, JacobianField gx) {
    if (n <= 0) throw DimensionError("system dimension must be positive");
    OdeSystem sys;
    sys.name = std::move(name);
    sys.n = n;
    sys.g = std::move(g);
    sys.gx = std::move(gx);
    return sys;
}

OdeSystem make_semilinear(std::string name, LinearSystem a, VectorField f, JacobianField fx) {
    OdeSystem sys;
    sys.name = std::move(name);
    sys.n = a.dim();
    sys.g = [a, f](double t, const Vector& x) -> Vector { return a(t) * x + f(t, x); };
    sys.gx = [a, fx](double t, const Vector& x) -> Matrix { return a(t) + fx(t, x); };
    sys.split = SemilinearSplit{std::move(a), std::move(f), std::move(fx)};
    return sys;
}

double eval_polynomial(const Polynomial& p, const Vector& x) {
    double sum = 0.0;
    for (const auto& m : p) {
        double term = m.coef;
        for (std::size_t j = 0; j < m.exponents.size(); ++j) {
            if (m.exponents[j] != 0) term *= std::pow(x(static_cast<Eigen::Index>(j)), m.exponents[j]);
        }
        sum += term;
    }
    return sum;
}

Vector polynomial_gradient(const Polynomial& p, const Vector& x) {
    Vector grad = Vector::Zero(x.size());
    for (const auto& m : p) {
        for (std::size_t k = 0; k < m.exponents.size(); ++k) {
            if (m.exponents[k] == 0) continue;
            double term = m.coef * m.exponents[k];
            for (std::size_t j = 0; j < m.exponents.size(); ++j) {
                const int e = j == k ? m.exponents[j] - 1 : m.exponents[j];
                if (e != 0) term *= std::pow(x(static_cast<Eigen::Index>(j)), e);
            }
            grad(static_cast<Eigen::Index>(k)) += term;
        }
    }
    return grad;
}

OdeSystem exm_system() {
    auto sys = make_semilinear(
        "exm", LinearSystem::constant(Matrix::Constant(1, 1, -1.0)),
        [](double, const Vector& x) -> Vector { return Vector::Constant(1, -x(0) * x(0) - 0.25); },
        [](double, const Vector& x) -> Matrix { return Matrix::Constant(1, 1, -2.0 * x(0)); });
    // Same field written in the factored form, which is exact at x = -1/2.
    sys.g = [](double, const Vector& x) -> Vector {
        const double u = x(0) + 0.5;
        return Vector::Constant(1, -u * u);
    };
    sys.gx = [](double, const Vector& x) -> Matrix { return Matrix::Constant(1, 1, -2.0 * (x(0) + 0.5)); };
    sys.tag = SystemTag::Exm;
    return sys;
}

OdeSystem logistic_system(double a, double b) {
    if (a == 0.0 || b == 0.0) throw ArgumentError("logistic coefficients a and b must be nonzero");
    auto sys = make_semilinear(
        "logistic", LinearSystem::constant(Matrix::Constant(1, 1, b)),
        [a](double, const Vector& x) -> Vector { return Vector::Constant(1, a * x(0) * x(0)); },
        [a](double, const Vector& x) -> Matrix { return Matrix::Constant(1, 1, 2.0 * a * x(0)); });
    sys.tag = SystemTag::Logistic;
    sys.params = {{"a", a}, {"b", b}};
    return sys;
}

OdeSystem si_system() {
    auto sys = make_system(
        "si", 2,
        [](double, const Vector& x) -> Vector {
            const double s = x(0), i = x(1);
            Vector out(2);
            out << 1.0 - i * s - s, i * s - i;
            return out;
        },
        [](double, const Vector& x) -> Matrix {
            const double s = x(0), i = x(1);
            Matrix j(2, 2);
            j << -i - 1.0, -s, i, s - 1.0;
            return j;
        });
    sys.tag = SystemTag::Si;
    return sys;
}

OdeSystem linear_poly_system(const Matrix& a, std::vector<Polynomial> f) {
    if (a.rows() != a.cols()) throw DimensionError("linear part must be square");
    const auto n = a.rows();
    if (f.empty()) f.resize(static_cast<std::size_t>(n));
    if (static_cast<Eigen::Index>(f.size()) != n) throw DimensionError("need one polynomial per component");
    for (const auto& p : f) {
        for (const auto& m : p) {
            if (static_cast<Eigen::Index>(m.exponents.size()) != n) {
                throw DimensionError("monomial exponent vector must have one entry per state variable");
            }
            for (int e : m.exponents) {
                if (e < 0) throw ArgumentError("monomial exponents must be nonnegative");
            }
        }
    }
    auto sys = make_semilinear(
        "linear_poly", LinearSystem::constant(a),
        [f](double, const Vector& x) -> Vector {
            Vector out(static_cast<Eigen::Index>(f.size()));
            for (std::size_t i = 0; i < f.size(); ++i) out(static_cast<Eigen::Index>(i)) = eval_polynomial(f[i], x);
            return out;
        },
        [f, n](double, const Vector& x) -> Matrix {
            Matrix j(n, n);
            for (std::size_t i = 0; i < f.size(); ++i) {
                j.row(static_cast<Eigen::Index>(i)) = polynomial_gradient(f[i], x).transpose();
            }
            return j;
        });
    sys.tag = SystemTag::LinearPoly;
    return sys;
}

OdeSystem linear_sin_system(const Matrix& a, double amplitude) {
    if (a.rows() != a.cols()) throw DimensionError("linear part must be square");
    auto sys = make_semilinear(
        "linear_sin", LinearSystem::constant(a),
        [amplitude](double, const Vector& x) -> Vector { return amplitude * x.array().sin().matrix(); },
        [amplitude](double, const Vector& x) -> Matrix { return (amplitude * x.array().cos()).matrix().asDiagonal(); });
    sys.params = {{"a", amplitude}};
    return sys;
}

OdeSystem registry(std::string_view name, const RegistryParams& params) {
    auto scalar = [&params, name](const std::string& key) {
        const auto it = params.scalars.find(key);
        if (it == params.scalars.end()) {
            throw RegistryError("system '" + std::string(name) + "' needs parameter '" + key + "'");
        }
        return it->second;
    };
    if (name == "exm") return exm_system();
    if (name == "si") return si_system();
    if (name == "logistic") return logistic_system(scalar("a"), scalar("b"));
    if (name == "linear_poly") {
        if (!params.a) throw RegistryError("system 'linear_poly' needs a linear part A");
        return linear_poly_system(*params.a, params.poly);
    }
    if (name == "linear_sin") {
        if (!params.a) throw RegistryError("system 'linear_sin' needs a linear part A");
        return linear_sin_system(*params.a, scalar("a"));
    }
    throw RegistryError("unknown system '" + std::string(name) +
                        "' (known: exm, logistic, si, linear_poly, linear_sin)");
}

namespace {

Trajectory to_trajectory(SolverResult&& res, double T) {
    Trajectory traj;
    traj.t = std::move(res.t);
    traj.x = std::move(res.x);
    traj.blew_up = res.blew_up || res.underflow;
    if (traj.blew_up) {
        traj.blowup_time = res.stop_time;
        traj.horizon = res.stop_time;
    } else {
        traj.horizon = T;
    }
    return traj;
}

RhsFunction checked_rhs(const OdeSystem& sys) {
    return [&sys](double t, const Vector& x) -> Vector {
        Vector v = sys.g(t, x);
        if (v.size() != sys.n) throw DimensionError("g returned a vector of the wrong size");
        return v;
    };
}

}  // namespace

Trajectory integrate(const OdeSystem& sys, const Vector& x0, double T, double tol) {
    if (!(T > 0.0)) throw ArgumentError("integration horizon must be positive");
    if (!(tol > 0.0)) throw ArgumentError("integration tolerance must be positive");
    if (x0.size() != sys.n) throw DimensionError("initial state has the wrong dimension");
    SolverOptions opts;
    opts.abs_tol = tol;
    opts.rel_tol = tol;
    opts.record_steps = true;
    const double times[] = {0.0, T};
    return to_trajectory(solve_ivp(checked_rhs(sys), x0, times, opts), T);
}

Trajectory integrate_on(const OdeSystem& sys, const Vector& x0, std::span<const double> grid,
                        const IntegrateOptions& options) {
    if (grid.size() < 2) throw ArgumentError("output grid needs at least two points");
    if (grid.front() != 0.0) throw ArgumentError("output grid must start at t = 0");
    if (!(options.tol > 0.0)) throw ArgumentError("integration tolerance must be positive");
    if (x0.size() != sys.n) throw DimensionError("initial state has the wrong dimension");
    SolverOptions opts;
    opts.abs_tol = options.tol;
    opts.rel_tol = options.tol;
    opts.blowup_threshold = options.blowup_threshold;
    return to_trajectory(solve_ivp(checked_rhs(sys), x0, grid, opts), grid.back());
}

double exm_exact(double c, double t) {
    const double gamma = c + 0.5;
    if (gamma == 0.0) return -0.5;
    const double denom = gamma * t + 1.0;
    // I_c = (-1/gamma, inf) for gamma > 0, (-inf, -1/gamma) for gamma < 0.
    if (!(denom > 0.0)) {
        throw DomainError("t = " + std::to_string(t) + " is outside the existence interval of the solution from c = " +
                          std::to_string(c));
    }
    return -0.5 + gamma / denom;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const auto n = traj.dim();
    os << "t";
    for (Eigen::Index j = 0; j < n; ++j) os << ",x" << (j + 1);
    os << "\n" << std::setprecision(17);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << traj.t[i];
        for (Eigen::Index j = 0; j < n; ++j) os << "," << traj.x[i](j);
        os << "\n";
    }
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t points) {
    if (points < 2) throw ArgumentError("grid needs at least two points");
    std::vector<double> g(points);
    const double h = (t1 - t0) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = t0 + h * static_cast<double>(i);
    g.back() = t1;
    return g;
}

}  // namespace shadowlab
