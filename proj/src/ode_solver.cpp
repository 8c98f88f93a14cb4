#include "shadowlab/ode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shadowlab/errors.hpp"

namespace shadowlab {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double scaled_error(const Vector& err, const Vector& x, const Vector& xnew, const SolverOptions& o) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = o.abs_tol + o.rel_tol * std::max(std::abs(x(i)), std::abs(xnew(i)));
        const double r = std::abs(err(i)) / scale;
        if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, r);
    }
    return worst;
}

double initial_step(const RhsFunction& rhs, double t0, const Vector& x0, const Vector& f0, double span,
                    const SolverOptions& o) {
    const Vector scale = (o.abs_tol + o.rel_tol * x0.cwiseAbs().array()).matrix();
    const double d0 = x0.cwiseQuotient(scale).cwiseAbs().maxCoeff();
    const double d1 = f0.cwiseQuotient(scale).cwiseAbs().maxCoeff();
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const double dir = 1.0;
    const Vector x1 = x0 + dir * h0 * f0;
    Vector f1 = rhs(t0 + h0, x1);
    if (!f1.allFinite()) return h0 * 1e-3;
    const double d2 = (f1 - f0).cwiseQuotient(scale).cwiseAbs().maxCoeff() / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, span});
}

}  // namespace

SolverResult solve_ivp(const RhsFunction& rhs, const Vector& x0, std::span<const double> times,
                       const SolverOptions& o) {
    if (times.empty()) throw ArgumentError("solve_ivp needs at least the initial time");
    if (!x0.allFinite()) throw ArgumentError("initial state is not finite");

    SolverResult out;
    double t = times[0];
    Vector x = x0;
    out.t.push_back(t);
    out.x.push_back(x);
    out.stop_time = t;
    if (times.size() == 1) return out;

    const double dir = times.back() >= times.front() ? 1.0 : -1.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (dir * (times[i] - times[i - 1]) <= 0.0) throw ArgumentError("output times must be strictly monotone");
    }

    // Non-finite output at a moderate, finite state is a defect of the model;
    // overflow at huge trial states just rejects the step.
    auto eval = [&rhs, &o](double tt, const Vector& xx) -> Vector {
        if (!xx.allFinite()) return xx;
        Vector v = rhs(tt, xx);
        if (!v.allFinite() && xx.cwiseAbs().maxCoeff() <= o.blowup_threshold) {
            throw EvaluationError("right-hand side is not finite at t=" + std::to_string(tt));
        }
        return v;
    };

    Vector k1 = eval(t, x);
    if (!k1.allFinite()) throw EvaluationError("right-hand side is not finite at t=" + std::to_string(t));

    double h = initial_step(rhs, t, x, k1, std::abs(times.back() - t), o);
    std::size_t next = 1;

    while (next < times.size()) {
        const double target = times[next];
        const double remaining = std::abs(target - t);
        const bool clipped = h >= remaining;
        const double step = clipped ? remaining : h;
        const double min_step = o.min_step_factor * std::max(1.0, std::abs(t));
        if (step < min_step && !clipped) {
            out.underflow = true;
            out.stop_time = t;
            return out;
        }
        const double dt = dir * step;

        const Vector k2 = eval(t + c2 * dt, x + dt * (a21 * k1));
        const Vector k3 = eval(t + c3 * dt, x + dt * (a31 * k1 + a32 * k2));
        const Vector k4 = eval(t + c4 * dt, x + dt * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vector k5 = eval(t + c5 * dt, x + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vector k6 = eval(t + dt, x + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vector xnew = x + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vector k7 = eval(t + dt, xnew);
        const Vector err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double en = xnew.allFinite() && k7.allFinite() ? scaled_error(err, x, xnew, o)
                                                              : std::numeric_limits<double>::infinity();
        if (en <= 1.0) {
            t = clipped ? target : t + dt;
            x = xnew;
            k1 = std::move(k7);
            ++out.accepted_steps;
            out.stop_time = t;
            const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            h = clipped ? std::max(h, step * fac) : step * fac;
            if (x.cwiseAbs().maxCoeff() > o.blowup_threshold) {
                out.blew_up = true;
                if (o.record_steps) {
                    out.t.push_back(t);
                    out.x.push_back(x);
                }
                return out;
            }
            if (clipped) {
                out.t.push_back(t);
                out.x.push_back(x);
                ++next;
            } else if (o.record_steps) {
                out.t.push_back(t);
                out.x.push_back(x);
            }
        } else {
            ++out.rejected_steps;
            const double fac = std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0) : 0.2;
            h = step * fac;
            if (h < min_step) {
                out.underflow = true;
                out.stop_time = t;
                return out;
            }
        }
    }
    return out;
}

}  // namespace shadowlab
