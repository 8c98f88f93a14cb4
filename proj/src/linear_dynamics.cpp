#include "shadowlab/linear_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "shadowlab/errors.hpp"
#include "shadowlab/lognorm.hpp"
#include "shadowlab/ode_solver.hpp"

namespace shadowlab {

LinearSystem LinearSystem::constant(Matrix a) {
    if (a.rows() != a.cols() || a.rows() == 0) throw DimensionError("linear system matrix must be square");
    if (!a.allFinite()) throw ArgumentError("linear system matrix has non-finite entries");
    LinearSystem s;
    s.n_ = a.rows();
    s.constant_ = true;
    s.value_ = std::move(a);
    return s;
}

LinearSystem LinearSystem::piecewise(std::vector<double> grid, std::vector<Matrix> samples) {
    if (grid.empty() || grid.size() != samples.size()) throw ArgumentError("piecewise system needs one matrix per grid point");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ArgumentError("piecewise system grid must be increasing");
    }
    const auto n = samples.front().rows();
    for (const auto& m : samples) {
        if (m.rows() != n || m.cols() != n) throw DimensionError("piecewise system samples differ in dimension");
    }
    LinearSystem s;
    s.n_ = n;
    s.fn_ = [grid = std::move(grid), samples = std::move(samples)](double t) -> Matrix {
        if (t <= grid.front()) return samples.front();
        if (t >= grid.back()) return samples.back();
        const auto it = std::upper_bound(grid.begin(), grid.end(), t);
        const auto j = static_cast<std::size_t>(it - grid.begin());
        const double w = (t - grid[j - 1]) / (grid[j] - grid[j - 1]);
        return (1.0 - w) * samples[j - 1] + w * samples[j];
    };
    return s;
}

LinearSystem LinearSystem::analytic(Eigen::Index n, std::function<Matrix(double)> a) {
    if (n <= 0) throw DimensionError("linear system dimension must be positive");
    LinearSystem s;
    s.n_ = n;
    s.fn_ = std::move(a);
    return s;
}

Matrix LinearSystem::operator()(double t) const {
    if (constant_) return value_;
    Matrix a = fn_(t);
    if (a.rows() != n_ || a.cols() != n_) throw DimensionError("A(t) returned a matrix of the wrong size");
    return a;
}

std::string to_string(DichotomyKind kind) {
    switch (kind) {
        case DichotomyKind::Dichotomy: return "dichotomy";
        case DichotomyKind::Contraction: return "contraction";
        case DichotomyKind::Expansion: return "expansion";
    }
    return "?";
}

DichotomyKind parse_dichotomy_kind(const std::string& name) {
    if (name == "dichotomy") return DichotomyKind::Dichotomy;
    if (name == "contraction") return DichotomyKind::Contraction;
    if (name == "expansion") return DichotomyKind::Expansion;
    throw ArgumentError("unknown dichotomy kind '" + name + "'");
}

namespace {

void check_constants(double N, double lambda) {
    if (!(N > 0.0) || !(lambda > 0.0)) throw ArgumentError("dichotomy constants N and lambda must be positive");
}

}  // namespace

DichotomyData DichotomyData::contraction(Eigen::Index n, double N, double lambda) {
    check_constants(N, lambda);
    return {[n](double) -> Matrix { return Matrix::Identity(n, n); }, N, lambda, DichotomyKind::Contraction, n};
}

DichotomyData DichotomyData::expansion(Eigen::Index n, double N, double lambda) {
    check_constants(N, lambda);
    return {[n](double) -> Matrix { return Matrix::Zero(n, n); }, N, lambda, DichotomyKind::Expansion, n};
}

DichotomyData DichotomyData::constant_projection(Matrix p, double N, double lambda) {
    check_constants(N, lambda);
    if (p.rows() != p.cols()) throw DimensionError("projection must be square");
    const auto n = p.rows();
    return {[p = std::move(p)](double) -> Matrix { return p; }, N, lambda, DichotomyKind::Dichotomy, n};
}

DichotomyData DichotomyData::varying(Eigen::Index n, std::function<Matrix(double)> p, double N, double lambda) {
    check_constants(N, lambda);
    return {std::move(p), N, lambda, DichotomyKind::Dichotomy, n};
}

Matrix transition(const LinearSystem& sys, double t, double s, double tol) {
    if (t < 0.0 || s < 0.0) throw ArgumentError("transition matrix is defined for t, s >= 0");
    if (!(tol > 0.0)) throw ArgumentError("transition tolerance must be positive");
    const auto n = sys.dim();
    if (t == s) return Matrix::Identity(n, n);
    if (sys.is_constant()) {
        const Matrix scaled = sys.constant_value() * (t - s);
        return scaled.exp();
    }
    const RhsFunction rhs = [&sys, n](double u, const Vector& flat) -> Vector {
        const Eigen::Map<const Matrix> x(flat.data(), n, n);
        Vector out(n * n);
        Eigen::Map<Matrix>(out.data(), n, n) = sys(u) * x;
        return out;
    };
    const Matrix id = Matrix::Identity(n, n);
    const Vector x0 = Eigen::Map<const Vector>(id.data(), n * n);
    const double times[] = {s, t};
    SolverOptions opts;
    opts.abs_tol = tol;
    opts.rel_tol = tol;
    opts.blowup_threshold = std::numeric_limits<double>::max();
    const auto res = solve_ivp(rhs, x0, times, opts);
    if (res.underflow || res.t.size() < 2) {
        throw StiffnessError("step size underflow while integrating the transition matrix near u=" +
                             std::to_string(res.stop_time));
    }
    return Eigen::Map<const Matrix>(res.x.back().data(), n, n);
}

StepTransitions step_transitions(const LinearSystem& sys, std::span<const double> grid, double tol) {
    StepTransitions out;
    if (grid.size() < 2) return out;
    out.forward.reserve(grid.size() - 1);
    out.backward.reserve(grid.size() - 1);
    double cached_dt = std::numeric_limits<double>::quiet_NaN();
    Matrix cached_fwd, cached_bwd;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double dt = grid[i + 1] - grid[i];
        if (sys.is_constant()) {
            // Uniform grids repeat the same step up to rounding.
            if (!(std::abs(dt - cached_dt) <= 1e-13 * std::abs(dt))) {
                cached_dt = dt;
                cached_fwd = (sys.constant_value() * dt).exp();
                cached_bwd = (sys.constant_value() * (-dt)).exp();
            }
            out.forward.push_back(cached_fwd);
            out.backward.push_back(cached_bwd);
        } else {
            out.forward.push_back(transition(sys, grid[i + 1], grid[i], tol));
            out.backward.push_back(transition(sys, grid[i], grid[i + 1], tol));
        }
    }
    return out;
}

std::string DichotomyReport::to_text() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "# exponential dichotomy check on " << grid_points << " grid points (sampled pairs only)\n";
    os << "norm = " << shadowlab::to_string(norm) << "\n";
    os << "tol = " << tol << "\n";
    os << "projections_idempotent = " << (projections_idempotent ? "true" : "false") << "\n";
    os << "kind_consistent = " << (kind_consistent ? "true" : "false") << "\n";
    for (const ConditionCheck* c : {&commutation, &forward, &backward}) {
        os << "[" << c->name << "]\n";
        os << "passed = " << (c->passed ? "true" : "false") << "\n";
        os << "pairs = " << c->pairs << "\n";
        os << "worst_t = " << c->worst_t << "\n";
        os << "worst_s = " << c->worst_s << "\n";
        os << "worst_margin = " << c->worst_margin << "\n";
    }
    os << "passed = " << (passed() ? "true" : "false") << "\n";
    return os.str();
}

namespace {

void record(ConditionCheck& c, double allowed, double observed, double t, double s, double tol) {
    const double margin = allowed - observed;
    if (c.pairs == 0 || margin < c.worst_margin) {
        c.worst_margin = margin;
        c.worst_t = t;
        c.worst_s = s;
    }
    ++c.pairs;
    if (margin < -tol) c.passed = false;
}

}  // namespace

DichotomyReport verify_dichotomy(const LinearSystem& sys, const DichotomyData& d, std::span<const double> grid,
                                 double tol, NormKind k) {
    if (grid.empty()) throw ArgumentError("dichotomy grid must be nonempty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ArgumentError("dichotomy grid must be increasing");
    }
    if (d.n != sys.dim()) throw DimensionError("dichotomy projections and system differ in dimension");

    DichotomyReport rep;
    rep.commutation.name = "commutation";
    rep.forward.name = "forward_decay";
    rep.backward.name = "backward_decay";
    rep.tol = tol;
    rep.norm = k;
    rep.grid_points = grid.size();

    const auto n = sys.dim();
    const Matrix id = Matrix::Identity(n, n);
    std::vector<Matrix> proj;
    proj.reserve(grid.size());
    for (double t : grid) {
        Matrix p = d.P(t);
        if ((p * p - p).cwiseAbs().maxCoeff() > 1e-10) rep.projections_idempotent = false;
        if (d.kind == DichotomyKind::Contraction && (p - id).cwiseAbs().maxCoeff() > 1e-10) rep.kind_consistent = false;
        if (d.kind == DichotomyKind::Expansion && p.cwiseAbs().maxCoeff() > 1e-10) rep.kind_consistent = false;
        proj.push_back(std::move(p));
    }

    const auto steps = step_transitions(sys, grid, 1e-12);
    const std::size_t m = grid.size();
    for (std::size_t j = 0; j < m; ++j) {  // s = grid[j]
        // Forward: T(t_i, t_j) for i >= j.
        Matrix tr = id;
        for (std::size_t i = j; i < m; ++i) {
            if (i > j) tr = steps.forward[i - 1] * tr;
            const double t = grid[i], s = grid[j];
            record(rep.commutation, 0.0, matrix_norm(proj[i] * tr - tr * proj[j], k), t, s, tol);
            record(rep.forward, d.N * std::exp(-d.lambda * (t - s)), matrix_norm(tr * proj[j], k), t, s, tol);
            if (i == j) {
                record(rep.backward, d.N, matrix_norm(id - proj[j], k), t, s, tol);
            }
        }
        // Backward: T(t_i, t_j) for i < j.
        tr = id;
        for (std::size_t ii = j; ii-- > 0;) {
            tr = steps.backward[ii] * tr;
            const double t = grid[ii], s = grid[j];
            record(rep.commutation, 0.0, matrix_norm(proj[ii] * tr - tr * proj[j], k), t, s, tol);
            record(rep.backward, d.N * std::exp(-d.lambda * (s - t)), matrix_norm(tr * (id - proj[j]), k), t, s,
                   tol);
        }
    }
    return rep;
}

double coppel_bound(const LinearSystem& sys, double s, double t, NormKind k) {
    if (s < 0.0 || t < s) throw ArgumentError("coppel_bound needs 0 <= s <= t");
    if (t == s) return 1.0;
    if (sys.is_constant()) return std::exp(mu_closed(sys.constant_value(), k) * (t - s));
    auto integrand = [&sys, k](double u) { return mu_closed(sys(u), k); };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, s, t, 20, 1e-13);
    return std::exp(integral);
}

DichotomyData spectral_dichotomy(const Matrix& a, NormKind k) {
    if (a.rows() != a.cols() || a.rows() == 0) throw DimensionError("spectral dichotomy needs a square matrix");
    const auto n = a.rows();
    Eigen::EigenSolver<Matrix> eig(a);
    if (eig.info() != Eigen::Success) throw ArgumentError("eigen decomposition failed");
    const Eigen::MatrixXcd v = eig.eigenvectors();
    const Eigen::VectorXcd ev = eig.eigenvalues();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(v);
    if (!lu.isInvertible()) throw NotApplicableError("matrix is not diagonalizable");
    const Eigen::MatrixXcd vinv = lu.inverse();
    const double cond = complex_matrix_norm(v, k) * complex_matrix_norm(vinv, k);
    if (!std::isfinite(cond) || cond > 1e12) throw NotApplicableError("eigenvector matrix is too ill-conditioned");

    double lambda = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd stable(n);
    int n_stable = 0;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = ev(i).real();
        if (std::abs(re) <= 1e-12 * scale) throw NotApplicableError("matrix has an eigenvalue on the imaginary axis");
        lambda = std::min(lambda, std::abs(re));
        stable(i) = re < 0.0 ? 1.0 : 0.0;
        n_stable += re < 0.0 ? 1 : 0;
    }
    if (n_stable == n) return DichotomyData::contraction(n, cond, lambda);
    if (n_stable == 0) return DichotomyData::expansion(n, cond, lambda);
    const Matrix p = (v * stable.asDiagonal() * vinv).real();
    return DichotomyData::constant_projection(p, cond, lambda);
}

}  // namespace shadowlab
