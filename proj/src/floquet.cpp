#include "mpps/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mpps/ode.hpp"

namespace mpps {

namespace {

// Matrix ODE X' = A(t) X as a flattened first-order system (column-major,
// matching Eigen's default layout).
ode::Rhs matrix_rhs(const PeriodicMatrixFn& A) {
    return [&A, M = Eigen::MatrixXd(A.dim, A.dim)](double t, const Eigen::VectorXd& y,
                                                   Eigen::VectorXd& dy) mutable {
        const int n = A.dim;
        A.eval(t, M);
        Eigen::Map<const Eigen::MatrixXd> Y(y.data(), n, n);
        Eigen::Map<Eigen::MatrixXd> dY(dy.data(), n, n);
        dY = M * Y;
    };
}

Eigen::VectorXd flat_identity(int n) {
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    return Eigen::Map<Eigen::VectorXd>(id.data(), n * n);
}

} // namespace

int sampled_period_multiple(const PeriodicMatrixFn& A, double tol, int max_k, int samples) {
    Eigen::MatrixXd m0(A.dim, A.dim), m1(A.dim, A.dim);
    for (int k = 1; k <= max_k; ++k) {
        double worst = 0.0;
        for (int j = 0; j < samples; ++j) {
            // Irrational stride so samples don't hide a mismatch by aliasing.
            double t = A.omega * (static_cast<double>(j) * 0.6180339887498949);
            A.eval(t, m0);
            A.eval(t + k * A.omega, m1);
            worst = std::max(worst, row_sum_norm(m1 - m0));
        }
        if (worst <= tol) return k;
    }
    return 0;
}

Eigen::MatrixXd transition_matrix(const PeriodicMatrixFn& A, double t, double s, double tol) {
    if (!(tol > 0.0)) throw ConfigError("integration tolerance must be positive");
    const int n = A.dim;
    ode::Options opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-2;
    Eigen::VectorXd y = ode::integrate(matrix_rhs(A), s, flat_identity(n), t, opt);
    return Eigen::Map<Eigen::MatrixXd>(y.data(), n, n);
}

FloquetData multipliers(const PeriodicMatrixFn& A, double tol) {
    FloquetData fd;
    fd.omega = A.omega;
    fd.tol = tol;
    fd.monodromy = transition_matrix(A, A.omega, 0.0, tol);
    Eigen::EigenSolver<Eigen::MatrixXd> es(fd.monodromy, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw SolverError("monodromy eigenvalue solve failed");
    fd.multipliers = es.eigenvalues();
    fd.c4_satisfied = true;
    for (Eigen::Index i = 0; i < fd.multipliers.size(); ++i)
        if (std::abs(fd.multipliers[i]) >= 1.0) fd.c4_satisfied = false;
    return fd;
}

void estimate_dichotomy(const PeriodicMatrixFn& A, FloquetData& fd, double tol, int grid) {
    if (grid < 8) throw ConfigError("dichotomy grid too coarse");
    double rho_max = 0.0;
    for (Eigen::Index i = 0; i < fd.multipliers.size(); ++i)
        rho_max = std::max(rho_max, std::abs(fd.multipliers[i]));
    if (rho_max >= 1.0)
        throw ConditionFailed("a multiplier has modulus " + std::to_string(rho_max) +
                              " >= 1: no exponential decay");

    const double alpha = 0.99 * (-std::log(rho_max) / A.omega);

    // Sample the fundamental matrix on [0, 3*omega]; X(t,s) = Phi(t) Phi(s)^-1.
    const double T = 3.0 * A.omega;
    const int n = A.dim;
    std::vector<double> times(grid);
    for (int j = 0; j < grid; ++j) times[j] = T * static_cast<double>(j) / (grid - 1);

    std::vector<Eigen::MatrixXd> phi;
    phi.reserve(grid);
    ode::Options opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-2;
    {
        std::size_t next = 0;
        ode::integrate(
            matrix_rhs(A), 0.0, flat_identity(n), T, opt, times,
            [&](double t, const Eigen::VectorXd& y) {
                if (next < times.size() && std::abs(t - times[next]) <= 1e-9 * std::max(1.0, T)) {
                    phi.emplace_back(Eigen::Map<const Eigen::MatrixXd>(y.data(), n, n));
                    ++next;
                }
            });
        if (phi.size() != times.size()) throw SolverError("fundamental matrix sampling misaligned");
    }

    double K_raw = 0.0;
    for (int i = 0; i < grid; ++i) {
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(phi[i].transpose());
        for (int j = i; j < grid; ++j) {
            // X(t_j, t_i)^T = Phi(t_i)^-T Phi(t_j)^T
            Eigen::MatrixXd Xts = lu.solve(phi[j].transpose()).transpose();
            K_raw = std::max(K_raw, row_sum_norm(Xts) * std::exp(alpha * (times[j] - times[i])));
        }
    }

    fd.alpha = alpha;
    fd.K = std::max(1.0, std::ceil(K_raw * 1000.0) / 1000.0);
}

Lemma1Report check_lemma1_bound(const PeriodicMatrixFn& A, const FloquetData& fd,
                                const std::vector<std::array<double, 3>>& triples, double tol,
                                double noise_floor) {
    if (!(fd.K >= 1.0) || !(fd.alpha > 0.0))
        throw ConfigError("decay pair (K, alpha) not available");

    // sup_u ||A(u+tau) - A(u)|| per distinct tau, sampled over six declared
    // periods (covers entries whose true period is a multiple of omega).
    std::map<double, double> sup_shift;
    auto shift_norm = [&](double tau) {
        auto it = sup_shift.find(tau);
        if (it != sup_shift.end()) return it->second;
        Eigen::MatrixXd m0(A.dim, A.dim), m1(A.dim, A.dim);
        double worst = 0.0;
        const int samples = 4096;
        for (int j = 0; j <= samples; ++j) {
            double u = 6.0 * A.omega * static_cast<double>(j) / samples;
            A.eval(u, m0);
            A.eval(u + tau, m1);
            worst = std::max(worst, row_sum_norm(m1 - m0));
        }
        sup_shift.emplace(tau, worst);
        return worst;
    };

    const double coef = 2.0 * fd.K * fd.K / (fd.alpha * fd.alpha * std::exp(1.0));
    Lemma1Report rep;
    rep.noise_floor = noise_floor;
    rep.all_pass = true;
    for (const auto& [t, s, tau] : triples) {
        if (t < s) throw ConfigError("lemma-1 pair needs t >= s");
        Lemma1Case c;
        c.t = t;
        c.s = s;
        c.tau = tau;
        Eigen::MatrixXd shifted = transition_matrix(A, t + tau, s + tau, tol);
        Eigen::MatrixXd base = transition_matrix(A, t, s, tol);
        c.lhs = row_sum_norm(shifted - base);
        c.rhs = shift_norm(tau) * coef * std::exp(-0.5 * fd.alpha * (t - s));
        c.margin = c.rhs + noise_floor - c.lhs;
        c.pass = c.lhs <= c.rhs + noise_floor;
        if (!c.pass) rep.all_pass = false;
        rep.cases.push_back(c);
    }
    return rep;
}

Lemma1Report check_lemma1_bound(const PeriodicMatrixFn& A, const FloquetData& fd, double tau,
                                const std::vector<std::pair<double, double>>& pairs, double tol,
                                double noise_floor) {
    std::vector<std::array<double, 3>> triples;
    triples.reserve(pairs.size());
    for (const auto& [t, s] : pairs) triples.push_back({t, s, tau});
    return check_lemma1_bound(A, fd, triples, tol, noise_floor);
}

} // namespace mpps
