#include "mpps/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mpps/analysis.hpp"
#include "mpps/ode.hpp"

namespace mpps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Output grid step: min(omega/grid_per_period, q/20), snapped so an integer
// number of steps covers one period exactly (the periodic component is then
// extendable by index arithmetic, with no interpolation error).
double grid_step(double omega, double q, int grid_per_period) {
    double raw = omega / static_cast<double>(grid_per_period);
    if (q > 0.0) raw = std::min(raw, q / 20.0);
    auto n_per = static_cast<long>(std::ceil(omega / raw - 1e-9));
    return omega / static_cast<double>(n_per);
}

ode::Rhs system_rhs(const QuasilinearSystem& sys) {
    return [&sys, M = Eigen::MatrixXd(sys.dim, sys.dim), buf = Eigen::VectorXd(sys.dim)](
               double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) mutable {
        sys.A.eval(t, M);
        dy.noalias() = M * y;
        if (sys.g) {
            sys.g(t, y, buf);
            dy += buf;
        }
        if (sys.forcing.phi) {
            sys.forcing.phi(t, buf);
            dy += buf;
        }
        if (sys.forcing.psi) {
            sys.forcing.psi(t, buf);
            dy += buf;
        }
    };
}

// Integrate and collect the states at grid_t0 + j*dt, j = 0..n_nodes-1.
// Extra mandatory times (forcing breakpoints) are honored; when domain_H is
// finite the state is required to stay inside the H-ball at every recorded
// time.
Trajectory integrate_sampled(const ode::Rhs& f, double t_start, Eigen::VectorXd y0,
                             double grid_t0, double dt, std::size_t n_nodes,
                             std::vector<double> mandatory, const ode::Options& opt,
                             double domain_H = kInf) {
    if (t_start > grid_t0 + 1e-12) throw ConfigError("integration must start at or before the grid");
    const double t_end = grid_t0 + dt * static_cast<double>(n_nodes - 1);
    const double snap = 1e-9 * std::max(1.0, std::abs(t_end - t_start));

    for (std::size_t j = 0; j < n_nodes; ++j)
        mandatory.push_back(grid_t0 + dt * static_cast<double>(j));

    Trajectory traj;
    traj.t0 = grid_t0;
    traj.dt = dt;
    traj.rtol = opt.rtol;
    traj.atol = opt.atol;
    traj.samples.reserve(n_nodes);

    std::size_t next = 0;
    ode::integrate(f, t_start, std::move(y0), t_end, opt, mandatory,
                   [&](double t, const Eigen::VectorXd& y) {
                       if (domain_H < kInf && inf_norm(y) >= domain_H)
                           throw DomainExit("state norm " + std::to_string(inf_norm(y)) +
                                            " left the H-ball (H=" + std::to_string(domain_H) +
                                            ") at t=" + std::to_string(t));
                       if (next < n_nodes &&
                           std::abs(t - (grid_t0 + dt * static_cast<double>(next))) <= snap) {
                           traj.samples.push_back(y);
                           ++next;
                       }
                   });
    if (traj.samples.size() != n_nodes)
        throw SolverError("grid sampling misaligned: " + std::to_string(traj.samples.size()) +
                          " of " + std::to_string(n_nodes) + " nodes");
    return traj;
}

// Piecewise-linear view of a sample array, clamped at the ends (integrator
// stage times never leave the covered span by more than rounding).
Eigen::VectorXd interp_samples(const std::vector<Eigen::VectorXd>& samples, double t0, double dt,
                               double t) {
    double pos = (t - t0) / dt;
    if (pos <= 0.0) return samples.front();
    if (pos >= static_cast<double>(samples.size() - 1)) return samples.back();
    auto i = static_cast<std::size_t>(pos);
    double w = pos - static_cast<double>(i);
    return samples[i] * (1.0 - w) + samples[i + 1] * w;
}

} // namespace

std::vector<double> MppsForcing::breakpoints(double a, double b) const {
    std::vector<double> pts;
    if (!has_breaks || b < a) return pts;
    long lo = static_cast<long>(std::ceil((a - break_origin) / break_q));
    long hi = static_cast<long>(std::floor((b - break_origin) / break_q));
    for (long i = lo; i <= hi; ++i) {
        double t = break_origin + static_cast<double>(i) * break_q;
        if (t >= a && t <= b) pts.push_back(t);
    }
    return pts;
}

Eigen::VectorXd MppsForcing::eval_phi(double t) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    if (phi) phi(t, v);
    return v;
}

Eigen::VectorXd MppsForcing::eval_psi(double t) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    if (psi) psi(t, v);
    return v;
}

void QuasilinearSystem::rhs(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) const {
    Eigen::MatrixXd M(dim, dim);
    A.eval(t, M);
    dx.noalias() = M * x;
    Eigen::VectorXd buf(dim);
    if (g) {
        g(t, x, buf);
        dx += buf;
    }
    dx += forcing.eval_phi(t) + forcing.eval_psi(t);
}

Eigen::VectorXd Trajectory::at(double t) const {
    if (samples.empty()) throw OutOfRange(t, "(empty trajectory)");
    double pos = (t - t0) / dt;
    const double slack = 1e-9;
    if (pos < -slack || pos > static_cast<double>(samples.size() - 1) + slack)
        throw OutOfRange(t, "[" + std::to_string(t0) + ", " + std::to_string(t_end()) + "]");
    pos = std::clamp(pos, 0.0, static_cast<double>(samples.size() - 1));
    auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= samples.size()) return samples.back();
    double w = pos - static_cast<double>(i);
    return samples[i] * (1.0 - w) + samples[i + 1] * w;
}

double Trajectory::sup_norm() const {
    double sup = 0.0;
    for (const auto& s : samples) sup = std::max(sup, inf_norm(s));
    return sup;
}

double sup_distance(const Trajectory& a, const Trajectory& b, double from, double to) {
    double sup = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double t = a.time(j);
        if (t < from || t > to) continue;
        sup = std::max(sup, inf_norm(a.samples[j] - b.at(t)));
        any = true;
    }
    if (!any) throw CoverageError("trajectories do not overlap the comparison window");
    return sup;
}

// ------------------------------------------------------------ conditions ----

ConditionReport check_conditions(const QuasilinearSystem& sys, const FloquetData& fd) {
    ConditionReport rep;
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const PeriodicMatrixFn& lin = sys.has_split ? sys.B : sys.A;
    const double omega = sys.omega;

    auto period_deviation = [&](int k) {
        Eigen::MatrixXd m0(lin.dim, lin.dim), m1(lin.dim, lin.dim);
        double worst = 0.0;
        for (int j = 0; j < 97; ++j) {
            double t = omega * (static_cast<double>(j) * 0.6180339887498949);
            lin.eval(t, m0);
            lin.eval(t + k * omega, m1);
            worst = std::max(worst, row_sum_norm(m1 - m0));
        }
        return worst;
    };

    { // C1: the (periodic part of the) coefficient matrix is periodic.
        auto& c = rep[1];
        c.applicable = true;
        int k = sampled_period_multiple(lin, 1e-9, 6);
        c.lhs = period_deviation(k >= 1 ? k : 1);
        c.rhs = 1e-9;
        c.satisfied = k >= 1;
        c.detail = k >= 1 ? (k == 1 ? "periodic at the declared omega"
                                    : "periodic at " + std::to_string(k) + "*omega")
                          : "no period multiple up to 6*omega matched";
        if (sys.has_split) c.detail += " (applies to the periodic part B)";
    }

    { // C2: phi periodic, psi bounded by the declared sups.
        auto& c = rep[2];
        c.applicable = true;
        double dev_phi = 0.0, sup_phi = 0.0, sup_psi = 0.0;
        for (int j = 0; j <= 800; ++j) {
            double t = 200.0 * omega * static_cast<double>(j) / 800.0;
            try {
                Eigen::VectorXd p = sys.forcing.eval_phi(t);
                Eigen::VectorXd po = sys.forcing.eval_phi(t + omega);
                dev_phi = std::max(dev_phi, inf_norm(po - p));
                sup_phi = std::max(sup_phi, inf_norm(p));
                sup_psi = std::max(sup_psi, inf_norm(sys.forcing.eval_psi(t)));
            } catch (const OutOfRange&) {
                break; // psi covers a finite range; sampled what we could
            }
        }
        c.lhs = sup_psi;
        c.rhs = sys.forcing.m_psi + 1e-9;
        c.satisfied = dev_phi <= 1e-9 && sup_psi <= sys.forcing.m_psi + 1e-9 &&
                      sup_phi <= sys.forcing.m_phi + 1e-9;
        c.detail = "phi period deviation " + std::to_string(dev_phi) + ", sup|phi| " +
                   std::to_string(sup_phi) + " <= m_phi, sup|psi| " + std::to_string(sup_psi) +
                   " <= m_psi";
    }

    { // C3: Poisson number of the sequence is zero (mod omega).
        auto& c = rep[3];
        c.applicable = true;
        if (sys.forcing.seq.times.empty()) {
            c.satisfied = !sys.forcing.psi; // zero Poisson component: trivially fine
            c.detail = c.satisfied ? "no Poisson component" : "psi present but no sequence";
        } else {
            ShiftSpectrum sp = shift_spectrum(sys.forcing.seq, omega);
            c.lhs = sp.kappa;
            c.rhs = sp.cluster_radius;
            c.satisfied = sp.kappa_zero;
            c.detail = "kappa=" + std::to_string(sp.kappa) + " from " +
                       std::to_string(sp.clusters.size()) + " cluster(s)";
        }
    }

    { // C4: multipliers inside the unit circle (plain systems).
        auto& c = rep[4];
        c.applicable = !sys.has_split;
        double rho = 0.0;
        for (Eigen::Index i = 0; i < fd.multipliers.size(); ++i)
            rho = std::max(rho, std::abs(fd.multipliers[i]));
        c.lhs = rho;
        c.rhs = 1.0;
        c.satisfied = fd.c4_satisfied;
        if (sys.has_split) c.detail = "split system: see C9";
    }

    const bool quasi = !sys.linear();
    const double ball = std::isfinite(sys.H) ? 0.9 * sys.H : 10.0;

    { // C5: g periodic in t.
        auto& c = rep[5];
        c.applicable = quasi;
        if (quasi) {
            Eigen::VectorXd x(sys.dim), g0(sys.dim), g1(sys.dim);
            double worst = 0.0;
            for (int j = 0; j < 200; ++j) {
                double t = omega * (static_cast<double>(j) * 0.6180339887498949);
                for (int i = 0; i < sys.dim; ++i) x[i] = ball * (2.0 * unit(rng) - 1.0);
                sys.g(t, x, g0);
                sys.g(t + omega, x, g1);
                worst = std::max(worst, inf_norm(g1 - g0));
            }
            c.lhs = worst;
            c.rhs = 1e-9;
            c.satisfied = worst <= 1e-9;
        }
    }

    { // C6: Lipschitz bound of g with the declared constant.
        auto& c = rep[6];
        c.applicable = quasi;
        if (quasi) {
            Eigen::VectorXd x1(sys.dim), x2(sys.dim), g1(sys.dim), g2(sys.dim);
            double worst = 0.0, sup_g = 0.0;
            for (int j = 0; j < 500; ++j) {
                double t = 4.0 * omega * unit(rng);
                for (int i = 0; i < sys.dim; ++i) {
                    x1[i] = ball * (2.0 * unit(rng) - 1.0);
                    x2[i] = ball * (2.0 * unit(rng) - 1.0);
                }
                sys.g(t, x1, g1);
                sys.g(t, x2, g2);
                sup_g = std::max({sup_g, inf_norm(g1), inf_norm(g2)});
                double dx = inf_norm(x1 - x2);
                if (dx > 1e-12) worst = std::max(worst, inf_norm(g1 - g2) / dx);
            }
            c.lhs = worst;
            c.rhs = sys.L + 1e-12;
            c.satisfied = worst <= sys.L + 1e-12 && sup_g <= sys.m_g + 1e-12;
            c.detail = "sampled Lipschitz ratio " + std::to_string(worst) + ", sup|g| " +
                       std::to_string(sup_g) + " <= m_g=" + std::to_string(sys.m_g);
        }
    }

    { // C7: K (m_g + m_phi + m_psi) / H < alpha.
        auto& c = rep[7];
        c.applicable = quasi && !sys.has_split;
        if (c.applicable) {
            c.lhs = fd.K * (sys.m_g + sys.forcing.m_phi + sys.forcing.m_psi) / sys.H;
            c.rhs = fd.alpha;
            c.satisfied = c.lhs < c.rhs;
        }
    }

    { // C8: K L < alpha.
        auto& c = rep[8];
        c.applicable = quasi && !sys.has_split;
        if (c.applicable) {
            c.lhs = fd.K * sys.L;
            c.rhs = fd.alpha;
            c.satisfied = c.lhs < c.rhs;
        }
    }

    if (sys.has_split) {
        double sup_D = 0.0;
        Eigen::MatrixXd Dm(sys.dim, sys.dim);
        for (int j = 0; j <= 800; ++j) {
            sys.D(200.0 * omega * static_cast<double>(j) / 800.0, Dm);
            sup_D = std::max(sup_D, row_sum_norm(Dm));
        }

        { // C9: multipliers of y' = B(t) y inside the unit circle.
            auto& c = rep[9];
            c.applicable = true;
            double rho = 0.0;
            for (Eigen::Index i = 0; i < fd.multipliers.size(); ++i)
                rho = std::max(rho, std::abs(fd.multipliers[i]));
            c.lhs = rho;
            c.rhs = 1.0;
            c.satisfied = fd.c4_satisfied;
        }
        { // C10: D (L + d) < beta, with (D, beta) the decay pair of B.
            auto& c = rep[10];
            c.applicable = true;
            c.lhs = fd.K * (sys.L + sys.d_sup);
            c.rhs = fd.alpha;
            c.satisfied = c.lhs < c.rhs && sup_D <= sys.d_sup + 1e-9;
            c.detail = "sampled sup||D|| = " + std::to_string(sup_D) +
                       " <= d=" + std::to_string(sys.d_sup);
        }
        { // C11: D (m_g + m_phi + m_psi) / H < beta - D d.
            auto& c = rep[11];
            c.applicable = true;
            c.lhs = fd.K * (sys.m_g + sys.forcing.m_phi + sys.forcing.m_psi) / sys.H;
            c.rhs = fd.alpha - fd.K * sys.d_sup;
            c.satisfied = c.lhs < c.rhs;
        }
    }

    return rep;
}

bool ConditionReport::gate_passed(const QuasilinearSystem& sys) const {
    std::vector<int> required;
    if (sys.has_split)
        required = {1, 2, 3, 5, 6, 9, 10, 11};
    else if (sys.linear())
        required = {1, 2, 3, 4};
    else
        required = {1, 2, 3, 4, 5, 6, 7, 8};
    for (int i : required)
        if ((*this)[i].applicable && !(*this)[i].satisfied) return false;
    return true;
}

// --------------------------------------------------------- linear route ----

LinearSolution bounded_solution_linear(const PeriodicMatrixFn& A, const MppsForcing& forcing,
                                       double T0, double T1, double tol, double burn_in,
                                       int grid_per_period) {
    if (!(T1 > T0)) throw ConfigError("empty solution window");
    if (!(burn_in > 0.0)) throw ConfigError("burn-in must be positive");
    const int n = A.dim;
    const double omega = A.omega;
    const double dt = grid_step(omega, forcing.has_breaks ? forcing.break_q : 0.0, grid_per_period);
    const auto n_per = static_cast<std::size_t>(std::llround(omega / dt));
    const auto n_nodes = static_cast<std::size_t>(std::ceil((T1 - T0) / dt - 1e-9)) + 1;
    const double T1a = T0 + dt * static_cast<double>(n_nodes - 1);

    ode::Options opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-2;

    LinearSolution out;

    // Periodic component: solve the periodic boundary-value problem at T0.
    Trajectory xphi;
    xphi.t0 = T0;
    xphi.dt = dt;
    if (forcing.phi) {
        Eigen::MatrixXd M = transition_matrix(A, T0 + omega, T0, tol);
        Eigen::MatrixXd ImM = Eigen::MatrixXd::Identity(n, n) - M;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(ImM);
        if (lu.rcond() < 1e-12)
            throw SingularPeriodMap("I - X(omega,0) is numerically singular (a multiplier is "
                                    "too close to 1)");
        // Variation of constants: integrating from zero state accumulates
        // exactly integral_{T0}^{T0+omega} X(T0+omega, s) phi(s) ds.
        auto rhs_phi = [&A, &forcing, M2 = Eigen::MatrixXd(n, n), buf = Eigen::VectorXd(n)](
                           double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) mutable {
            A.eval(t, M2);
            dy.noalias() = M2 * y;
            forcing.phi(t, buf);
            dy += buf;
        };
        Eigen::VectorXd v =
            ode::integrate(rhs_phi, T0, Eigen::VectorXd::Zero(n), T0 + omega, opt);
        Eigen::VectorXd xphi0 = lu.solve(v);

        Trajectory period = integrate_sampled(rhs_phi, T0, xphi0, T0, dt, n_per + 1, {}, opt);
        out.periodicity_residual = inf_norm(period.samples.back() - period.samples.front());

        xphi.samples.reserve(n_nodes);
        for (std::size_t j = 0; j < n_nodes; ++j) xphi.samples.push_back(period.samples[j % n_per]);
    } else {
        xphi.samples.assign(n_nodes, Eigen::VectorXd::Zero(n));
    }
    xphi.rtol = opt.rtol;
    xphi.atol = opt.atol;

    // Poisson component: burn-in forward integration with zero initial state.
    Trajectory xpsi;
    if (forcing.psi) {
        auto rhs_psi = [&A, &forcing, M2 = Eigen::MatrixXd(n, n), buf = Eigen::VectorXd(n)](
                           double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) mutable {
            A.eval(t, M2);
            dy.noalias() = M2 * y;
            forcing.psi(t, buf);
            dy += buf;
        };
        xpsi = integrate_sampled(rhs_psi, T0 - burn_in, Eigen::VectorXd::Zero(n), T0, dt, n_nodes,
                                 forcing.breakpoints(T0 - burn_in, T1a), opt);
    } else {
        xpsi.t0 = T0;
        xpsi.dt = dt;
        xpsi.samples.assign(n_nodes, Eigen::VectorXd::Zero(n));
        xpsi.rtol = opt.rtol;
        xpsi.atol = opt.atol;
    }

    Trajectory x;
    x.t0 = T0;
    x.dt = dt;
    x.rtol = opt.rtol;
    x.atol = opt.atol;
    x.samples.reserve(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j) x.samples.push_back(xphi.samples[j] + xpsi.samples[j]);

    out.x = std::move(x);
    out.x_phi = std::move(xphi);
    out.x_psi = std::move(xpsi);
    return out;
}

// --------------------------------------------------------- picard route ----

namespace {

PicardResult picard_core(const QuasilinearSystem& sys, const PeriodicMatrixFn& lin,
                         const NonlinearFn& g_eff, double T0, double T1, double iter_tol,
                         int max_iter, double burn_in, int grid_per_period) {
    if (!(T1 > T0)) throw ConfigError("empty solution window");
    if (!(iter_tol > 0.0)) throw ConfigError("iteration tolerance must be positive");
    if (max_iter < 2) throw ConfigError("need at least 2 iterations");

    const int n = sys.dim;
    const double dt =
        grid_step(sys.omega, sys.forcing.has_breaks ? sys.forcing.break_q : 0.0, grid_per_period);
    const auto n_win = static_cast<std::size_t>(std::ceil((T1 - T0) / dt - 1e-9)) + 1;
    const auto n_burn = static_cast<std::size_t>(std::ceil(burn_in / dt - 1e-9));
    const double t_start = T0 - dt * static_cast<double>(n_burn);
    const std::size_t n_tot = n_burn + n_win;
    const double T1a = T0 + dt * static_cast<double>(n_win - 1);

    ode::Options opt;
    // The iteration converges to iter_tol; integrating much tighter than that
    // is wasted work, but keep enough slack that distances resolve cleanly.
    opt.rtol = std::min(1e-10, iter_tol * 1e-3);
    opt.atol = opt.rtol * 1e-2;

    std::vector<double> breaks = sys.forcing.breakpoints(t_start, T1a);

    std::vector<Eigen::VectorXd> cur(n_tot, Eigen::VectorXd::Zero(n));
    PicardResult res;

    for (int m = 0; m < max_iter; ++m) {
        auto rhs = [&, M = Eigen::MatrixXd(n, n), buf = Eigen::VectorXd(n)](
                       double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) mutable {
            lin.eval(t, M);
            dy.noalias() = M * y;
            if (g_eff) {
                g_eff(t, interp_samples(cur, t_start, dt, t), buf);
                dy += buf;
            }
            if (sys.forcing.phi) {
                sys.forcing.phi(t, buf);
                dy += buf;
            }
            if (sys.forcing.psi) {
                sys.forcing.psi(t, buf);
                dy += buf;
            }
        };
        Trajectory it = integrate_sampled(rhs, t_start, Eigen::VectorXd::Zero(n), t_start, dt,
                                          n_tot, breaks, opt);

        double dist = 0.0;
        for (std::size_t j = n_burn; j < n_tot; ++j)
            dist = std::max(dist, inf_norm(it.samples[j] - cur[j]));
        res.distances.push_back(dist);
        cur = std::move(it.samples);
        res.iterations = m + 1;

        double sup = 0.0;
        for (std::size_t j = n_burn; j < n_tot; ++j) sup = std::max(sup, inf_norm(cur[j]));
        res.sup = sup;
        if (std::isfinite(sys.H) && sup >= sys.H)
            throw DomainExit("Picard iterate left the H-ball: sup=" + std::to_string(sup));

        if (dist < iter_tol) break;
        if (m >= 1 && dist >= res.distances[static_cast<std::size_t>(m) - 1])
            throw NoContraction("successive distances stopped decreasing at iteration " +
                                std::to_string(m) + " (d=" + std::to_string(dist) +
                                "); condition violation or too-short burn-in");
    }
    if (res.distances.back() >= iter_tol)
        throw NoContraction("no convergence to " + std::to_string(iter_tol) + " within " +
                            std::to_string(max_iter) + " iterations");

    for (std::size_t m = 0; m + 1 < res.distances.size(); ++m)
        if (res.distances[m] > 0.0) res.ratios.push_back(res.distances[m + 1] / res.distances[m]);

    res.traj.t0 = T0;
    res.traj.dt = dt;
    res.traj.rtol = opt.rtol;
    res.traj.atol = opt.atol;
    res.traj.system_id = sys.id;
    res.traj.samples.assign(cur.begin() + static_cast<std::ptrdiff_t>(n_burn), cur.end());
    return res;
}

} // namespace

PicardResult picard_solve(const QuasilinearSystem& sys, const FloquetData& fd, double T0,
                          double T1, double iter_tol, int max_iter, double burn_in,
                          int grid_per_period) {
    (void)fd; // the decay pair gates the call at the pipeline level
    return picard_core(sys, sys.A, sys.g, T0, T1, iter_tol, max_iter, burn_in, grid_per_period);
}

PicardResult solve_mpps_coefficients(const QuasilinearSystem& sys, const FloquetData& fdB,
                                     double T0, double T1, double iter_tol, int max_iter,
                                     double burn_in, int grid_per_period) {
    if (!sys.has_split) throw ConfigError("system declares no B + D split");
    if (!fdB.c4_satisfied)
        throw ConditionFailed("a multiplier of the periodic part B is not inside the unit circle");
    NonlinearFn g_eff = [&sys, Dm = Eigen::MatrixXd(sys.dim, sys.dim),
                         buf = Eigen::VectorXd(sys.dim)](double t, const Eigen::VectorXd& x,
                                                         Eigen::VectorXd& out) mutable {
        sys.D(t, Dm);
        out.noalias() = Dm * x;
        if (sys.g) {
            sys.g(t, x, buf);
            out += buf;
        }
    };
    return picard_core(sys, sys.B, g_eff, T0, T1, iter_tol, max_iter, burn_in, grid_per_period);
}

// ------------------------------------------------------------- forward ----

Trajectory simulate_forward(const QuasilinearSystem& sys, const Eigen::VectorXd& x0, double t0,
                            double t1, double tol, int grid_per_period) {
    if (!(t1 > t0)) throw ConfigError("empty simulation span");
    if (std::isfinite(sys.H) && inf_norm(x0) >= sys.H)
        throw ConfigError("initial state outside the H-ball");
    const double dt =
        grid_step(sys.omega, sys.forcing.has_breaks ? sys.forcing.break_q : 0.0, grid_per_period);
    const auto n_nodes = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-9)) + 1;
    const double t1a = t0 + dt * static_cast<double>(n_nodes - 1);
    ode::Options opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-2;
    Trajectory traj = integrate_sampled(system_rhs(sys), t0, x0, t0, dt, n_nodes,
                                        sys.forcing.breakpoints(t0, t1a), opt,
                                        sys.linear() ? kInf : sys.H);
    traj.system_id = sys.id;
    return traj;
}

GronwallReport verify_gronwall_decay(const QuasilinearSystem& sys, const FloquetData& fd,
                                     const Eigen::VectorXd& x0, const Eigen::VectorXd& z0,
                                     double t0, double t1, double tol, int grid_per_period) {
    if (inf_norm(x0 - z0) == 0.0) {
        GronwallReport rep;
        rep.rate_bound = fd.alpha - fd.K * sys.L;
        rep.pass = true;
        return rep;
    }
    Trajectory x = simulate_forward(sys, x0, t0, t1, tol, grid_per_period);
    Trajectory z = simulate_forward(sys, z0, t0, t1, tol, grid_per_period);

    GronwallReport rep;
    rep.rate_bound = fd.alpha - fd.K * sys.L;
    rep.initial_gap = inf_norm(x0 - z0);
    rep.pass = true;

    double sum_t = 0, sum_y = 0, sum_tt = 0, sum_ty = 0;
    std::size_t m = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        double t = x.time(j);
        double gap = inf_norm(x.samples[j] - z.samples[j]);
        double bound = fd.K * std::exp(-rep.rate_bound * (t - t0)) * rep.initial_gap + 1e-9;
        rep.worst_ratio = std::max(rep.worst_ratio, gap / bound);
        if (gap > bound) rep.pass = false;
        if (t >= 0.5 * (t0 + t1) && gap > 1e-300) {
            double y = std::log(gap);
            sum_t += t;
            sum_y += y;
            sum_tt += t * t;
            sum_ty += t * y;
            ++m;
        }
    }
    if (m >= 2) {
        double denom = static_cast<double>(m) * sum_tt - sum_t * sum_t;
        if (denom > 0.0) rep.rate_measured = -((static_cast<double>(m) * sum_ty - sum_t * sum_y) / denom);
    }
    return rep;
}

} // namespace mpps
