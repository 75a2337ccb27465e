#pragma once

// Transition matrices of periodic linear systems, Floquet multipliers, and an
// empirical exponential-decay certificate ||X(t,s)|| <= K e^{-alpha (t-s)}.

#include <array>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpps/errors.hpp"
#include "mpps/norms.hpp"

namespace mpps {

struct PeriodicMatrixFn {
    int dim = 0;
    double omega = 0.0;
    std::function<void(double, Eigen::MatrixXd&)> eval;
    bool diagonal = false;

    Eigen::MatrixXd operator()(double t) const {
        Eigen::MatrixXd m(dim, dim);
        eval(t, m);
        return m;
    }
};

// Smallest k in 1..max_k with A(t + k*omega) = A(t) (sampled, tolerance tol);
// 0 when no multiple matches.  Some sources declare the monodromy period of a
// diagonal system rather than the true period of its entries, so the checker
// accepts small multiples and reports which one held.
int sampled_period_multiple(const PeriodicMatrixFn& A, double tol = 1e-9, int max_k = 6,
                            int samples = 97);

// X(t,s) with X(s,s) = I, by adaptive integration of X' = A(t)X (both time
// directions allowed).
Eigen::MatrixXd transition_matrix(const PeriodicMatrixFn& A, double t, double s, double tol);

struct FloquetData {
    double omega = 0.0;
    Eigen::MatrixXd monodromy;     // X(omega, 0)
    Eigen::VectorXcd multipliers;  // its eigenvalues
    double K = 0.0;                // decay pair, filled by estimate_dichotomy
    double alpha = 0.0;            // or overridden by a declared pair
    double tol = 0.0;
    bool c4_satisfied = false;     // all |rho| < 1
};

FloquetData multipliers(const PeriodicMatrixFn& A, double tol);

// Fill fd.K / fd.alpha:  alpha = -(1/omega) ln max|rho| shrunk by 1%, K = the
// grid maximum of ||X(t,s)|| e^{alpha (t-s)} over t >= s in [0, 3*omega]^2,
// rounded up to 3 decimals (at least 1).  The pair satisfies the bound at
// every grid node by construction; this is a sampled certificate, not a proof.
void estimate_dichotomy(const PeriodicMatrixFn& A, FloquetData& fd, double tol, int grid = 241);

struct Lemma1Case {
    double t = 0, s = 0, tau = 0;
    double lhs = 0, rhs = 0, margin = 0;
    bool pass = false;
};
struct Lemma1Report {
    std::vector<Lemma1Case> cases;
    bool all_pass = false;
    double noise_floor = 0.0;
};

// Checks ||X(t+tau, s+tau) - X(t,s)|| <= sup_u ||A(u+tau) - A(u)|| *
// (2 K^2 / (alpha^2 e)) * e^{-(alpha/2)(t-s)} on the given (t, s, tau)
// triples.  The noise floor absorbs integration error in cases where both
// sides vanish (tau = 0 or a period multiple).
Lemma1Report check_lemma1_bound(const PeriodicMatrixFn& A, const FloquetData& fd,
                                const std::vector<std::array<double, 3>>& triples, double tol,
                                double noise_floor = 1e-8);
// Single-tau convenience over (t, s) pairs.
Lemma1Report check_lemma1_bound(const PeriodicMatrixFn& A, const FloquetData& fd, double tau,
                                const std::vector<std::pair<double, double>>& pairs, double tol,
                                double noise_floor = 1e-8);

} // namespace mpps
