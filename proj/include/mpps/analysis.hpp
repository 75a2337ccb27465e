#pragma once

// Verification layer: uniform-convergence checks along a Poisson sequence,
// shift residues mod omega with clustering (Poisson number estimation),
// periodic/Poisson decomposition checks, and recurrence of compositions.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mpps/errors.hpp"
#include "mpps/recurrence.hpp"

namespace mpps {

// Vector-valued evaluable on a time range.  Implementations should throw
// OutOfRange beyond their covered range; the checks translate that into
// CoverageError with context.
using TimeFn = std::function<Eigen::VectorXd(double)>;

struct ShiftSpectrum {
    double omega = 0.0;
    double cluster_radius = 0.0;
    std::vector<double> residues;                 // t_k mod omega, in [0, omega)
    std::vector<std::pair<double, int>> clusters; // (center, member count)
    double kappa = 0.0;                           // smallest cluster center
    bool kappa_zero = false;                      // kappa ~ 0 on the circle
};

// Reduce the sequence mod omega and cluster on the circle by single linkage
// at cluster_radius (<= 0 picks the default omega/100).
ShiftSpectrum shift_spectrum(const PoissonSequence& seq, double omega,
                             double cluster_radius = 0.0);

struct ConvergenceReport {
    double a = 0.0, b = 0.0;
    double eps = 0.0;
    std::vector<double> shifts;
    std::vector<double> sups;
    int tail_start = 0; // verdict ignores entries before this index
    bool pass = false;
    std::string detail;
};

// sup_{[a,b]} ||f(t + t_k) - f(t)|| per shift on a uniform grid of `grid`
// points; pass iff every sup from the tail index on is below eps.
ConvergenceReport verify_poisson(const TimeFn& f, const PoissonSequence& seq, double a, double b,
                                 double eps, int grid = 2000);

// Definition-1 check for phi + psi when the spectrum clusters at zero;
// otherwise checks convergence to the shifted target phi(t + tau) + psi(t)
// for the dominant cluster's tau.
ConvergenceReport check_mpps_sum(const TimeFn& phi, const TimeFn& psi, const PoissonSequence& seq,
                                 double omega, double a, double b, double eps, int grid = 2000,
                                 double cluster_radius = 0.0);

struct PeriodicExtract {
    double omega = 0.0;
    std::vector<double> phases;   // phase grid over [0, omega)
    std::vector<double> values;   // midrange of f over available periods, per phase
    double residual = 0.0;        // sup over phases of half the (max - min) spread

    // Periodic interpolant of the extracted component.
    double eval(double t) const;
};

// Per-phase midrange of f(theta + m*omega) over all covered m; the midrange
// minimizes the sup deviation on the sampled set.  Needs >= 20 periods.
PeriodicExtract extract_periodic_component(const std::function<double(double)>& f, double t0,
                                           double t1, double omega, int phase_grid = 256);

enum class Recurrence { Periodic, Poisson };

// Definition-1 check for t -> G(t, v(t)) under one of the composition lemmas:
// (G Poisson in t, v periodic), (G periodic in t, v Poisson), or both Poisson
// with a common sequence.  Other combinations raise ConfigurationError.
ConvergenceReport check_composition(const std::function<double(double, double)>& G,
                                    Recurrence g_type, const std::function<double(double)>& v,
                                    Recurrence v_type, const PoissonSequence& seq, double omega,
                                    double a, double b, double eps, int grid = 2000);

} // namespace mpps
