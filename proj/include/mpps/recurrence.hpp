#pragma once

// Building blocks for Poisson stable forcing: logistic orbits, near-return
// detection, piecewise-constant step signals, and the relaxation signal Theta
// solving Theta' = -k*Theta + Omega(t) in closed piecewise-exponential form.

#include <cstddef>
#include <vector>

#include "mpps/errors.hpp"

namespace mpps {

struct LogisticOrbit {
    double mu = 0.0;
    double seed = 0.0;
    std::vector<double> values; // values[n+1] = mu*values[n]*(1-values[n])
};

// Iterate the logistic map n times from seed; the orbit has n+1 entries and
// stays in [0,1] for mu in [0,4], seed in [0,1].
LogisticOrbit iterate_logistic(double mu, double seed, std::size_t n);

// Drop the first `discard` entries (chaotic transient) so index 0 sits on the
// attractor; keeps mu/seed metadata.
LogisticOrbit discard_transient(const LogisticOrbit& orbit, std::size_t discard);

struct PoissonSequence {
    // Strictly increasing return times: integer shifts zeta_n straight out of
    // detection, or real times after scale_times().
    std::vector<double> times;
    // Certified precision level per entry; strictly decreasing.
    std::vector<double> precisions;
    // Measured worst deviation per entry (diagnostic; not monotone in general).
    std::vector<double> measured;
    int window = 0;
};

// For each delta (strictly decreasing) find the smallest shift zeta greater
// than the previous entry with max_{0<=i<window} |v[i+zeta]-v[i]| < delta.
// Throws NotFound(delta) when the orbit is too short to certify a level.
PoissonSequence detect_poisson_sequence(const LogisticOrbit& orbit, int window,
                                        const std::vector<double>& deltas);

// Convert integer return shifts into time shifts (multiply by the step length).
PoissonSequence scale_times(const PoissonSequence& seq, double q);

struct StepSignal {
    double p = 0.0;      // logistic parameter the values came from
    double q = 1.0;      // interval length
    double origin = 0.0; // time of index 0
    std::vector<double> values;

    double t_begin() const { return origin; }
    double t_end() const { return origin + q * static_cast<double>(values.size()); }
    // values[i] on [origin + i*q, origin + (i+1)*q); throws OutOfRange outside.
    double eval(double t) const;
    // All discontinuity times origin + i*q inside [a, b].
    std::vector<double> breakpoints(double a, double b) const;

private:
    friend struct ThetaSignal;
    std::size_t interval_index(double t) const;
};

StepSignal build_step_signal(const LogisticOrbit& orbit, double q, double origin = 0.0);

struct ThetaSignal {
    double decay = 1.0; // the rate k
    StepSignal forcing;
    std::vector<double> left_states; // Theta at each interval's left endpoint

    double t_begin() const { return forcing.t_begin(); }
    double t_end() const { return forcing.t_end(); }
    // Within interval i:  Theta(t) = th_i*e^{-k d} + (eta_i/k)*(1 - e^{-k d}),
    // d = t - left endpoint.  Exact up to rounding; no quadrature error.
    double eval(double t) const;
    // Closed-form derivative e^{-k d}*(eta_i - k*th_i); used by the ODE
    // residual check, independent of eval's expression.
    double derivative(double t) const;
};

// The infinite-history integral is truncated at the forcing's start with
// initial state Omega(start)/k; the induced error decays like e^{-k (t-start)},
// so verification intervals should sit at least 30/k past the start.
ThetaSignal build_theta(const StepSignal& forcing, double k);

struct ThetaPoissonReport {
    bool pass = false;
    double eps = 0.0;
    double a = 0.0, b = 0.0;
    std::vector<double> shifts;
    std::vector<double> sups; // sup_{[a,b]} |Theta(t+shift) - Theta(t)| per shift
    int tail_start = 0;       // verdict ignores entries before this index
};

// Checks |Theta(t+t_k) - Theta(t)| < eps on [a,b] along the sequence (time
// units).  Pass iff every sup from the tail index (last two thirds) on is
// below eps.
ThetaPoissonReport verify_theta_poisson(const ThetaSignal& theta, const PoissonSequence& shifts,
                                        double a, double b, double eps,
                                        int samples_per_interval = 40);

} // namespace mpps
