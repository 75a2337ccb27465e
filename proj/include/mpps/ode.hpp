#pragma once

// Embedded Dormand-Prince 5(4) with step-size control and mandatory break
// times.  The forcing signals in this project are piecewise smooth with jumps
// at known breakpoints (the step signal's interval ends), so the integrator
// never steps across a supplied break time; each segment restarts the FSAL
// first stage, which keeps the classical order on discontinuous right-hand
// sides.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "mpps/errors.hpp"

namespace mpps::ode {

using Rhs = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;
using Observer = std::function<void(double, const Eigen::VectorXd&)>;

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 50'000'000;
    double max_step = std::numeric_limits<double>::infinity();
};

namespace detail {

// Dormand-Prince RK5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (5th minus embedded 4th order weights), for the error estimate.
inline constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct Stepper {
    const Rhs& f;
    Options opt;
    Eigen::VectorXd k1, k2, k3, k4, k5, k6, k7, ytmp, yerr;

    Stepper(const Rhs& f_, const Options& o, Eigen::Index n)
        : f(f_), opt(o) {
        for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp, &yerr}) v->resize(n);
    }

    // One RK attempt from (t, y) with signed step h; fills ynew and returns the
    // scaled error.  k1 must already hold f(t, y).
    double attempt(double t, const Eigen::VectorXd& y, double h, Eigen::VectorXd& ynew) {
        ytmp = y + h * (a21 * k1);
        f(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        f(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + h, ynew, k7); // FSAL stage
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double acc = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double r = yerr[i] / sc;
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(y.size()));
    }
};

} // namespace detail

// Integrate y' = f(t, y) from t0 to t1 (either direction).  `mandatory` lists
// times the integrator must land on exactly (breakpoints of the forcing,
// output grid); the observer is called at t0, at every mandatory time inside
// the span, and at t1, in integration order.
inline Eigen::VectorXd integrate(const Rhs& f, double t0, Eigen::VectorXd y, double t1,
                                 const Options& opt = {},
                                 const std::vector<double>& mandatory = {},
                                 const Observer& observe = {}) {
    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    if (span == 0.0) {
        if (observe) observe(t0, y);
        return y;
    }

    std::vector<double> stops;
    stops.reserve(mandatory.size() + 1);
    for (double m : mandatory)
        if ((m - t0) * dir > 1e-14 * std::max(1.0, span) && (t1 - m) * dir > 1e-14 * std::max(1.0, span))
            stops.push_back(m);
    std::sort(stops.begin(), stops.end());
    if (dir < 0) std::reverse(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    stops.push_back(t1);

    detail::Stepper st(f, opt, y.size());
    if (observe) observe(t0, y);

    long steps = 0;
    double t = t0;
    double h = 0.0; // magnitude, carried across segments
    Eigen::VectorXd ynew(y.size());

    for (double seg_end : stops) {
        double remaining = std::abs(seg_end - t);
        if (remaining <= 1e-14 * std::max(1.0, std::abs(seg_end))) {
            t = seg_end;
            if (observe) observe(t, y);
            continue;
        }
        // rhs may jump at segment boundaries: restart the FSAL stage.
        f(t, y, st.k1);
        if (h == 0.0) {
            // first-step heuristic of Hairer-Norsett-Wanner, simplified
            double d0 = y.cwiseAbs().maxCoeff() + opt.atol;
            double d1 = st.k1.cwiseAbs().maxCoeff() + opt.atol;
            h = std::min({0.01 * d0 / d1, remaining, opt.max_step});
            h = std::max(h, 1e-8 * remaining);
        }
        while (true) {
            remaining = std::abs(seg_end - t);
            if (remaining <= 1e-14 * std::max(1.0, std::abs(seg_end))) break;
            h = std::min({h, remaining, opt.max_step});
            if (++steps > opt.max_steps)
                throw StepFailure("step budget exhausted at t=" + std::to_string(t));
            double err = st.attempt(t, y, dir * h, ynew);
            if (err <= 1.0) {
                t = (h == remaining) ? seg_end : t + dir * h;
                y.swap(ynew);
                st.k1.swap(st.k7); // FSAL: derivative at the new point
                double gain = (err == 0.0) ? 5.0 : 0.9 * std::pow(err, -0.2);
                h *= std::clamp(gain, 0.2, 5.0);
            } else {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h < 1e-14 * std::max(1.0, std::abs(t)))
                    throw StepFailure("step size underflow at t=" + std::to_string(t));
            }
        }
        if (observe) observe(t, y);
    }
    return y;
}

} // namespace mpps::ode
