#include "mpps/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpps {

LogisticOrbit iterate_logistic(double mu, double seed, std::size_t n) {
    if (!(mu >= 0.0 && mu <= 4.0))
        throw ConfigError("logistic mu must lie in [0,4], got " + std::to_string(mu));
    if (!(seed >= 0.0 && seed <= 1.0))
        throw ConfigError("logistic seed must lie in [0,1], got " + std::to_string(seed));
    if (n < 1) throw ConfigError("orbit length must be at least 1");

    LogisticOrbit orbit{mu, seed, {}};
    orbit.values.resize(n + 1);
    double v = seed;
    orbit.values[0] = v;
    for (std::size_t i = 0; i < n; ++i) {
        v = mu * v * (1.0 - v);
        orbit.values[i + 1] = v;
    }
    return orbit;
}

LogisticOrbit discard_transient(const LogisticOrbit& orbit, std::size_t discard) {
    if (discard >= orbit.values.size())
        throw ConfigError("transient discard exceeds orbit length");
    LogisticOrbit out{orbit.mu, orbit.seed, {}};
    out.values.assign(orbit.values.begin() + static_cast<std::ptrdiff_t>(discard),
                      orbit.values.end());
    return out;
}

PoissonSequence detect_poisson_sequence(const LogisticOrbit& orbit, int window,
                                        const std::vector<double>& deltas) {
    if (window < 2) throw ConfigError("detection window must be at least 2");
    if (orbit.values.size() < static_cast<std::size_t>(10 * window))
        throw ConfigError("orbit shorter than 10x the detection window");
    if (deltas.empty()) throw ConfigError("no precision levels given");
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
        if (!(deltas[i] > deltas[i + 1]))
            throw ConfigError("precision levels must be strictly decreasing");
    if (deltas.back() <= 0.0) throw ConfigError("precision levels must be positive");

    const auto& v = orbit.values;
    const long n = static_cast<long>(v.size());
    PoissonSequence seq;
    seq.window = window;

    long prev = 0;
    for (double delta : deltas) {
        bool found = false;
        for (long z = prev + 1; z + window <= n; ++z) {
            double worst = 0.0;
            for (int i = 0; i < window; ++i) {
                worst = std::max(worst, std::abs(v[i + z] - v[i]));
                if (worst >= delta) break;
            }
            if (worst < delta) {
                seq.times.push_back(static_cast<double>(z));
                seq.precisions.push_back(delta);
                seq.measured.push_back(worst);
                prev = z;
                found = true;
                break;
            }
        }
        if (!found) throw NotFound(delta);
    }
    return seq;
}

PoissonSequence scale_times(const PoissonSequence& seq, double q) {
    if (!(q > 0.0)) throw ConfigError("time scale must be positive");
    PoissonSequence out = seq;
    for (double& t : out.times) t *= q;
    return out;
}

std::size_t StepSignal::interval_index(double t) const {
    if (t < origin || t >= t_end()) throw OutOfRange(t, "[" + std::to_string(origin) + ", " +
                                                            std::to_string(t_end()) + ")");
    auto i = static_cast<std::size_t>(std::floor((t - origin) / q));
    return std::min(i, values.size() - 1); // guard the r==q rounding edge
}

double StepSignal::eval(double t) const { return values[interval_index(t)]; }

std::vector<double> StepSignal::breakpoints(double a, double b) const {
    std::vector<double> pts;
    if (b < a) return pts;
    long lo = static_cast<long>(std::ceil((a - origin) / q));
    long hi = static_cast<long>(std::floor((b - origin) / q));
    for (long i = lo; i <= hi; ++i) {
        double t = origin + static_cast<double>(i) * q;
        if (t >= a && t <= b) pts.push_back(t);
    }
    return pts;
}

StepSignal build_step_signal(const LogisticOrbit& orbit, double q, double origin) {
    if (!(q > 0.0)) throw ConfigError("step interval length must be positive");
    return StepSignal{orbit.mu, q, origin, orbit.values};
}

ThetaSignal build_theta(const StepSignal& forcing, double k) {
    if (!(k > 0.0)) throw ConfigError("decay rate must be positive");
    ThetaSignal theta{k, forcing, {}};
    const auto& eta = forcing.values;
    theta.left_states.resize(eta.size());
    // Truncated history: start at the equilibrium of the first interval's
    // forcing value, then advance exactly one interval at a time.
    const double decay_per_interval = std::exp(-k * forcing.q);
    theta.left_states[0] = eta[0] / k;
    for (std::size_t i = 0; i + 1 < eta.size(); ++i)
        theta.left_states[i + 1] =
            theta.left_states[i] * decay_per_interval + (eta[i] / k) * (1.0 - decay_per_interval);
    return theta;
}

double ThetaSignal::eval(double t) const {
    std::size_t i = forcing.interval_index(t);
    double d = t - (forcing.origin + static_cast<double>(i) * forcing.q);
    double e = std::exp(-decay * d);
    return left_states[i] * e + (forcing.values[i] / decay) * (1.0 - e);
}

double ThetaSignal::derivative(double t) const {
    std::size_t i = forcing.interval_index(t);
    double d = t - (forcing.origin + static_cast<double>(i) * forcing.q);
    return std::exp(-decay * d) * (forcing.values[i] - decay * left_states[i]);
}

ThetaPoissonReport verify_theta_poisson(const ThetaSignal& theta, const PoissonSequence& shifts,
                                        double a, double b, double eps,
                                        int samples_per_interval) {
    if (!(b > a)) throw ConfigError("empty verification interval");
    if (samples_per_interval < 2) throw ConfigError("need at least 2 samples per interval");

    ThetaPoissonReport rep;
    rep.eps = eps;
    rep.a = a;
    rep.b = b;
    rep.shifts = shifts.times;

    const double step = std::min(theta.forcing.q, b - a) / samples_per_interval;
    for (double s : shifts.times) {
        // Sample densely and at every forcing breakpoint, both unshifted and
        // as seen through the shift (robust for non-multiple-of-q shifts).
        std::vector<double> grid;
        for (double t = a; t < b; t += step) grid.push_back(t);
        grid.push_back(b);
        for (double t : theta.forcing.breakpoints(a, b)) grid.push_back(t);
        for (double t : theta.forcing.breakpoints(a + s, b + s)) grid.push_back(t - s);

        double sup = 0.0;
        for (double t : grid) {
            if (t < a || t > b) continue;
            sup = std::max(sup, std::abs(theta.eval(t + s) - theta.eval(t)));
        }
        rep.sups.push_back(sup);
    }

    rep.tail_start = static_cast<int>(rep.sups.size() / 3);
    rep.pass = !rep.sups.empty();
    for (std::size_t i = static_cast<std::size_t>(rep.tail_start); i < rep.sups.size(); ++i)
        if (!(rep.sups[i] < eps)) rep.pass = false;
    return rep;
}

} // namespace mpps
