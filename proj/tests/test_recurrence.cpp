#include <cmath>
#include <vector>

#include <doctest.h>

#include "mpps/recurrence.hpp"

using namespace mpps;

TEST_SUITE("recurrence") {

TEST_CASE("logistic orbits are deterministic and seed-anchored") {
    LogisticOrbit orbit = iterate_logistic(3.85, 0.4, 5);
    REQUIRE(orbit.values.size() == 6);
    CHECK(orbit.values[0] == 0.4);
    // IEEE double iterates, frozen independently.
    CHECK(orbit.values[1] == 0.9239999999999999);
    CHECK(orbit.values[2] == 0.2703624000000002);
    CHECK(orbit.values[3] == 0.7594763047650244);
    CHECK(orbit.values[4] == 0.7032873819721296);
    CHECK(orbit.values[5] == 0.8033958252740323);
    CHECK(orbit.mu == 3.85);
    CHECK(orbit.seed == 0.4);
}

TEST_CASE("orbits stay inside the unit interval") {
    LogisticOrbit orbit = iterate_logistic(4.0, 0.37, 20000);
    for (double v : orbit.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("parameter validation rejects out-of-range inputs") {
    CHECK_THROWS_AS(iterate_logistic(4.5, 0.4, 10), ConfigError);
    CHECK_THROWS_AS(iterate_logistic(3.9, -0.1, 10), ConfigError);
    CHECK_THROWS_AS(iterate_logistic(3.9, 0.4, 0), ConfigError);
}

TEST_CASE("discard_transient drops exactly the requested prefix") {
    LogisticOrbit orbit = iterate_logistic(3.9, 0.4, 100);
    LogisticOrbit tail = discard_transient(orbit, 40);
    REQUIRE(tail.values.size() == 61);
    CHECK(tail.values[0] == orbit.values[40]);
    CHECK(tail.values.back() == orbit.values.back());
    CHECK(tail.mu == orbit.mu);
    CHECK_THROWS_AS(discard_transient(orbit, 101), ConfigError);
}

// Near-return shifts frozen from an independent reimplementation of the
// detector (same double-precision recurrence, numpy).  The discards place
// index 0 where the bundled systems put t = 0.
TEST_CASE("detected return shifts match the frozen oracle") {
    struct Oracle {
        double mu;
        std::size_t discard;
        std::vector<double> zeta;
        std::vector<double> measured;
    };
    const std::vector<Oracle> oracles = {
        {3.85, 1003, {3, 6, 12}, {5.683682e-02, 1.822847e-02, 9.820645e-03}},
        {3.90, 1028, {123, 209, 981}, {8.032894e-02, 3.812555e-02, 4.128374e-04}},
        {3.86, 1010, {1712, 2354, 10195}, {1.408689e-02, 2.187199e-02, 1.711866e-02}},
    };
    for (const Oracle& oc : oracles) {
        CAPTURE(oc.mu);
        LogisticOrbit orbit =
            discard_transient(iterate_logistic(oc.mu, 0.4, 1'000'000), oc.discard);
        PoissonSequence seq = detect_poisson_sequence(orbit, 10, {0.1, 0.05, 0.02});
        REQUIRE(seq.times.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(seq.times[i] == oc.zeta[i]);
            CHECK(seq.measured[i] ==
                  doctest::Approx(oc.measured[i]).epsilon(1e-5));
        }
        // Certified levels are the thresholds, strictly decreasing, and every
        // measured deviation sits strictly below its level.
        CHECK(seq.precisions == std::vector<double>{0.1, 0.05, 0.02});
        for (int i = 0; i < 3; ++i) CHECK(seq.measured[i] < seq.precisions[i]);
    }
}

TEST_CASE("detection validates its inputs") {
    LogisticOrbit orbit = discard_transient(iterate_logistic(3.9, 0.4, 5000), 1000);
    CHECK_THROWS_AS(detect_poisson_sequence(orbit, 1, {0.1}), ConfigError);
    CHECK_THROWS_AS(detect_poisson_sequence(orbit, 10, {}), ConfigError);
    CHECK_THROWS_AS(detect_poisson_sequence(orbit, 10, {0.1, 0.1}), ConfigError);
    CHECK_THROWS_AS(detect_poisson_sequence(orbit, 10, {0.1, -0.05}), ConfigError);
    LogisticOrbit tiny = iterate_logistic(3.9, 0.4, 50);
    CHECK_THROWS_AS(detect_poisson_sequence(tiny, 10, {0.1}), ConfigError);
}

TEST_CASE("an unreachable precision reports which level failed") {
    LogisticOrbit orbit = discard_transient(iterate_logistic(3.9, 0.4, 2000), 1000);
    try {
        detect_poisson_sequence(orbit, 10, {0.1, 1e-12});
        FAIL("expected NotFound");
    } catch (const NotFound& e) {
        CHECK(e.delta == 1e-12);
    }
}

TEST_CASE("scale_times multiplies shifts by the interval length") {
    PoissonSequence seq;
    seq.times = {3, 6, 12};
    seq.precisions = {0.1, 0.05, 0.02};
    seq.measured = {0.05, 0.01, 0.005};
    PoissonSequence scaled = scale_times(seq, 2.5);
    CHECK(scaled.times == std::vector<double>{7.5, 15.0, 30.0});
    CHECK(scaled.precisions == seq.precisions);
    CHECK_THROWS_AS(scale_times(seq, 0.0), ConfigError);
}

TEST_CASE("step signals evaluate piecewise and expose their jump lattice") {
    LogisticOrbit orbit{3.9, 0.4, {0.1, 0.2, 0.3, 0.4}};
    StepSignal sig = build_step_signal(orbit, 2.0, -2.0);
    CHECK(sig.t_begin() == -2.0);
    CHECK(sig.t_end() == 6.0);
    CHECK(sig.eval(-2.0) == 0.1);
    CHECK(sig.eval(-0.5) == 0.1);
    CHECK(sig.eval(0.0) == 0.2);
    CHECK(sig.eval(3.9) == 0.3);
    CHECK(sig.eval(4.0) == 0.4);
    CHECK_THROWS_AS(sig.eval(-2.1), OutOfRange);
    CHECK_THROWS_AS(sig.eval(6.0), OutOfRange);

    std::vector<double> br = sig.breakpoints(-1.0, 4.5);
    CHECK(br == std::vector<double>{0.0, 2.0, 4.0});
}

TEST_CASE("constant forcing relaxes to value over decay") {
    // With eta identically m the relaxation signal is m/k for every t: the
    // initial state already sits at the fixed point.
    LogisticOrbit orbit{0.0, 0.5, std::vector<double>(40, 0.6)};
    StepSignal sig = build_step_signal(orbit, 1.0, 0.0);
    ThetaSignal theta = build_theta(sig, 2.0);
    for (double t : {0.0, 0.5, 7.25, 19.9, 39.0})
        CHECK(theta.eval(t) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("theta satisfies its defining equation between jumps") {
    LogisticOrbit orbit = discard_transient(iterate_logistic(3.85, 0.4, 1100), 1000);
    StepSignal sig = build_step_signal(orbit, 1.5, 0.0);
    ThetaSignal theta = build_theta(sig, 3.0);

    // derivative() is a separate closed form; compare it against the ODE
    // residual Theta' = -k Theta + Omega at off-lattice points.
    for (double t : {0.4, 5.21, 33.33, 77.7, 120.99}) {
        double lhs = theta.derivative(t);
        double rhs = -3.0 * theta.eval(t) + sig.eval(t);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
    // And against a centered difference of eval() itself.
    for (double t : {2.3, 48.6, 101.25}) {
        double h = 1e-6;
        double fd = (theta.eval(t + h) - theta.eval(t - h)) / (2.0 * h);
        CHECK(theta.derivative(t) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("theta is continuous across interval boundaries") {
    LogisticOrbit orbit = discard_transient(iterate_logistic(3.9, 0.4, 1050), 1000);
    StepSignal sig = build_step_signal(orbit, 2.0, -4.0);
    ThetaSignal theta = build_theta(sig, 2.0);
    for (double edge : {-2.0, 0.0, 2.0, 40.0, 80.0}) {
        double before = theta.eval(edge - 1e-10);
        double after = theta.eval(edge);
        CHECK(before == doctest::Approx(after).epsilon(1e-8));
    }
}

TEST_CASE("theta stays below sup(forcing)/decay") {
    LogisticOrbit orbit = discard_transient(iterate_logistic(3.9, 0.4, 50'000), 1000);
    StepSignal sig = build_step_signal(orbit, 2.0, 0.0);
    ThetaSignal theta = build_theta(sig, 2.0);
    double sup = 0.0;
    for (int j = 0; j <= 100'000; ++j) {
        double t = theta.t_begin() + (theta.t_end() - theta.t_begin() - 1e-9) * j / 100'000.0;
        sup = std::max(sup, std::abs(theta.eval(t)));
    }
    CHECK(sup <= 0.5 + 1e-12);
}

TEST_CASE("theta recurrence verification accepts a certified sequence") {
    LogisticOrbit orbit =
        discard_transient(iterate_logistic(3.85, 0.4, 1'000'000), 1003);
    PoissonSequence seq =
        scale_times(detect_poisson_sequence(orbit, 10, {0.1, 0.05, 0.02}), 1.5);
    StepSignal sig = build_step_signal(orbit, 1.5, 0.0);
    ThetaSignal theta = build_theta(sig, 3.0);
    // Interval a few relaxation times past the signal start, inside the
    // certified window [0, 15).
    ThetaPoissonReport rep = verify_theta_poisson(theta, seq, 4.5, 10.5, 0.05);
    CHECK(rep.pass);
    REQUIRE(rep.sups.size() == 3);
    // The deviation along the certified shifts is bounded by delta/k.
    for (std::size_t i = 0; i < 3; ++i) CHECK(rep.sups[i] < seq.precisions[i]);
}

} // TEST_SUITE
