#include <cmath>
#include <vector>

#include <doctest.h>

#include "mpps/ode.hpp"

using namespace mpps;
using Eigen::VectorXd;

namespace {

VectorXd scalar(double v) {
    VectorXd y(1);
    y[0] = v;
    return y;
}

} // namespace

TEST_SUITE("ode") {

TEST_CASE("exponential decay matches the closed form") {
    ode::Rhs f = [](double, const VectorXd& y, VectorXd& dy) { dy = -y; };
    VectorXd y = ode::integrate(f, 0.0, scalar(1.0), 5.0);
    CHECK(y[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-9));
}

TEST_CASE("harmonic oscillator returns to the start after one period") {
    ode::Rhs f = [](double, const VectorXd& y, VectorXd& dy) {
        dy.resize(2);
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    VectorXd y0(2);
    y0 << 1.0, 0.0;
    VectorXd y = ode::integrate(f, 0.0, y0, 2.0 * M_PI);
    CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(y[1]) < 1e-8);

    // Quarter period lands on (0, -1): checks phase, not just the period.
    VectorXd q = ode::integrate(f, 0.0, y0, M_PI / 2.0);
    CHECK(std::abs(q[0]) < 1e-9);
    CHECK(q[1] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("backward integration inverts forward integration") {
    ode::Rhs f = [](double t, const VectorXd& y, VectorXd& dy) { dy[0] = std::cos(t) * y[0]; };
    VectorXd fwd = ode::integrate(f, 0.0, scalar(0.7), 3.0);
    VectorXd back = ode::integrate(f, 3.0, fwd, 0.0);
    CHECK(back[0] == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("mandatory break times keep order on a jumping right-hand side") {
    // y' = a(t) y with a = 1 on [0,1), a = -2 on [1,2]; the exact solution is
    // e^{1} * e^{-2(t-1)} past the jump.
    ode::Rhs f = [](double t, const VectorXd& y, VectorXd& dy) {
        dy[0] = (t < 1.0 ? 1.0 : -2.0) * y[0];
    };
    VectorXd with_break = ode::integrate(f, 0.0, scalar(1.0), 2.0, {}, {1.0});
    double exact = std::exp(1.0) * std::exp(-2.0);
    CHECK(with_break[0] == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("observer fires at the start, at interior stops, and at the end") {
    ode::Rhs f = [](double, const VectorXd& y, VectorXd& dy) { dy = -y; };
    std::vector<double> seen;
    ode::Observer obs = [&](double t, const VectorXd&) { seen.push_back(t); };
    ode::integrate(f, 0.0, scalar(1.0), 2.0, {}, {0.5, 1.5, 1.0}, obs);
    REQUIRE(seen.size() == 5);
    CHECK(seen[0] == 0.0);
    CHECK(seen[1] == doctest::Approx(0.5));
    CHECK(seen[2] == doctest::Approx(1.0));
    CHECK(seen[3] == doctest::Approx(1.5));
    CHECK(seen[4] == doctest::Approx(2.0));

    // Stops outside the span are ignored rather than visited.
    seen.clear();
    ode::integrate(f, 0.0, scalar(1.0), 1.0, {}, {-0.5, 3.0}, obs);
    REQUIRE(seen.size() == 2);
    CHECK(seen.front() == 0.0);
    CHECK(seen.back() == doctest::Approx(1.0));
}

TEST_CASE("observer values match the state at the reported time") {
    ode::Rhs f = [](double, const VectorXd& y, VectorXd& dy) { dy = -y; };
    double at_half = 0.0;
    ode::Observer obs = [&](double t, const VectorXd& y) {
        if (std::abs(t - 0.5) < 1e-12) at_half = y[0];
    };
    ode::integrate(f, 0.0, scalar(1.0), 1.0, {}, {0.5}, obs);
    CHECK(at_half == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
}

TEST_CASE("zero-length span returns the initial state unchanged") {
    ode::Rhs f = [](double, const VectorXd& y, VectorXd& dy) { dy = y; };
    int calls = 0;
    ode::Observer obs = [&](double, const VectorXd&) { ++calls; };
    VectorXd y = ode::integrate(f, 1.5, scalar(0.25), 1.5, {}, {}, obs);
    CHECK(y[0] == 0.25);
    CHECK(calls == 1);
}

TEST_CASE("an exhausted step budget raises StepFailure") {
    ode::Rhs f = [](double t, const VectorXd& y, VectorXd& dy) {
        dy[0] = std::cos(10.0 * t) * y[0];
    };
    ode::Options opt;
    opt.max_steps = 3;
    CHECK_THROWS_AS(ode::integrate(f, 0.0, scalar(1.0), 100.0, opt), StepFailure);
}

TEST_CASE("tolerance steers the actual error") {
    ode::Rhs f = [](double, const VectorXd& y, VectorXd& dy) { dy = -y; };
    ode::Options loose, tight;
    loose.rtol = 1e-4;
    loose.atol = 1e-6;
    tight.rtol = 1e-12;
    tight.atol = 1e-14;
    double exact = std::exp(-10.0);
    double e_loose = std::abs(ode::integrate(f, 0.0, scalar(1.0), 10.0, loose)[0] - exact);
    double e_tight = std::abs(ode::integrate(f, 0.0, scalar(1.0), 10.0, tight)[0] - exact);
    CHECK(e_tight < e_loose);
    CHECK(e_tight < 1e-12);
}

} // TEST_SUITE
