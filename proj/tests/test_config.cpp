#include <cmath>
#include <memory>
#include <string>

#include <doctest.h>

#include "mpps/config.hpp"
#include "mpps/errors.hpp"
#include "mpps/recurrence.hpp"

using namespace mpps;

namespace {

std::string config_path(const char* name) {
    return std::string(MPPS_CONFIG_DIR) + "/" + name;
}

// Shorthand: parse and expect a ConfigError whose message mentions `needle`.
void expect_bad(const std::string& text, const std::string& needle) {
    try {
        parse_config(text);
        FAIL("expected ConfigError for: ", needle);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("bundled configurations load with the documented parameters") {
    SystemConfig one = load_config(config_path("example1.json"));
    CHECK(one.id == "example1");
    CHECK(one.dim == 2);
    CHECK(one.omega == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
    CHECK(one.matrix.size() == 2);
    CHECK(one.matrix[0].size() == 2);
    CHECK(one.logistic.mu == 3.85);
    CHECK(one.logistic.step == 18.84955592153876);
    CHECK(one.logistic.deltas == std::vector<double>{0.1, 0.05, 0.02});
    CHECK(one.theta.decay == 3.0);
    CHECK(one.m_phi == 2.5);
    CHECK(one.m_psi == 0.62);
    CHECK_FALSE(one.declared.present);
    CHECK_FALSE(one.has_nonlinear);
    CHECK(one.simulation.t1 == 60.0);
    CHECK(one.simulation.initial.size() == 2);

    SystemConfig three = load_config(config_path("example3.json"));
    CHECK(three.dim == 3);
    CHECK(three.declared.present);
    CHECK(three.declared.K == 1.0);
    CHECK(three.declared.alpha == doctest::Approx(M_PI / 2.0).epsilon(1e-15));
    CHECK(three.has_nonlinear);
    CHECK(three.L == 0.03);
    CHECK(three.m_g == 0.048);
    CHECK(three.H == 4.8);
    CHECK(three.gronwall.enabled);
    CHECK(three.gronwall.z0.size() == 3);
    CHECK(three.gronwall.z0[1] == 0.8);
    CHECK(three.verify.a == 10.0);
    CHECK(three.verify.b == doctest::Approx(10.0 + 2.0 * M_PI).epsilon(1e-15));
    CHECK(three.solver.burn_in == 90.0);
}

TEST_CASE("missing or malformed fields raise errors naming the field") {
    expect_bad("{ \"matrix\": [[\"-1\"]] }", "omega");
    expect_bad("not json at all", "not valid JSON");
    expect_bad("[1, 2]", "root must be an object");

    // A broken matrix entry is stored verbatim at parse time and reports its
    // row/column position when the system is built.
    SystemConfig broken = parse_config(
        R"({"omega": 1, "matrix": [["-1 +"]],
            "forcing": {}, "simulation": {"t1": 1, "initial": [0]}})");
    CHECK_THROWS_WITH_AS(make_system(broken), doctest::Contains("matrix[0][0]"), ConfigError);

    expect_bad(R"({"omega": 1, "matrix": [["-1"]], "forcing": {},
                  "simulation": {"t1": -2, "initial": [0]}})",
               "must exceed simulation.t0");

    expect_bad(R"({"omega": 1, "matrix": [["-1"]], "forcing": {},
                  "dichotomy": {"K": 0.5, "alpha": 1},
                  "simulation": {"t1": 1, "initial": [0]}})",
               "dichotomy.K");

    expect_bad(R"({"omega": 1, "matrix": [["-1"]], "forcing": {},
                  "verify": {"interval": [1]},
                  "simulation": {"t1": 1, "initial": [0]}})",
               "expected [a, b]");
}

TEST_CASE("recurrence parameters are validated when poisson forcing is present") {
    auto with_logistic = [](const std::string& logistic, const std::string& theta) {
        return R"({"omega": 1, "matrix": [["-1"]],
                   "forcing": {"poisson": [[{"coefficient": 1}]]},
                   "logistic": )" +
               logistic + R"(, "theta": )" + theta +
               R"(, "simulation": {"t1": 1, "initial": [0]}})";
    };
    expect_bad(with_logistic(R"({"mu": 4.5, "step": 2})", R"({"decay": 1})"),
               "logistic.mu");
    expect_bad(with_logistic(R"({"mu": 3.9, "step": -1})", R"({"decay": 1})"),
               "logistic.step");
    expect_bad(with_logistic(R"({"mu": 3.9, "step": 2, "deltas": [0.1, 0.1]})",
                             R"({"decay": 1})"),
               "strictly decreasing");

    // Origin validation happens when the system is built, not at parse time.
    SystemConfig pos = parse_config(
        with_logistic(R"({"mu": 3.9, "step": 2, "length": 10000})", R"({"decay": 1, "origin": 1})"));
    CHECK_THROWS_WITH_AS(make_system(pos), doctest::Contains("must be <= 0"), ConfigError);
    SystemConfig frac = parse_config(with_logistic(R"({"mu": 3.9, "step": 2, "length": 10000})",
                                                   R"({"decay": 1, "origin": -1})"));
    CHECK_THROWS_WITH_AS(make_system(frac), doctest::Contains("integer multiple"), ConfigError);

    CHECK_THROWS_WITH_AS(load_config(config_path("does-not-exist.json")),
                         doctest::Contains("cannot open config file"), ConfigError);
}

TEST_CASE("building a plain linear system leaves the recurrence parts empty") {
    SystemConfig cfg = parse_config(
        R"({"omega": 6.283185307179586, "matrix": [["-1"]], "forcing": {},
            "simulation": {"t1": 10, "initial": [0.5]}})");
    BuiltSystem built = make_system(cfg);
    CHECK(built.sys.dim == 1);
    CHECK(built.sys.linear());
    CHECK_FALSE(built.sys.forcing.phi);
    CHECK_FALSE(built.sys.forcing.psi);
    CHECK(built.theta == nullptr);
    CHECK(built.seq.times.empty());

    Eigen::MatrixXd A(1, 1);
    built.sys.A.eval(0.0, A);
    CHECK(A(0, 0) == -1.0);
}

TEST_CASE("building the first bundled system wires orbit, sequence, and signal") {
    BuiltSystem built = make_system(load_config(config_path("example1.json")));
    const double q = 18.84955592153876;

    // The detection orbit is the logistic orbit with the configured discard
    // plus the pre-origin intervals dropped, so index 0 sits at t = 0.
    LogisticOrbit expect =
        discard_transient(iterate_logistic(3.85, 0.4, 1'000'000), 1003);
    REQUIRE(built.orbit.values.size() == expect.values.size());
    CHECK(built.orbit.values[0] == expect.values[0]);
    CHECK(built.orbit.values[777] == expect.values[777]);
    CHECK(built.orbit.values.back() == expect.values.back());

    REQUIRE(built.seq.times.size() == 3);
    CHECK(built.seq.times[0] == doctest::Approx(3 * q).epsilon(1e-14));
    CHECK(built.seq.times[1] == doctest::Approx(6 * q).epsilon(1e-14));
    CHECK(built.seq.times[2] == doctest::Approx(12 * q).epsilon(1e-14));

    REQUIRE(built.theta != nullptr);
    CHECK(built.theta->decay == 3.0);
    CHECK(built.theta->t_begin() == doctest::Approx(-3 * q).epsilon(1e-14));

    // Forcing callables share that signal and know the break structure.
    CHECK(built.sys.forcing.has_breaks);
    CHECK(built.sys.forcing.break_q == q);
    CHECK(built.sys.forcing.break_origin == doctest::Approx(-3 * q).epsilon(1e-14));
    REQUIRE(built.sys.forcing.phi);
    REQUIRE(built.sys.forcing.psi);
    Eigen::VectorXd v(2);
    built.sys.forcing.phi(0.0, v);
    CHECK(v[0] == 2.5);  // 2.5 cos(0)
    CHECK(v[1] == 0.0);  // 2 sin(0)
    built.sys.forcing.psi(0.0, v);
    double th = built.theta->eval(0.0);
    CHECK(v[0] == doctest::Approx(5.5 * th * th).epsilon(1e-14));
    CHECK(v[1] == doctest::Approx(1.7 * th).epsilon(1e-14));

    Eigen::MatrixXd A(2, 2);
    built.sys.A.eval(0.0, A);
    CHECK(A(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(A(1, 1) == doctest::Approx(-1.75).epsilon(1e-15));
    CHECK(A(0, 1) == 0.0);
}

} // TEST_SUITE
