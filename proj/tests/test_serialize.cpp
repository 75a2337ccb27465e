#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "mpps/serialize.hpp"

using namespace mpps;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case.
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("mpps-test-" + std::to_string(reinterpret_cast<uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

Trajectory sample_trajectory() {
    Trajectory traj;
    traj.t0 = -1.25;
    traj.dt = 0.125;
    traj.system_id = "roundtrip";
    traj.rtol = 1e-10;
    traj.atol = 1e-12;
    for (int i = 0; i < 40; ++i) {
        Eigen::VectorXd v(3);
        v << std::sin(0.3 * i), 1.0 / (i + 1.0), -2.0 + 0.01 * i * i;
        traj.samples.push_back(v);
    }
    return traj;
}

} // namespace

TEST_SUITE("serialize") {

TEST_CASE("full-precision formatting round-trips every double") {
    for (double v : {M_PI, 1.0 / 3.0, -2.75e-300, 6.626e34, 0.0, -0.1,
                     0.9239999999999999}) {
        std::string s = format_full(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("trajectory CSV round-trips bit for bit") {
    TempDir dir;
    Trajectory traj = sample_trajectory();
    write_trajectory_csv(dir.file("t.csv"), traj);
    Trajectory back = read_trajectory_csv(dir.file("t.csv"));
    REQUIRE(back.size() == traj.size());
    CHECK(back.dim() == 3);
    CHECK(back.t0 == traj.t0);
    CHECK(back.dt == doctest::Approx(traj.dt).epsilon(1e-15));
    for (std::size_t i = 0; i < traj.size(); ++i)
        for (int j = 0; j < 3; ++j) CHECK(back.samples[i][j] == traj.samples[i][j]);
}

TEST_CASE("identical trajectories serialize to identical bytes") {
    TempDir dir;
    write_trajectory_csv(dir.file("a.csv"), sample_trajectory());
    write_trajectory_csv(dir.file("b.csv"), sample_trajectory());
    std::ifstream a(dir.file("a.csv")), b(dir.file("b.csv"));
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(sa.rfind("t,x1,x2,x3\n", 0) == 0);
}

TEST_CASE("a non-uniform time column is rejected on read") {
    TempDir dir;
    std::ofstream out(dir.file("skew.csv"));
    out << "t,x1\n0,1\n1,2\n2.5,3\n3,4\n"; // the 2.5 breaks the grid
    out.close();
    CHECK_THROWS_AS(read_trajectory_csv(dir.file("skew.csv")), ConfigError);
}

TEST_CASE("missing or malformed trajectory files fail loudly") {
    TempDir dir;
    CHECK_THROWS_AS(read_trajectory_csv(dir.file("absent.csv")), ConfigError);
    std::ofstream out(dir.file("bad.csv"));
    out << "t,x1\n0,1\n1,not-a-number\n";
    out.close();
    CHECK_THROWS_AS(read_trajectory_csv(dir.file("bad.csv")), ConfigError);
}

TEST_CASE("detected sequences round-trip through CSV") {
    TempDir dir;
    PoissonSequence seq;
    seq.times = {56.548667764616276, 113.09733552923255, 226.1946710584651};
    seq.precisions = {0.1, 0.05, 0.02};
    seq.measured = {5.683682e-02, 1.822847e-02, 9.820645e-03};
    seq.window = 10;
    write_sequence_csv(dir.file("seq.csv"), seq);
    PoissonSequence back = read_sequence_csv(dir.file("seq.csv"));
    REQUIRE(back.times.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.times[i] == seq.times[i]);
        CHECK(back.precisions[i] == seq.precisions[i]);
    }
}

TEST_CASE("decay data round-trips through JSON") {
    FloquetData fd;
    fd.omega = 2.0 * M_PI;
    fd.monodromy = Eigen::MatrixXd(2, 2);
    fd.monodromy << 1.867442732e-03, 0.0, 1e-17, 3.487342402e-06;
    fd.multipliers = Eigen::VectorXcd(2);
    fd.multipliers << std::complex<double>(1.867442732e-03, 0.0),
        std::complex<double>(0.0, 3.487342402e-06);
    fd.K = 1.624;
    fd.alpha = 0.99;
    fd.tol = 1e-10;
    fd.c4_satisfied = true;

    FloquetData back = floquet_from_json(to_json(fd));
    CHECK(back.omega == fd.omega);
    CHECK(back.K == fd.K);
    CHECK(back.alpha == fd.alpha);
    CHECK(back.c4_satisfied == fd.c4_satisfied);
    CHECK((back.monodromy - fd.monodromy).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 2; ++i) CHECK(back.multipliers[i] == fd.multipliers[i]);
}

TEST_CASE("signal and orbit writers emit well-formed CSV") {
    TempDir dir;
    write_signal_csv(dir.file("sig.csv"), {0.0, 0.5, 1.0}, {1.0, 0.25, -0.5});
    std::ifstream in(dir.file("sig.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,value");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 3);

    LogisticOrbit orbit{3.85, 0.4, {0.4, 0.924, 0.2703624}};
    write_orbit_csv(dir.file("orbit.csv"), orbit);
    std::ifstream oin(dir.file("orbit.csv"));
    std::getline(oin, header);
    CHECK(header == "n,eta");
}

} // TEST_SUITE
