#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "mpps/recurrence.hpp"
#include "mpps/solutions.hpp"

namespace mpps {

// One periodic forcing term: coefficient * fn(frequency * t).
struct TrigTerm {
    double coefficient = 0.0;
    bool is_sin = true;
    double frequency = 1.0;
};

// One Poisson forcing term: coefficient * Theta(t)^power.
struct ThetaTerm {
    double coefficient = 0.0;
    int power = 1;
};

// One nonlinearity term: coefficient * fn(frequency * t) * arctan(x_arg).
struct ArctanTerm {
    double coefficient = 0.0;
    bool is_sin = true;
    double frequency = 1.0;
    int arg = 1; // 1-based coordinate index
};

struct LogisticConfig {
    double mu = 0.0;
    double seed = 0.4;
    long length = 1'000'000;
    long discard = 1'000;
    double step = 0.0; // length of each constant interval of the step signal
    int window = 10;
    std::vector<double> deltas{0.1, 0.05, 0.02};
};

struct ThetaConfig {
    double decay = 1.0;
    double origin = 0.0;
};

struct SolverConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    int grid_per_period = 200;
    double burn_in = 0.0; // 0: derive from the decay rate
    double iter_tol = 1e-6;
    int max_iter = 40;
};

struct SimulationConfig {
    double t0 = 0.0;
    double t1 = 60.0;
    Eigen::VectorXd initial;
};

struct VerifyConfig {
    double eps = 0.1;
    double a = 0.0, b = 0.0; // b <= a: default window [t0, t0 + 2*omega]
};

struct GronwallConfig {
    bool enabled = false;
    Eigen::VectorXd z0;
    double span = 10.0;
};

struct DeclaredPair {
    bool present = false;
    double K = 1.0;
    double alpha = 0.0;
};

// Parsed configuration document.  `parse_config` validates shape and ranges;
// `make_system` turns it into runnable callables plus the recurrence data.
struct SystemConfig {
    std::string id;
    int dim = 0;
    double omega = 0.0;

    std::vector<std::vector<std::string>> matrix;

    std::vector<std::vector<TrigTerm>> periodic_forcing; // per coordinate
    std::vector<std::vector<ThetaTerm>> poisson_forcing; // per coordinate
    double m_phi = 0.0;
    double m_psi = 0.0;

    bool has_nonlinear = false;
    std::vector<std::vector<ArctanTerm>> nonlinear_terms;
    double L = 0.0;
    double m_g = 0.0;
    double H = std::numeric_limits<double>::infinity();

    bool has_split = false;
    std::vector<std::vector<std::string>> matrix_b, matrix_d;
    double d_sup = 0.0;

    DeclaredPair declared;
    LogisticConfig logistic;
    ThetaConfig theta;
    SolverConfig solver;
    SimulationConfig simulation;
    VerifyConfig verify;
    GronwallConfig gronwall;
};

SystemConfig parse_config(const std::string& json_text);
SystemConfig load_config(const std::string& path);

// A config turned into executable parts.  The theta signal is shared with the
// callables inside `sys`, so copies of this struct remain valid.
struct BuiltSystem {
    QuasilinearSystem sys;
    LogisticOrbit orbit;                // transient already dropped
    PoissonSequence seq;                // times in t units (index * step)
    std::shared_ptr<ThetaSignal> theta;
};

BuiltSystem make_system(const SystemConfig& cfg);

} // namespace mpps
