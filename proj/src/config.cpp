#include "mpps/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mpps/expression.hpp"

namespace mpps {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ConfigError("config field \"" + path + "\": " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) bad(path + "." + key, "missing");
    return *it;
}

double num(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

double num_at(const json& j, const char* key, const std::string& path) {
    return num(require(j, key, path), path + "." + key);
}

double num_or(const json& j, const char* key, const std::string& path, double fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : num(*it, path + "." + key);
}

long int_or(const json& j, const char* key, const std::string& path, long fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number_integer()) bad(path + "." + key, "expected an integer");
    return it->get<long>();
}

bool parse_fn(const json& j, const std::string& path) {
    std::string fn = require(j, "fn", path).get<std::string>();
    if (fn == "sin") return true;
    if (fn == "cos") return false;
    bad(path + ".fn", "expected \"sin\" or \"cos\", got \"" + fn + "\"");
}

std::vector<std::vector<std::string>> parse_matrix(const json& j, int dim,
                                                   const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        bad(path, "expected " + std::to_string(dim) + " rows");
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < dim; ++i) {
        const json& r = j[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<int>(r.size()) != dim)
            bad(path + "[" + std::to_string(i) + "]",
                "expected " + std::to_string(dim) + " entries");
        std::vector<std::string> row;
        for (int k = 0; k < dim; ++k) {
            const json& e = r[static_cast<std::size_t>(k)];
            if (!e.is_string())
                bad(path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]",
                    "expected an expression string");
            row.push_back(e.get<std::string>());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::VectorXd parse_vector(const json& j, int dim, const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        bad(path, "expected " + std::to_string(dim) + " numbers");
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = num(j[static_cast<std::size_t>(i)], path);
    return v;
}

// Compile a string matrix into a periodic matrix callable.
PeriodicMatrixFn compile_matrix(const std::vector<std::vector<std::string>>& rows, int dim,
                                double omega, const std::string& path) {
    auto entries = std::make_shared<std::vector<expr::Expression>>();
    entries->reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            try {
                entries->push_back(expr::Expression::parse(rows[static_cast<std::size_t>(i)]
                                                               [static_cast<std::size_t>(k)]));
            } catch (const ConfigError& e) {
                bad(path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]", e.what());
            }
        }
    bool diag = true;
    for (int i = 0; i < dim && diag; ++i)
        for (int k = 0; k < dim && diag; ++k)
            if (i != k)
                diag = (*entries)[static_cast<std::size_t>(i * dim + k)](0.37) == 0.0 &&
                       (*entries)[static_cast<std::size_t>(i * dim + k)](1.91) == 0.0;
    PeriodicMatrixFn fn;
    fn.dim = dim;
    fn.omega = omega;
    fn.diagonal = diag;
    fn.eval = [entries, dim](double t, Eigen::MatrixXd& M) {
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < dim; ++k)
                M(i, k) = (*entries)[static_cast<std::size_t>(i * dim + k)](t);
    };
    return fn;
}

} // namespace

SystemConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");

    SystemConfig cfg;
    try {
        cfg.id = doc.value("id", std::string("system"));
        cfg.omega = num_at(doc, "omega", "");
        if (!(cfg.omega > 0.0)) bad("omega", "must be positive");

        const json& m = require(doc, "matrix", "");
        if (!m.is_array() || m.empty()) bad("matrix", "expected a non-empty array of rows");
        cfg.dim = static_cast<int>(m.size());
        cfg.matrix = parse_matrix(m, cfg.dim, "matrix");

        // ------------------------------------------------------- forcing --
        const json& f = require(doc, "forcing", "");
        cfg.m_phi = num_or(f, "m_phi", "forcing", 0.0);
        cfg.m_psi = num_or(f, "m_psi", "forcing", 0.0);
        cfg.periodic_forcing.assign(static_cast<std::size_t>(cfg.dim), {});
        cfg.poisson_forcing.assign(static_cast<std::size_t>(cfg.dim), {});
        if (auto it = f.find("periodic"); it != f.end()) {
            if (!it->is_array() || static_cast<int>(it->size()) != cfg.dim)
                bad("forcing.periodic", "expected one term list per coordinate");
            for (int i = 0; i < cfg.dim; ++i) {
                std::string p = "forcing.periodic[" + std::to_string(i) + "]";
                for (const json& term : (*it)[static_cast<std::size_t>(i)]) {
                    TrigTerm tt;
                    tt.coefficient = num_at(term, "coefficient", p);
                    tt.is_sin = parse_fn(term, p);
                    tt.frequency = num_at(term, "frequency", p);
                    cfg.periodic_forcing[static_cast<std::size_t>(i)].push_back(tt);
                }
            }
        }
        if (auto it = f.find("poisson"); it != f.end()) {
            if (!it->is_array() || static_cast<int>(it->size()) != cfg.dim)
                bad("forcing.poisson", "expected one term list per coordinate");
            for (int i = 0; i < cfg.dim; ++i) {
                std::string p = "forcing.poisson[" + std::to_string(i) + "]";
                for (const json& term : (*it)[static_cast<std::size_t>(i)]) {
                    ThetaTerm tt;
                    tt.coefficient = num_at(term, "coefficient", p);
                    tt.power = static_cast<int>(int_or(term, "power", p, 1));
                    if (tt.power < 1) bad(p + ".power", "must be >= 1");
                    cfg.poisson_forcing[static_cast<std::size_t>(i)].push_back(tt);
                }
            }
        }

        // ---------------------------------------------------- recurrence --
        bool any_poisson = false;
        for (const auto& row : cfg.poisson_forcing) any_poisson |= !row.empty();
        if (any_poisson) {
            const json& lg = require(doc, "logistic", "");
            cfg.logistic.mu = num_at(lg, "mu", "logistic");
            if (!(cfg.logistic.mu > 0.0 && cfg.logistic.mu <= 4.0))
                bad("logistic.mu", "must lie in (0, 4]");
            cfg.logistic.seed = num_or(lg, "seed", "logistic", 0.4);
            if (!(cfg.logistic.seed > 0.0 && cfg.logistic.seed < 1.0))
                bad("logistic.seed", "must lie in (0, 1)");
            cfg.logistic.length = int_or(lg, "length", "logistic", 1'000'000);
            cfg.logistic.discard = int_or(lg, "discard", "logistic", 1'000);
            cfg.logistic.step = num_at(lg, "step", "logistic");
            if (!(cfg.logistic.step > 0.0)) bad("logistic.step", "must be positive");
            cfg.logistic.window = static_cast<int>(int_or(lg, "window", "logistic", 10));
            if (auto dit = lg.find("deltas"); dit != lg.end()) {
                cfg.logistic.deltas.clear();
                for (const json& d : *dit) cfg.logistic.deltas.push_back(num(d, "logistic.deltas"));
            }
            const json& th = require(doc, "theta", "");
            cfg.theta.decay = num_at(th, "decay", "theta");
            if (!(cfg.theta.decay > 0.0)) bad("theta.decay", "must be positive");
            cfg.theta.origin = num_or(th, "origin", "theta", 0.0);
        }

        // --------------------------------------------------- nonlinearity --
        if (auto it = doc.find("nonlinear"); it != doc.end()) {
            cfg.has_nonlinear = true;
            cfg.L = num_at(*it, "L", "nonlinear");
            cfg.m_g = num_at(*it, "m_g", "nonlinear");
            cfg.H = num_at(*it, "H", "nonlinear");
            if (!(cfg.H > 0.0)) bad("nonlinear.H", "must be positive");
            const json& terms = require(*it, "terms", "nonlinear");
            if (!terms.is_array() || static_cast<int>(terms.size()) != cfg.dim)
                bad("nonlinear.terms", "expected one term list per coordinate");
            cfg.nonlinear_terms.assign(static_cast<std::size_t>(cfg.dim), {});
            for (int i = 0; i < cfg.dim; ++i) {
                std::string p = "nonlinear.terms[" + std::to_string(i) + "]";
                for (const json& term : terms[static_cast<std::size_t>(i)]) {
                    ArctanTerm at;
                    at.coefficient = num_at(term, "coefficient", p);
                    at.is_sin = parse_fn(term, p);
                    at.frequency = num_at(term, "frequency", p);
                    at.arg = static_cast<int>(int_or(term, "arg", p, 0));
                    if (at.arg < 1 || at.arg > cfg.dim)
                        bad(p + ".arg", "coordinate index out of range (1-based)");
                    cfg.nonlinear_terms[static_cast<std::size_t>(i)].push_back(at);
                }
            }
        }

        // ----------------------------------------------------------- split --
        if (auto it = doc.find("split"); it != doc.end()) {
            cfg.has_split = true;
            cfg.matrix_b = parse_matrix(require(*it, "b", "split"), cfg.dim, "split.b");
            cfg.matrix_d = parse_matrix(require(*it, "d", "split"), cfg.dim, "split.d");
            cfg.d_sup = num_or(*it, "d_sup", "split", 0.0);
        }

        if (auto it = doc.find("dichotomy"); it != doc.end()) {
            cfg.declared.present = true;
            cfg.declared.K = num_at(*it, "K", "dichotomy");
            cfg.declared.alpha = num_at(*it, "alpha", "dichotomy");
            if (!(cfg.declared.K >= 1.0)) bad("dichotomy.K", "must be >= 1");
            if (!(cfg.declared.alpha > 0.0)) bad("dichotomy.alpha", "must be positive");
        }

        // ---------------------------------------------------------- solver --
        if (auto it = doc.find("solver"); it != doc.end()) {
            cfg.solver.rtol = num_or(*it, "rtol", "solver", cfg.solver.rtol);
            cfg.solver.atol = num_or(*it, "atol", "solver", cfg.solver.atol);
            cfg.solver.grid_per_period =
                static_cast<int>(int_or(*it, "grid_per_period", "solver", 200));
            cfg.solver.burn_in = num_or(*it, "burn_in", "solver", 0.0);
            cfg.solver.iter_tol = num_or(*it, "iter_tol", "solver", 1e-6);
            cfg.solver.max_iter = static_cast<int>(int_or(*it, "max_iter", "solver", 40));
        }

        const json& sim = require(doc, "simulation", "");
        cfg.simulation.t0 = num_or(sim, "t0", "simulation", 0.0);
        cfg.simulation.t1 = num_at(sim, "t1", "simulation");
        if (!(cfg.simulation.t1 > cfg.simulation.t0))
            bad("simulation.t1", "must exceed simulation.t0");
        cfg.simulation.initial =
            parse_vector(require(sim, "initial", "simulation"), cfg.dim, "simulation.initial");

        if (auto it = doc.find("verify"); it != doc.end()) {
            cfg.verify.eps = num_or(*it, "eps", "verify", 0.1);
            if (auto iv = it->find("interval"); iv != it->end()) {
                if (!iv->is_array() || iv->size() != 2) bad("verify.interval", "expected [a, b]");
                cfg.verify.a = num((*iv)[0], "verify.interval");
                cfg.verify.b = num((*iv)[1], "verify.interval");
            }
        }

        if (auto it = doc.find("gronwall"); it != doc.end()) {
            cfg.gronwall.enabled = true;
            cfg.gronwall.z0 = parse_vector(require(*it, "z0", "gronwall"), cfg.dim, "gronwall.z0");
            cfg.gronwall.span = num_or(*it, "span", "gronwall", 10.0);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    // Range sanity that spans several fields.
    if (!cfg.logistic.deltas.empty()) {
        for (double d : cfg.logistic.deltas)
            if (!(d > 0.0)) bad("logistic.deltas", "entries must be positive");
        for (std::size_t i = 1; i < cfg.logistic.deltas.size(); ++i)
            if (!(cfg.logistic.deltas[i] < cfg.logistic.deltas[i - 1]))
                bad("logistic.deltas", "must be strictly decreasing");
    }
    return cfg;
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

BuiltSystem make_system(const SystemConfig& cfg) {
    BuiltSystem built;
    QuasilinearSystem& sys = built.sys;
    sys.id = cfg.id;
    sys.dim = cfg.dim;
    sys.omega = cfg.omega;
    sys.A = compile_matrix(cfg.matrix, cfg.dim, cfg.omega, "matrix");

    MppsForcing& forcing = sys.forcing;
    forcing.dim = cfg.dim;
    forcing.omega = cfg.omega;
    forcing.m_phi = cfg.m_phi;
    forcing.m_psi = cfg.m_psi;

    bool any_periodic = false, any_poisson = false;
    for (const auto& row : cfg.periodic_forcing) any_periodic |= !row.empty();
    for (const auto& row : cfg.poisson_forcing) any_poisson |= !row.empty();

    if (any_periodic) {
        forcing.phi = [terms = cfg.periodic_forcing, dim = cfg.dim](double t, Eigen::VectorXd& out) {
            for (int i = 0; i < dim; ++i) {
                double v = 0.0;
                for (const TrigTerm& tt : terms[static_cast<std::size_t>(i)])
                    v += tt.coefficient *
                         (tt.is_sin ? std::sin(tt.frequency * t) : std::cos(tt.frequency * t));
                out[i] = v;
            }
        };
    }

    if (any_poisson) {
        // Build the recurrence chain: orbit -> detected sequence -> theta.
        // The signal may start before t = 0 (its origin) so solutions can
        // burn in; detection is run on the orbit re-based to t = 0, so the
        // certified near-return window is exactly where verification looks.
        if (cfg.theta.origin > 1e-12) bad("theta.origin", "must be <= 0");
        double n_origin_d = -cfg.theta.origin / cfg.logistic.step;
        long n_origin = std::lround(n_origin_d);
        if (std::abs(n_origin_d - static_cast<double>(n_origin)) > 1e-9)
            bad("theta.origin", "must be an integer multiple of logistic.step");

        LogisticOrbit orbit =
            iterate_logistic(cfg.logistic.mu, cfg.logistic.seed, cfg.logistic.length);
        LogisticOrbit signal_orbit = discard_transient(orbit, cfg.logistic.discard);
        built.orbit = discard_transient(signal_orbit, static_cast<std::size_t>(n_origin));
        PoissonSequence seq =
            detect_poisson_sequence(built.orbit, cfg.logistic.window, cfg.logistic.deltas);
        built.seq = scale_times(seq, cfg.logistic.step);

        StepSignal step = build_step_signal(signal_orbit, cfg.logistic.step, cfg.theta.origin);
        built.theta = std::make_shared<ThetaSignal>(build_theta(step, cfg.theta.decay));

        forcing.seq = built.seq;
        forcing.has_breaks = true;
        forcing.break_origin = cfg.theta.origin;
        forcing.break_q = cfg.logistic.step;
        forcing.psi = [theta = built.theta, terms = cfg.poisson_forcing,
                       dim = cfg.dim](double t, Eigen::VectorXd& out) {
            double th = theta->eval(t);
            for (int i = 0; i < dim; ++i) {
                double v = 0.0;
                for (const ThetaTerm& tt : terms[static_cast<std::size_t>(i)]) {
                    double p = th;
                    for (int k = 1; k < tt.power; ++k) p *= th;
                    v += tt.coefficient * p;
                }
                out[i] = v;
            }
        };
    }

    if (cfg.has_nonlinear) {
        sys.L = cfg.L;
        sys.m_g = cfg.m_g;
        sys.H = cfg.H;
        sys.g = [terms = cfg.nonlinear_terms, dim = cfg.dim](double t, const Eigen::VectorXd& x,
                                                             Eigen::VectorXd& out) {
            for (int i = 0; i < dim; ++i) {
                double v = 0.0;
                for (const ArctanTerm& at : terms[static_cast<std::size_t>(i)])
                    v += at.coefficient *
                         (at.is_sin ? std::sin(at.frequency * t) : std::cos(at.frequency * t)) *
                         std::atan(x[at.arg - 1]);
                out[i] = v;
            }
        };
    }

    if (cfg.has_split) {
        sys.has_split = true;
        sys.B = compile_matrix(cfg.matrix_b, cfg.dim, cfg.omega, "split.b");
        PeriodicMatrixFn dfn = compile_matrix(cfg.matrix_d, cfg.dim, cfg.omega, "split.d");
        sys.D = dfn.eval;
        if (cfg.d_sup > 0.0) {
            sys.d_sup = cfg.d_sup;
        } else {
            // No declared sup: sample and round up by 1%.
            Eigen::MatrixXd Dm(cfg.dim, cfg.dim);
            double sup = 0.0;
            for (int j = 0; j <= 2000; ++j) {
                dfn.eval(cfg.omega * 20.0 * static_cast<double>(j) / 2000.0, Dm);
                sup = std::max(sup, row_sum_norm(Dm));
            }
            sys.d_sup = 1.01 * sup;
        }
    }

    return built;
}

} // namespace mpps
