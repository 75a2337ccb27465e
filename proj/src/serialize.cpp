#include "mpps/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mpps {

using nlohmann::json;

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("cannot open for writing: " + path);
    out << content;
    if (!out) throw SolverError("write failed: " + path);
}

void write_json_file(const std::string& path, const json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

namespace {

// Split one CSV line into doubles; returns false for blank/comment lines.
bool parse_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    if (line.empty() || line[0] == '#') return false;
    const char* p = line.c_str();
    for (;;) {
        char* end = nullptr;
        double v = std::strtod(p, &end);
        if (end == p) return false; // non-numeric (header line)
        out.push_back(v);
        p = end;
        while (*p == ' ') ++p;
        if (*p == '\0' || *p == '\r') return true;
        if (*p != ',') return false;
        ++p;
    }
}

} // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::string body = "t";
    for (int i = 1; i <= (traj.samples.empty() ? 0 : traj.dim()); ++i)
        body += ",x" + std::to_string(i);
    body += "\n";
    for (std::size_t j = 0; j < traj.size(); ++j) {
        body += format_full(traj.time(j));
        for (int i = 0; i < traj.dim(); ++i) body += "," + format_full(traj.samples[j][i]);
        body += "\n";
    }
    write_text(path, body);
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trajectory CSV: " + path);
    Trajectory traj;
    std::string line;
    std::vector<double> row;
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (!parse_row(line, row)) continue;
        if (row.size() < 2) throw ConfigError("trajectory CSV row needs t plus coordinates: " + path);
        if (!traj.samples.empty() &&
            static_cast<int>(row.size()) - 1 != traj.dim())
            throw ConfigError("inconsistent column count in " + path);
        times.push_back(row[0]);
        Eigen::VectorXd x(static_cast<Eigen::Index>(row.size()) - 1);
        for (std::size_t i = 1; i < row.size(); ++i) x[static_cast<Eigen::Index>(i - 1)] = row[i];
        traj.samples.push_back(std::move(x));
    }
    if (times.size() < 2) throw ConfigError("trajectory CSV has fewer than 2 rows: " + path);
    traj.t0 = times.front();
    traj.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(traj.dt > 0.0)) throw ConfigError("trajectory CSV times are not increasing: " + path);
    // The format promises a uniform grid; verify rather than trust.
    for (std::size_t j = 0; j < times.size(); ++j)
        if (std::abs(times[j] - traj.time(j)) > 1e-6 * std::max(1.0, std::abs(times.back())))
            throw ConfigError("trajectory CSV grid is not uniform at row " + std::to_string(j));
    return traj;
}

void write_signal_csv(const std::string& path, const std::vector<double>& t,
                      const std::vector<double>& value) {
    if (t.size() != value.size()) throw SolverError("signal CSV: length mismatch");
    std::string body = "t,value\n";
    for (std::size_t j = 0; j < t.size(); ++j)
        body += format_full(t[j]) + "," + format_full(value[j]) + "\n";
    write_text(path, body);
}

void write_orbit_csv(const std::string& path, const LogisticOrbit& orbit) {
    std::string body = "n,eta\n";
    for (std::size_t j = 0; j < orbit.values.size(); ++j)
        body += std::to_string(j) + "," + format_full(orbit.values[j]) + "\n";
    write_text(path, body);
}

void write_sequence_csv(const std::string& path, const PoissonSequence& seq) {
    std::string body = "k,time,delta\n";
    for (std::size_t j = 0; j < seq.times.size(); ++j)
        body += std::to_string(j) + "," + format_full(seq.times[j]) + "," +
                format_full(j < seq.precisions.size() ? seq.precisions[j] : 0.0) + "\n";
    write_text(path, body);
}

PoissonSequence read_sequence_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open sequence CSV: " + path);
    PoissonSequence seq;
    std::string line;
    std::vector<double> row;
    while (std::getline(in, line)) {
        if (!parse_row(line, row)) continue;
        if (row.size() < 3) throw ConfigError("sequence CSV rows are k,time,delta: " + path);
        seq.times.push_back(row[1]);
        seq.precisions.push_back(row[2]);
    }
    if (seq.times.empty()) throw ConfigError("sequence CSV is empty: " + path);
    return seq;
}

json to_json(const FloquetData& fd) {
    json j;
    j["omega"] = fd.omega;
    std::vector<double> mono;
    for (Eigen::Index r = 0; r < fd.monodromy.rows(); ++r)
        for (Eigen::Index c = 0; c < fd.monodromy.cols(); ++c) mono.push_back(fd.monodromy(r, c));
    j["monodromy"] = mono;
    json mult = json::array();
    for (Eigen::Index i = 0; i < fd.multipliers.size(); ++i)
        mult.push_back({{"re", fd.multipliers[i].real()}, {"im", fd.multipliers[i].imag()}});
    j["multipliers"] = mult;
    j["K"] = fd.K;
    j["alpha"] = fd.alpha;
    j["tol"] = fd.tol;
    return j;
}

FloquetData floquet_from_json(const json& j) {
    FloquetData fd;
    try {
        fd.omega = j.at("omega").get<double>();
        std::vector<double> mono = j.at("monodromy").get<std::vector<double>>();
        auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(mono.size()))));
        if (n * n != static_cast<Eigen::Index>(mono.size()))
            throw ConfigError("monodromy array is not square");
        fd.monodromy.resize(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c)
                fd.monodromy(r, c) = mono[static_cast<std::size_t>(r * n + c)];
        const json& mult = j.at("multipliers");
        fd.multipliers.resize(static_cast<Eigen::Index>(mult.size()));
        for (Eigen::Index i = 0; i < fd.multipliers.size(); ++i) {
            const json& m = mult[static_cast<std::size_t>(i)];
            fd.multipliers[i] = {m.at("re").get<double>(), m.at("im").get<double>()};
        }
        fd.K = j.at("K").get<double>();
        fd.alpha = j.at("alpha").get<double>();
        fd.tol = j.at("tol").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("floquet JSON: ") + e.what());
    }
    double rho = 0.0;
    for (Eigen::Index i = 0; i < fd.multipliers.size(); ++i)
        rho = std::max(rho, std::abs(fd.multipliers[i]));
    fd.c4_satisfied = rho < 1.0;
    return fd;
}

json to_json(const ConditionReport& rep) {
    json j;
    j["pair_source"] = rep.pair_source;
    json entries = json::object();
    for (int i = 1; i <= 11; ++i) {
        const ConditionEntry& e = rep[i];
        json je;
        je["applicable"] = e.applicable;
        je["satisfied"] = e.satisfied;
        je["lhs"] = e.lhs;
        je["rhs"] = e.rhs;
        if (!e.detail.empty()) je["detail"] = e.detail;
        entries["C" + std::to_string(i)] = je;
    }
    j["conditions"] = entries;
    return j;
}

json to_json(const ShiftSpectrum& sp) {
    json j;
    j["omega"] = sp.omega;
    j["cluster_radius"] = sp.cluster_radius;
    j["residues"] = sp.residues;
    json cl = json::array();
    for (const auto& [center, count] : sp.clusters)
        cl.push_back({{"center", center}, {"count", count}});
    j["clusters"] = cl;
    j["kappa"] = sp.kappa;
    j["kappa_zero"] = sp.kappa_zero;
    return j;
}

json to_json(const ConvergenceReport& rep) {
    json j;
    j["interval"] = {rep.a, rep.b};
    j["eps"] = rep.eps;
    j["shifts"] = rep.shifts;
    j["sup_deviations"] = rep.sups;
    j["tail_start"] = rep.tail_start;
    j["pass"] = rep.pass;
    if (!rep.detail.empty()) j["detail"] = rep.detail;
    return j;
}

json to_json(const ThetaPoissonReport& rep) {
    json j;
    j["interval"] = {rep.a, rep.b};
    j["eps"] = rep.eps;
    j["shifts"] = rep.shifts;
    j["sup_deviations"] = rep.sups;
    j["tail_start"] = rep.tail_start;
    j["pass"] = rep.pass;
    return j;
}

json to_json(const Lemma1Report& rep) {
    json j;
    j["all_pass"] = rep.all_pass;
    j["noise_floor"] = rep.noise_floor;
    json cases = json::array();
    for (const Lemma1Case& c : rep.cases)
        cases.push_back({{"t", c.t},
                         {"s", c.s},
                         {"tau", c.tau},
                         {"lhs", c.lhs},
                         {"rhs", c.rhs},
                         {"margin", c.margin},
                         {"pass", c.pass}});
    j["cases"] = cases;
    return j;
}

json to_json(const PicardResult& res) {
    json j;
    j["iterations"] = res.iterations;
    j["distances"] = res.distances;
    j["ratios"] = res.ratios;
    j["sup"] = res.sup;
    return j;
}

json to_json(const GronwallReport& rep) {
    json j;
    j["rate_bound"] = rep.rate_bound;
    j["rate_measured"] = rep.rate_measured;
    j["initial_gap"] = rep.initial_gap;
    j["worst_ratio"] = rep.worst_ratio;
    j["pass"] = rep.pass;
    return j;
}

} // namespace mpps
