#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mpps/analysis.hpp"
#include "mpps/floquet.hpp"
#include "mpps/recurrence.hpp"
#include "mpps/solutions.hpp"

namespace mpps {

// All numeric text is written with 17 significant digits, so a written value
// round-trips to the same double and identical runs produce identical bytes.
std::string format_full(double v);

void write_text(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& doc);

// CSV: trajectories as `t,x1,...,xn`, scalar signals as `t,value`, orbits as
// `n,eta`, detected sequences as `k,time,delta`.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::string& path);

void write_signal_csv(const std::string& path, const std::vector<double>& t,
                      const std::vector<double>& value);
void write_orbit_csv(const std::string& path, const LogisticOrbit& orbit);

void write_sequence_csv(const std::string& path, const PoissonSequence& seq);
PoissonSequence read_sequence_csv(const std::string& path);

nlohmann::json to_json(const FloquetData& fd);
FloquetData floquet_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ConditionReport& rep);
nlohmann::json to_json(const ShiftSpectrum& sp);
nlohmann::json to_json(const ConvergenceReport& rep);
nlohmann::json to_json(const ThetaPoissonReport& rep);
nlohmann::json to_json(const Lemma1Report& rep);
nlohmann::json to_json(const PicardResult& res);
nlohmann::json to_json(const GronwallReport& rep);

} // namespace mpps
