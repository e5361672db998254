#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpemba/analysis.hpp"
#include "mpemba/bath.hpp"
#include "mpemba/evolve.hpp"
#include "mpemba/moments.hpp"
#include "mpemba/states.hpp"

namespace mpemba {

/// Invalid scenario document.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StateSpec {
    enum class Kind { thermal, two_point, fock, power_law, pure_superposition, explicit_probs };
    std::string name;
    Kind kind = Kind::thermal;
    double n_th = 0.0;          // thermal
    int n1 = 0;                 // two_point / pure_superposition
    int n = 0;                  // fock
    std::vector<double> probs;  // explicit_probs
};

struct Scenario {
    BathParams bath{1.0, 0.0, 1.0};
    std::vector<StateSpec> states;
    double t_end = 3.0;  ///< in units of 1/gamma
    int samples = 201;
    std::vector<Measure> measures{Measure::kl};
    std::optional<int> n_max_override;
    int csv_levels = 16;
    bool gamma_t_units = true;  ///< report times as gamma*t
    TruncationPolicy policy;
};

Scenario parse_scenario(const std::string& json_text);
std::string scenario_to_json(const Scenario& s);

Scenario builtin_fig2();
Scenario builtin_fig3();
Scenario builtin_fig4();

struct StateResult {
    StateSpec spec;
    bool is_density = false;
    Method method_used = Method::spectral;
    std::string fallback_reason;
    Boundary boundary = Boundary::absorbing;
    bool truncation_limited = false;
    double max_mass_deficit = 0.0;
    std::optional<AccelerationOrder> acceleration;
    std::string acceleration_note;
    std::map<Measure, DistanceTrajectory> distances;
    // sampled trajectories kept for the CSV writers
    std::optional<Trajectory> population_traj;
    std::optional<DensityTrajectory> density_traj;
};

struct ScenarioResult {
    Scenario scenario;
    int N = 0;
    std::vector<StateResult> states;
    std::optional<CrossingReport> crossing;  ///< first two states, KL measure
    bool truncation_limited = false;
    std::vector<std::string> warnings;
};

ScenarioResult run_scenario(const Scenario& scenario);

/// Write trajectory CSVs, distance CSVs and report.json under out_dir.
/// Returns the report JSON text. Output is byte-deterministic for a fixed
/// scenario (17 significant digit float formatting).
std::string write_outputs(const ScenarioResult& result, const std::string& out_dir);

std::string report_json(const ScenarioResult& result);

/// Truncation size the runner would pick for this scenario.
int resolve_truncation(const Scenario& scenario);

}  // namespace mpemba
