#include "mpemba/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mpemba {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Measure measure_from_string(const std::string& s) {
    if (s == "kl") return Measure::kl;
    if (s == "trace") return Measure::trace;
    if (s == "hs") return Measure::hs;
    throw ScenarioError("unknown measure '" + s + "'");
}

std::string measure_name(Measure m) {
    switch (m) {
        case Measure::kl: return "kl";
        case Measure::trace: return "trace";
        case Measure::hs: return "hs";
    }
    return "?";
}

std::string kind_name(StateSpec::Kind k) {
    switch (k) {
        case StateSpec::Kind::thermal: return "thermal";
        case StateSpec::Kind::two_point: return "two_point";
        case StateSpec::Kind::fock: return "fock";
        case StateSpec::Kind::power_law: return "power_law";
        case StateSpec::Kind::pure_superposition: return "pure_superposition";
        case StateSpec::Kind::explicit_probs: return "explicit";
    }
    return "?";
}

StateSpec::Kind kind_from_string(const std::string& s) {
    if (s == "thermal") return StateSpec::Kind::thermal;
    if (s == "two_point") return StateSpec::Kind::two_point;
    if (s == "fock") return StateSpec::Kind::fock;
    if (s == "power_law") return StateSpec::Kind::power_law;
    if (s == "pure_superposition") return StateSpec::Kind::pure_superposition;
    if (s == "explicit") return StateSpec::Kind::explicit_probs;
    throw ScenarioError("unknown state kind '" + s + "'");
}

int state_support_requirement(const StateSpec& spec, const Scenario& sc) {
    switch (spec.kind) {
        case StateSpec::Kind::thermal: return thermal_truncation(spec.n_th, sc.policy);
        case StateSpec::Kind::two_point: return spec.n1 + 1;
        case StateSpec::Kind::fock: return spec.n + 1;
        case StateSpec::Kind::power_law: return sc.policy.n_max_cap;
        case StateSpec::Kind::pure_superposition: return spec.n1 + 1;
        case StateSpec::Kind::explicit_probs: return static_cast<int>(spec.probs.size());
    }
    return sc.policy.n_min;
}

bool is_density_kind(StateSpec::Kind k) { return k == StateSpec::Kind::pure_superposition; }

}  // namespace

int resolve_truncation(const Scenario& sc) {
    if (sc.n_max_override) {
        if (*sc.n_max_override < 2) throw ScenarioError("n_max must be at least 2");
        return *sc.n_max_override;
    }
    int required = std::max(sc.policy.n_min, thermal_truncation(sc.bath.n_th, sc.policy));
    bool has_power_law = false;
    for (const auto& spec : sc.states) {
        required = std::max(required, state_support_requirement(spec, sc));
        has_power_law |= spec.kind == StateSpec::Kind::power_law;
    }
    if (has_power_law) return required;  // already at the cap
    // headroom for transient spreading above the initial support
    return std::min(sc.policy.n_max_cap, static_cast<int>(std::ceil(1.25 * required)) + 16);
}

Scenario parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("invalid JSON: ") + e.what());
    }
    try {
        Scenario sc;
        const auto& jb = doc.at("bath");
        const double gamma = jb.value("gamma", 1.0);
        const double omega0 = jb.value("omega0", 0.0);
        if (jb.contains("n_th") && jb.contains("temperature_ratio"))
            throw ScenarioError("bath: give n_th or temperature_ratio, not both");
        if (jb.contains("temperature_ratio"))
            sc.bath = bath_from_temperature_ratio(gamma, omega0,
                                                  jb.at("temperature_ratio").get<double>());
        else
            sc.bath = make_bath(gamma, omega0, jb.at("n_th").get<double>());

        if (!doc.contains("states") || !doc.at("states").is_array() || doc.at("states").empty())
            throw ScenarioError("at least one state is required");
        int idx = 0;
        for (const auto& js : doc.at("states")) {
            StateSpec spec;
            spec.kind = kind_from_string(js.at("kind").get<std::string>());
            spec.name = js.value("name", kind_name(spec.kind) + "_" + std::to_string(idx + 1));
            switch (spec.kind) {
                case StateSpec::Kind::thermal: spec.n_th = js.at("n_th").get<double>(); break;
                case StateSpec::Kind::two_point:
                case StateSpec::Kind::pure_superposition:
                    spec.n1 = js.at("n1").get<int>();
                    break;
                case StateSpec::Kind::fock: spec.n = js.at("n").get<int>(); break;
                case StateSpec::Kind::power_law: break;
                case StateSpec::Kind::explicit_probs:
                    spec.probs = js.at("probs").get<std::vector<double>>();
                    break;
            }
            sc.states.push_back(std::move(spec));
            ++idx;
        }

        const auto& jg = doc.at("grid");
        sc.t_end = jg.at("t_end").get<double>();
        sc.samples = jg.at("samples").get<int>();
        if (!(sc.t_end > 0.0)) throw ScenarioError("grid.t_end must be positive");
        if (sc.samples < 16) throw ScenarioError("grid.samples must be at least 16");

        if (doc.contains("measures")) {
            sc.measures.clear();
            for (const auto& jm : doc.at("measures"))
                sc.measures.push_back(measure_from_string(jm.get<std::string>()));
            if (sc.measures.empty()) throw ScenarioError("measures must not be empty");
        }
        if (doc.contains("n_max")) sc.n_max_override = doc.at("n_max").get<int>();
        sc.csv_levels = doc.value("csv_levels", 16);
        if (sc.csv_levels < 1) throw ScenarioError("csv_levels must be positive");
        if (doc.contains("units")) {
            const std::string u = doc.at("units").get<std::string>();
            if (u == "gamma-t") sc.gamma_t_units = true;
            else if (u == "physical") sc.gamma_t_units = false;
            else throw ScenarioError("units must be 'gamma-t' or 'physical'");
        }
        return sc;
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("bad scenario document: ") + e.what());
    }
}

std::string scenario_to_json(const Scenario& sc) {
    json doc;
    doc["bath"] = {{"gamma", sc.bath.gamma}, {"omega0", sc.bath.omega0}, {"n_th", sc.bath.n_th}};
    doc["states"] = json::array();
    for (const auto& spec : sc.states) {
        json js{{"name", spec.name}, {"kind", kind_name(spec.kind)}};
        switch (spec.kind) {
            case StateSpec::Kind::thermal: js["n_th"] = spec.n_th; break;
            case StateSpec::Kind::two_point:
            case StateSpec::Kind::pure_superposition: js["n1"] = spec.n1; break;
            case StateSpec::Kind::fock: js["n"] = spec.n; break;
            case StateSpec::Kind::power_law: break;
            case StateSpec::Kind::explicit_probs: js["probs"] = spec.probs; break;
        }
        doc["states"].push_back(std::move(js));
    }
    doc["grid"] = {{"t_end", sc.t_end}, {"samples", sc.samples}};
    json jm = json::array();
    for (auto m : sc.measures) jm.push_back(measure_name(m));
    doc["measures"] = std::move(jm);
    if (sc.n_max_override) doc["n_max"] = *sc.n_max_override;
    doc["csv_levels"] = sc.csv_levels;
    doc["units"] = sc.gamma_t_units ? "gamma-t" : "physical";
    return doc.dump(2);
}

Scenario builtin_fig2() {
    Scenario sc;
    sc.bath = make_bath(1.0, 0.0, 2.0);
    sc.states = {StateSpec{"I", StateSpec::Kind::thermal, 3.0, 0, 0, {}},
                 StateSpec{"II", StateSpec::Kind::fock, 0.0, 0, 2, {}}};
    sc.t_end = 3.0;
    sc.samples = 301;
    return sc;
}

Scenario builtin_fig3() {
    Scenario sc;
    sc.bath = make_bath(1.0, 0.0, 2.5);
    sc.states = {StateSpec{"dist1", StateSpec::Kind::thermal, 3.0, 0, 0, {}},
                 StateSpec{"dist2", StateSpec::Kind::two_point, 0.0, 4, 0, {}},
                 StateSpec{"dist3", StateSpec::Kind::fock, 0.0, 0, 1, {}},
                 StateSpec{"dist4", StateSpec::Kind::power_law, 0.0, 0, 0, {}},
                 StateSpec{"dist5", StateSpec::Kind::two_point, 0.0, 6, 0, {}}};
    sc.t_end = 7.0;
    sc.samples = 351;
    sc.n_max_override = 1800;
    return sc;
}

Scenario builtin_fig4() {
    Scenario sc;
    sc.bath = make_bath(1.0, 0.0, 2.0);
    sc.states = {StateSpec{"I", StateSpec::Kind::thermal, 3.0, 0, 0, {}},
                 StateSpec{"II", StateSpec::Kind::pure_superposition, 0.0, 4, 0, {}}};
    sc.t_end = 2.0;
    sc.samples = 201;
    return sc;
}

namespace {

PopulationState build_population(const StateSpec& spec, const Scenario& sc, int N) {
    TruncationPolicy policy = sc.policy;
    policy.n_max_cap = std::max(policy.n_max_cap, N);
    switch (spec.kind) {
        case StateSpec::Kind::thermal: {
            // fixed truncation: evaluate the thermal law on the scenario lattice
            PopulationState p;
            p.probs.resize(N);
            if (spec.n_th == 0.0) {
                std::fill(p.probs.begin(), p.probs.end(), 0.0);
                p.probs[0] = 1.0;
                return p;
            }
            const double q = spec.n_th / (1.0 + spec.n_th);
            double v = 1.0 / (1.0 + spec.n_th);
            for (int n = 0; n < N; ++n, v *= q) p.probs[n] = v;
            p.mass_deficit = std::pow(q, N);
            return p;
        }
        case StateSpec::Kind::two_point:
            return pad_to(two_point_population(sc.bath.n_th, spec.n1, policy), N);
        case StateSpec::Kind::fock: return pad_to(fock_population(spec.n, policy), N);
        case StateSpec::Kind::power_law: {
            TruncationPolicy pl = policy;
            pl.n_max_cap = N;  // truncate the heavy tail at the scenario lattice
            return power_law_population(pl);
        }
        case StateSpec::Kind::explicit_probs:
            return pad_to(explicit_population(spec.probs, policy), N);
        case StateSpec::Kind::pure_superposition:
            throw ScenarioError("pure_superposition is a density state");
    }
    throw ScenarioError("unreachable state kind");
}

}  // namespace

ScenarioResult run_scenario(const Scenario& sc) {
    if (sc.states.empty()) throw ScenarioError("scenario has no states");
    ScenarioResult result;
    result.scenario = sc;
    result.N = resolve_truncation(sc);
    const int N = result.N;

    const TimeGrid grid = TimeGrid::uniform(sc.t_end / sc.bath.gamma, sc.samples);
    PropagationOptions opts;
    opts.tail_tol = sc.policy.tail_tol;

    // shared eigendecomposition for every absorbing-boundary population state
    PopulationPropagator absorbing_prop(population_generator(sc.bath, N), opts);
    std::optional<PopulationPropagator> reflecting_prop;

    for (const auto& spec : sc.states) {
        StateResult sr;
        sr.spec = spec;
        sr.is_density = is_density_kind(spec.kind);

        if (sr.is_density) {
            TruncationPolicy policy = sc.policy;
            policy.n_max_cap = std::max(policy.n_max_cap, N);
            DensityState rho = pad_to(pure_superposition_state(sc.bath.n_th, spec.n1, policy), N);
            auto traj = propagate_density(rho, sc.bath, grid, Method::spectral, opts);
            sr.method_used = traj.used;
            sr.fallback_reason = traj.fallback_reason;
            sr.truncation_limited = traj.truncation_limited;
            for (double d : traj.mass_deficit)
                sr.max_mass_deficit = std::max(sr.max_mass_deficit, std::abs(d));
            for (auto m : sc.measures)
                sr.distances.emplace(m, distance_trajectory(traj, sc.bath.n_th, m));
            try {
                sr.acceleration = acceleration_order(rho, sc.bath, 16);
            } catch (const std::exception& e) {
                sr.acceleration_note = e.what();
            }
            sr.density_traj = std::move(traj);
        } else {
            PopulationState P0 = build_population(spec, sc, N);
            // heavy-tail states keep their mass behind a reflecting edge;
            // the absorbing closure would leak enough to poison the distances
            const bool reflect = !P0.finite_moments;
            sr.boundary = reflect ? Boundary::reflecting : Boundary::absorbing;
            const PopulationPropagator* prop = &absorbing_prop;
            if (reflect) {
                if (!reflecting_prop)
                    reflecting_prop.emplace(
                        population_generator(sc.bath, N, Boundary::reflecting), opts);
                prop = &*reflecting_prop;
            }
            auto traj = prop->propagate(P0, grid, Method::spectral);
            sr.method_used = traj.used;
            sr.fallback_reason = traj.fallback_reason;
            sr.truncation_limited = traj.truncation_limited;
            for (double d : traj.mass_deficit)
                sr.max_mass_deficit = std::max(sr.max_mass_deficit, std::abs(d));
            for (auto m : sc.measures)
                sr.distances.emplace(m, distance_trajectory(traj, sc.bath.n_th, m));
            try {
                DensityState rho;
                rho.diag = P0;
                sr.acceleration = acceleration_order(rho, sc.bath, 16);
            } catch (const std::exception& e) {
                sr.acceleration_note = e.what();
            }
            sr.population_traj = std::move(traj);
        }

        if (auto it = sr.distances.find(Measure::kl); it != sr.distances.end())
            fit_decay_rate(it->second);
        result.truncation_limited |= sr.truncation_limited;
        if (sr.truncation_limited)
            result.warnings.push_back("state '" + spec.name + "' is truncation-limited");
        result.states.push_back(std::move(sr));
    }

    if (result.states.size() == 2) {
        const auto& d1 = result.states[0].distances;
        const auto& d2 = result.states[1].distances;
        auto i1 = d1.find(Measure::kl);
        auto i2 = d2.find(Measure::kl);
        if (i1 != d1.end() && i2 != d2.end())
            result.crossing = detect_crossing(i1->second, i2->second);
    }
    return result;
}

namespace {

void write_population_csv(std::ofstream& out, const Scenario& sc, const Trajectory& traj,
                          int levels) {
    out << "t,gamma_t";
    for (int n = 0; n < levels; ++n) out << ",P_" << n;
    out << "\n";
    for (int k = 0; k < traj.grid.size(); ++k) {
        const double t = traj.grid.times[k];
        out << fmt17(t) << "," << fmt17(t * sc.bath.gamma);
        for (int n = 0; n < levels; ++n) out << "," << fmt17(traj.states[k].probs[n]);
        out << "\n";
    }
}

void write_density_csv(std::ofstream& out, const Scenario& sc, const DensityTrajectory& traj,
                       int levels) {
    out << "t,gamma_t";
    for (int n = 0; n < levels; ++n) out << ",P_" << n;
    for (const auto& b : traj.states.front().bands)
        for (int n = 0; n < levels; ++n) out << ",abs_rho_" << n << "_" << n + b.s;
    out << "\n";
    for (int k = 0; k < traj.grid.size(); ++k) {
        const double t = traj.grid.times[k];
        out << fmt17(t) << "," << fmt17(t * sc.bath.gamma);
        for (int n = 0; n < levels; ++n) out << "," << fmt17(traj.states[k].diag.probs[n]);
        for (const auto& b : traj.states[k].bands)
            for (int n = 0; n < levels; ++n) out << "," << fmt17(std::abs(b.amps[n]));
        out << "\n";
    }
}

}  // namespace

std::string report_json(const ScenarioResult& result) {
    const Scenario& sc = result.scenario;
    const double tu = sc.gamma_t_units ? sc.bath.gamma : 1.0;
    json rep;
    rep["scenario"] = json::parse(scenario_to_json(sc));
    rep["n_max"] = result.N;
    rep["time_units"] = sc.gamma_t_units ? "gamma-t" : "physical";
    rep["truncation_limited"] = result.truncation_limited;
    rep["warnings"] = result.warnings;
    rep["states"] = json::array();
    for (const auto& sr : result.states) {
        json js;
        js["name"] = sr.spec.name;
        js["kind"] = kind_name(sr.spec.kind);
        js["method"] = sr.method_used == Method::spectral ? "spectral" : "ode";
        if (!sr.fallback_reason.empty()) js["fallback_reason"] = sr.fallback_reason;
        js["boundary"] = sr.boundary == Boundary::absorbing ? "absorbing" : "reflecting";
        js["max_mass_deficit"] = sr.max_mass_deficit;
        js["truncation_limited"] = sr.truncation_limited;
        if (sr.acceleration) {
            js["acceleration"] = {{"h", sr.acceleration->h},
                                  {"rate", sr.acceleration->rate},
                                  {"rate_over_gamma", sr.acceleration->rate / sc.bath.gamma}};
        } else {
            js["acceleration"] = nullptr;
            if (!sr.acceleration_note.empty()) js["acceleration_note"] = sr.acceleration_note;
        }
        json jd;
        for (const auto& [m, dist] : sr.distances) {
            json jm;
            jm["initial"] = dist.values.front();
            jm["final"] = dist.values.back();
            if (m == Measure::kl) {
                if (dist.fitted_rate) {
                    jm["fitted_rate"] = *dist.fitted_rate;
                    jm["fitted_rate_over_gamma"] = *dist.fitted_rate / sc.bath.gamma;
                    jm["fit_r2"] = dist.fit_r2;
                    jm["fit_window"] = {dist.fit_window.first * tu, dist.fit_window.second * tu};
                } else {
                    jm["fitted_rate"] = nullptr;
                    jm["fit_r2"] = dist.fit_r2;
                }
            }
            jd[measure_name(m)] = std::move(jm);
        }
        js["distances"] = std::move(jd);
        rep["states"].push_back(std::move(js));
    }
    if (result.crossing) {
        json jc;
        jc["crossings"] = json::array();
        for (double t : result.crossing->crossings) jc["crossings"].push_back(t * tu);
        jc["initially_farther"] = result.crossing->initially_farther == 2 ? "II" : "I";
        jc["mpemba"] = result.crossing->mpemba_detected;
        rep["crossing"] = std::move(jc);
    }
    return rep.dump(2) + "\n";
}

std::string write_outputs(const ScenarioResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const Scenario& sc = result.scenario;
    fs::create_directories(out_dir);

    const int levels = std::min(sc.csv_levels, result.N);
    for (const auto& sr : result.states) {
        std::ofstream out(fs::path(out_dir) / ("traj_" + sr.spec.name + ".csv"));
        if (!out) throw std::runtime_error("cannot write trajectory CSV");
        if (sr.is_density)
            write_density_csv(out, sc, *sr.density_traj, levels);
        else
            write_population_csv(out, sc, *sr.population_traj, levels);
    }

    for (auto m : sc.measures) {
        std::ofstream out(fs::path(out_dir) / ("distances_" + measure_name(m) + ".csv"));
        if (!out) throw std::runtime_error("cannot write distance CSV");
        out << "t,gamma_t";
        for (const auto& sr : result.states) out << ",D_" << sr.spec.name;
        out << "\n";
        const auto& grid = result.states.front().distances.at(m).grid;
        for (int k = 0; k < grid.size(); ++k) {
            const double t = grid.times[k];
            out << fmt17(t) << "," << fmt17(t * sc.bath.gamma);
            for (const auto& sr : result.states) out << "," << fmt17(sr.distances.at(m).values[k]);
            out << "\n";
        }
    }

    const std::string rep = report_json(result);
    std::ofstream out(fs::path(out_dir) / "report.json");
    if (!out) throw std::runtime_error("cannot write report.json");
    out << rep;
    return rep;
}

}  // namespace mpemba
