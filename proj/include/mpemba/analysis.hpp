#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mpemba/evolve.hpp"
#include "mpemba/states.hpp"

namespace mpemba {

enum class Measure { kl, trace, hs };

/// Kullback-Leibler divergence of P from the thermal law at n_th (0 ln 0 = 0).
double kl_population(const PopulationState& P, double n_th);

/// Secondary distances for the population block.
double trace_distance_population(const PopulationState& P, double n_th);
double hs_distance_population(const PopulationState& P, double n_th);

/// Quantum relative entropy Tr rho (ln rho - ln rho_S) for a band-sparse
/// state; reduces to kl_population when rho is diagonal. Throws when the
/// reconstructed matrix has an eigenvalue below -1e-10.
double quantum_relative_entropy(const DensityState& rho, double n_th);

double trace_distance_density(const DensityState& rho, double n_th);
double hs_distance_density(const DensityState& rho, double n_th);

/// Distance-to-equilibrium samples along a trajectory.
struct DistanceTrajectory {
    TimeGrid grid;
    std::vector<double> values;
    std::optional<double> fitted_rate;
    double fit_r2 = 0.0;
    std::pair<double, double> fit_window{0.0, 0.0};
};

DistanceTrajectory distance_trajectory(const Trajectory& traj, double n_th,
                                       Measure measure = Measure::kl);
DistanceTrajectory distance_trajectory(const DensityTrajectory& traj, double n_th,
                                       Measure measure = Measure::kl);

/// Least-squares slope of ln D over the final window_fraction of samples with
/// D above the 1e-12 floor. Stores the fit on the trajectory; returns the rate
/// only when r^2 >= 0.999. Throws when fewer than 5 samples are usable.
std::optional<double> fit_decay_rate(DistanceTrajectory& traj, double window_fraction = 0.4);

struct CrossingReport {
    std::vector<double> crossings;
    int initially_farther = 0;  ///< 1 or 2
    bool mpemba_detected = false;
};

/// Locate crossings of two distance curves on a shared grid by linear
/// interpolation of ln D, and decide whether the initially farther state ends
/// strictly closer past the last crossing.
CrossingReport detect_crossing(const DistanceTrajectory& traj_I,
                               const DistanceTrajectory& traj_II);

}  // namespace mpemba
