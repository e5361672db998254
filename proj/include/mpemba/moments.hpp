#pragma once

#include <complex>
#include <vector>

#include "mpemba/bath.hpp"
#include "mpemba/evolve.hpp"
#include "mpemba/states.hpp"

namespace mpemba {

/// Raw moments sum n^l P_n, l = 0..l_max.
std::vector<double> population_moments(const PopulationState& P, int l_max);

/// Stationary (thermal) moments of the bath law. Evaluated through the
/// all-positive factorial-moment expansion with exact integer coefficients,
/// so there is no cancellation; l_max <= 20.
std::vector<double> stationary_moments(double n_th, int l_max);

/// Same values through the binomial recursion, used as an independent route
/// in tests.
std::vector<double> stationary_moments_recursion(double n_th, int l_max);

/// Closed-form solution of the moment hierarchy: each Q_l(t) is an exact
/// combination of exp(-2 gamma j t), j = 0..l, solved layer by layer.
/// Returns one moment vector per grid sample.
std::vector<std::vector<double>> evolve_population_moments(const std::vector<double>& Q0,
                                                           double n_th, double gamma,
                                                           const TimeGrid& grid);

/// Gauge-weighted band moments sum n^l sqrt((n+s)!/n!) rho_{n,n+s}.
std::vector<std::complex<double>> coherence_moments(const DensityState& rho, int s, int l_max);

/// Closed-form band-moment evolution; basis exp(-2 gamma (j + s/2) t).
std::vector<std::vector<std::complex<double>>> evolve_coherence_moments(
    const std::vector<std::complex<double>>& Q0, int s, double n_th, double gamma,
    const TimeGrid& grid);

/// Largest r such that the first r population moments match the stationary
/// ones (relative tolerance rel_tol), capped at r_max.
int matched_moment_order(const PopulationState& P, double n_th, int r_max,
                         double rel_tol = 1e-9);

struct AccelerationOrder {
    int h = 0;             ///< largest h with every condition (2l+s) < h, l+s > 0 satisfied
    double rate = 0.0;     ///< gamma * h, the guaranteed relaxation rate
};

/// Acceleration prediction for a band-sparse state. Population conditions use
/// the centered moments Q_l - Q_l^(S); band conditions use the gauge-weighted
/// moments. Rejects states without finite moments.
AccelerationOrder acceleration_order(const DensityState& rho0, const BathParams& params,
                                     int h_max, double rel_tol = 1e-9);

/// Nonnegative weights on the given support matching the stationary moments
/// up to order r. Two-point supports use the closed form; general supports a
/// nonnegative least-squares solve. Throws std::domain_error when infeasible.
PopulationState construct_matched_state(double n_th, int r, const std::vector<int>& support,
                                        const TruncationPolicy& policy = {});

}  // namespace mpemba
