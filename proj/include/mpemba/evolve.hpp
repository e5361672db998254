#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mpemba/bath.hpp"
#include "mpemba/generator.hpp"
#include "mpemba/kernels.hpp"
#include "mpemba/states.hpp"

namespace mpemba {

/// Strictly increasing sample times, physical units.
struct TimeGrid {
    std::vector<double> times;

    static TimeGrid uniform(double t_end, int samples, double t_start = 0.0);
    int size() const { return static_cast<int>(times.size()); }
};

enum class Method { spectral, ode };

struct PropagationOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    double tail_tol = 1e-12;
    kernels::Exec exec = kernels::Exec::parallel;
};

struct Trajectory {
    TimeGrid grid;
    std::vector<PopulationState> states;
    std::vector<double> mass_deficit;
    Method requested = Method::spectral;
    Method used = Method::spectral;
    std::string fallback_reason;  ///< nonempty when spectral fell back to the ODE path
    bool truncation_limited = false;

    const PopulationState& at(int k) const { return states[k]; }
};

struct DensityTrajectory {
    TimeGrid grid;
    std::vector<DensityState> states;
    std::vector<double> mass_deficit;
    Method used = Method::spectral;
    std::string fallback_reason;
    bool truncation_limited = false;
};

/// Evolve a population state under a tridiagonal generator. The spectral route
/// symmetrizes and diagonalizes; it falls back to the ODE route when the chain
/// is degenerate or when the similarity scaling would amplify roundoff past
/// the mass tolerance (both recorded).
Trajectory propagate_population(const PopulationState& P0, const TridiagonalGenerator& gen,
                                const TimeGrid& grid, Method method = Method::spectral,
                                const PropagationOptions& opts = {});

/// Same propagation with the symmetrization and eigendecomposition cached, for
/// evolving many states under one generator.
class PopulationPropagator {
  public:
    PopulationPropagator(TridiagonalGenerator gen, PropagationOptions opts = {});
    ~PopulationPropagator();
    PopulationPropagator(PopulationPropagator&&) noexcept;
    PopulationPropagator& operator=(PopulationPropagator&&) noexcept;

    Trajectory propagate(const PopulationState& P0, const TimeGrid& grid,
                         Method method = Method::spectral) const;

    /// Raw amplitude route used for coherence bands (no probability semantics).
    std::vector<std::vector<std::complex<double>>> propagate_amplitudes(
        const std::vector<std::complex<double>>& b0, const TimeGrid& grid, Method method,
        Method* used, std::string* reason) const;

    const TridiagonalGenerator& generator() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Evolve a band-sparse density state: the diagonal under the population
/// generator, each band independently in its gauge, with the phase
/// exp(i omega0 s t) reapplied on output.
DensityTrajectory propagate_density(const DensityState& rho0, const BathParams& params,
                                    const TimeGrid& grid, Method method = Method::spectral,
                                    const PropagationOptions& opts = {});

}  // namespace mpemba
