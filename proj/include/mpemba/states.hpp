#pragma once

#include <complex>
#include <vector>

#include "mpemba/bath.hpp"

namespace mpemba {

/// Truncated distribution of excitation-number populations P_n, n = 0..N-1.
struct PopulationState {
    std::vector<double> probs;
    double mass_deficit = 0.0;   ///< 1 - sum(probs) as recorded at construction
    bool finite_moments = true;  ///< false for heavy-tail laws (no finite moments untruncated)

    int size() const { return static_cast<int>(probs.size()); }
    double mass() const;
    double mean() const;
    /// l-th raw moment sum n^l P_n over the stored support.
    double moment(int l) const;
};

/// One off-diagonal band rho_{n,n+s} of a density matrix, s > 0.
/// The -s band is the elementwise conjugate and is never stored.
struct CoherenceBand {
    int s = 0;
    std::vector<std::complex<double>> amps;  ///< amps[n] = rho_{n,n+s}, n = 0..N-1
};

/// Band-sparse truncated Hermitian state: diagonal plus a few coherence bands.
struct DensityState {
    PopulationState diag;
    std::vector<CoherenceBand> bands;  ///< sorted by s, unique, s > 0

    int size() const { return diag.size(); }
    double trace() const { return diag.mass(); }
    const CoherenceBand* band(int s) const;
    /// Smallest eigenvalue of the reconstructed truncated matrix (on-demand check).
    double min_eigenvalue() const;
};

PopulationState thermal_population(double n_th, const TruncationPolicy& policy = {});
PopulationState two_point_population(double n_th, int n1, const TruncationPolicy& policy = {});
PopulationState fock_population(int n, const TruncationPolicy& policy = {});
PopulationState power_law_population(const TruncationPolicy& policy = {});
/// Raw probability vector: entries below -1e-12 are rejected, small negatives
/// clipped, then renormalized to unit mass.
PopulationState explicit_population(std::vector<double> probs, const TruncationPolicy& policy = {});

DensityState pure_superposition_state(double n_th, int n1, const TruncationPolicy& policy = {});
DensityState density_from_population(PopulationState diag);

/// Extend (zero-pad) a state to length N. No-op if already at least N long.
PopulationState pad_to(const PopulationState& p, int N);
DensityState pad_to(const DensityState& rho, int N);

}  // namespace mpemba
