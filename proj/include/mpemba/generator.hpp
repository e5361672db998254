#pragma once

#include <vector>

#include "mpemba/bath.hpp"

namespace mpemba {

/// Closure at the truncation edge n = N-1. Absorbing drops the outflow to n = N
/// (mass leaks at the recorded rate); reflecting removes the upward rate from
/// the last site so column sums vanish exactly.
enum class Boundary { absorbing, reflecting };

/// Truncated tridiagonal evolution generator dx/dt = G x in physical time.
/// upper[n] couples site n+1 into n, lower[n] couples site n into n+1.
struct TridiagonalGenerator {
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> lower;
    int band_offset = 0;      ///< s; 0 for the population block
    double phase_rate = 0.0;  ///< omega0 * s, carried symbolically
    Boundary boundary = Boundary::absorbing;
    double truncated_outflow = 0.0;  ///< rate leaving through the top edge (absorbing)

    int size() const { return static_cast<int>(diag.size()); }
    /// Infinity norm (max absolute row sum).
    double inf_norm() const;
};

TridiagonalGenerator population_generator(const BathParams& params, int N,
                                          Boundary boundary = Boundary::absorbing);

/// Band generator for the gauge amplitudes b_n of the coherences rho_{n,n+s};
/// the oscillatory factor exp(i omega0 s t) is carried in phase_rate, not here.
TridiagonalGenerator coherence_generator(const BathParams& params, int s, int N);

/// Symmetric form G' = U G U^{-1} with diagonal U. The similarity scale is kept
/// as log_scale[n] = log U_nn because U_nn grows geometrically with n.
struct SymmetrizedGenerator {
    std::vector<double> diag;
    std::vector<double> offdiag;
    std::vector<double> log_scale;

    int size() const { return static_cast<int>(diag.size()); }
};

/// Throws std::domain_error on a zero coupling product (degenerate chain);
/// callers fall back to the ODE propagator in that case.
SymmetrizedGenerator symmetrize(const TridiagonalGenerator& gen);

}  // namespace mpemba
