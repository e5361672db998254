#pragma once

#include <complex>
#include <vector>

#include "mpemba/bath.hpp"
#include "mpemba/states.hpp"

namespace mpemba {

/// Population-block eigenvalue: -2 gamma alpha.
double population_eigenvalue(int alpha, double gamma);

/// Coherence-band eigenvalue: -2 gamma (alpha + |s|/2) + i s omega0, s != 0.
std::complex<double> coherence_eigenvalue(int alpha, int s, const BathParams& params);

/// Left eigenvector entry of the population generator. A polynomial of degree
/// alpha in n (a Meixner polynomial); evaluated by its terminating
/// hypergeometric sum, which is stable whenever min(alpha, n) is moderate.
double left_eigenvector_entry(int alpha, int n, double n_th);

/// Left eigenvector phi^(alpha) on n = 0..N-1.
std::vector<double> left_eigenvector(int alpha, double n_th, int N);

/// Right eigenvector psi^(alpha) on n = 0..N-1, normalized so psi^(0) is the
/// thermal distribution. Computed through the scaled recurrence on
/// q^n phi_n (both error modes bounded), then psi_n = q^alpha (1-q) q^n phi_n.
std::vector<double> right_eigenvector(int alpha, double n_th, int N);

/// Spectral amplitudes C_alpha = sum_n P_n(0) phi_n^(alpha), alpha = 0..alpha_max.
std::vector<double> spectral_amplitudes(const PopulationState& P0, double n_th, int alpha_max);

/// max over n,m < window of |sum_{alpha<=alpha_max} psi_n^(alpha) phi_m^(alpha) - delta_nm|.
double identity_resolution_residual(double n_th, int window, int alpha_max);

/// Moment of an eigenvector, Theta_{alpha,l} = sum_n n^l psi_n^(alpha);
/// vanishes for l < alpha. Summed over the lattice to the tail tolerance.
double eigen_moment(int alpha, int l, double n_th, double tail_tol = 1e-16);

/// One population-block mode with its eigenvalue and dual pair of vectors.
struct SpectralMode {
    int alpha = 0;
    int band_offset = 0;
    std::complex<double> eigenvalue;
    std::vector<double> right_vec;
    std::vector<double> left_vec;
};

struct SpectralDecomposition {
    std::vector<SpectralMode> modes;
    std::vector<double> amplitudes;
};

/// Analytic decomposition of an initial population state over modes 0..alpha_max.
SpectralDecomposition decompose_population(const PopulationState& P0, const BathParams& params,
                                           int alpha_max, int N);

}  // namespace mpemba
