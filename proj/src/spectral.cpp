#include "mpemba/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mpemba {

namespace {

void require_positive_nth(double n_th, const char* where) {
    if (!(n_th > 0.0))
        throw std::domain_error(std::string(where) +
                                ": n_th must be positive (spectral machinery is "
                                "degenerate at zero temperature)");
}

// Scaled left-eigenvector recurrence on chi_n = q^n phi_n. The unscaled phi
// recurrence has an error mode growing like q^{-n}; scaling by q^n turns the
// two characteristic roots into {q, 1}, so roundoff stays bounded.
std::vector<double> scaled_left_eigenvector(int alpha, double n_th, int N) {
    const double q = n_th / (1.0 + n_th);
    std::vector<double> chi(N, 0.0);
    chi[0] = 1.0;
    if (N > 1) chi[1] = q * (n_th - alpha) / n_th;
    for (int n = 1; n + 1 < N; ++n) {
        chi[n + 1] = (q * (n * (2.0 * n_th + 1.0) + n_th - alpha) * chi[n] -
                      q * n_th * n * chi[n - 1]) /
                     (n_th * (n + 1));
    }
    return chi;
}

}  // namespace

double population_eigenvalue(int alpha, double gamma) {
    if (alpha < 0) throw std::invalid_argument("population_eigenvalue: alpha >= 0");
    return -2.0 * gamma * alpha;
}

std::complex<double> coherence_eigenvalue(int alpha, int s, const BathParams& params) {
    if (s == 0)
        throw std::invalid_argument("coherence_eigenvalue: s = 0 belongs to the population block");
    if (alpha < 0) throw std::invalid_argument("coherence_eigenvalue: alpha >= 0");
    return {-2.0 * params.gamma * (alpha + 0.5 * std::abs(s)), params.omega0 * s};
}

double left_eigenvector_entry(int alpha, int n, double n_th) {
    require_positive_nth(n_th, "left_eigenvector_entry");
    const int kmax = std::min(alpha, n);
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < kmax; ++k) {
        term *= static_cast<double>(alpha - k) * static_cast<double>(n - k) /
                (-(k + 1.0) * (k + 1.0) * n_th);
        sum += term;
    }
    return sum;
}

std::vector<double> left_eigenvector(int alpha, double n_th, int N) {
    require_positive_nth(n_th, "left_eigenvector");
    std::vector<double> phi(N);
    for (int n = 0; n < N; ++n) phi[n] = left_eigenvector_entry(alpha, n, n_th);
    return phi;
}

std::vector<double> right_eigenvector(int alpha, double n_th, int N) {
    require_positive_nth(n_th, "right_eigenvector");
    const double q = n_th / (1.0 + n_th);
    auto psi = scaled_left_eigenvector(alpha, n_th, N);
    const double prefactor = std::exp(alpha * std::log(q)) * (1.0 - q);
    for (auto& v : psi) v *= prefactor;
    return psi;
}

std::vector<double> spectral_amplitudes(const PopulationState& P0, double n_th, int alpha_max) {
    require_positive_nth(n_th, "spectral_amplitudes");
    if (alpha_max < 0) throw std::invalid_argument("spectral_amplitudes: alpha_max >= 0");
    std::vector<double> C(alpha_max + 1, 0.0);
    for (int alpha = 0; alpha <= alpha_max; ++alpha) {
        double acc = 0.0;
        for (int n = 0; n < P0.size(); ++n)
            if (P0.probs[n] != 0.0) acc += P0.probs[n] * left_eigenvector_entry(alpha, n, n_th);
        C[alpha] = acc;
    }
    return C;
}

double identity_resolution_residual(double n_th, int window, int alpha_max) {
    require_positive_nth(n_th, "identity_resolution_residual");
    const double q = n_th / (1.0 + n_th);
    const double lnq = std::log(q);
    // psi_n^(a) phi_m^(a) = q^{a+n} (1-q) phi_n^(a) phi_m^(a)
    std::vector<std::vector<double>> phi(alpha_max + 1, std::vector<double>(window));
    for (int a = 0; a <= alpha_max; ++a)
        for (int n = 0; n < window; ++n) phi[a][n] = left_eigenvector_entry(a, n, n_th);
    double worst = 0.0;
    for (int n = 0; n < window; ++n) {
        for (int m = 0; m < window; ++m) {
            double acc = 0.0;
            for (int a = 0; a <= alpha_max; ++a)
                acc += std::exp((a + n) * lnq) * (1.0 - q) * phi[a][n] * phi[a][m];
            const double target = (n == m) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(acc - target));
        }
    }
    return worst;
}

double eigen_moment(int alpha, int l, double n_th, double tail_tol) {
    require_positive_nth(n_th, "eigen_moment");
    if (alpha < 0 || l < 0) throw std::invalid_argument("eigen_moment: alpha, l >= 0");
    const double q = n_th / (1.0 + n_th);
    const double lnq = std::log(q);
    double acc = 0.0, peak = 0.0;
    // summand ~ q^n n^{alpha+l}: decays geometrically past n ~ (alpha+l)/|ln q|
    const int settle = alpha + l + 10;
    for (int n = 0; n < 10'000'000; ++n) {
        const double term = std::pow(static_cast<double>(n), l) *
                            left_eigenvector_entry(alpha, n, n_th) *
                            std::exp((alpha + n) * lnq) * (1.0 - q);
        acc += term;
        peak = std::max(peak, std::abs(term));
        if (n > settle && std::abs(term) < tail_tol * std::max(peak, 1e-300)) break;
    }
    return acc;
}

SpectralDecomposition decompose_population(const PopulationState& P0, const BathParams& params,
                                           int alpha_max, int N) {
    require_positive_nth(params.n_th, "decompose_population");
    SpectralDecomposition dec;
    dec.amplitudes = spectral_amplitudes(P0, params.n_th, alpha_max);
    dec.modes.reserve(alpha_max + 1);
    for (int a = 0; a <= alpha_max; ++a) {
        SpectralMode m;
        m.alpha = a;
        m.band_offset = 0;
        m.eigenvalue = population_eigenvalue(a, params.gamma);
        m.right_vec = right_eigenvector(a, params.n_th, N);
        m.left_vec = left_eigenvector(a, params.n_th, N);
        dec.modes.push_back(std::move(m));
    }
    return dec;
}

}  // namespace mpemba
