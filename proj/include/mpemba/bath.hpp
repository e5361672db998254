#pragma once

namespace mpemba {

/// Oscillator/bath parameters. Single source of all transition rates.
struct BathParams {
    double gamma;   ///< damping rate (inverse time), > 0
    double omega0;  ///< oscillator frequency (inverse time), >= 0
    double n_th;    ///< mean thermal occupation of the bath mode, >= 0

    /// Upward (absorption) rate W_up = 2 gamma n_th.
    double absorption_rate() const { return 2.0 * gamma * n_th; }
    /// Downward (emission) rate W_down = 2 gamma (n_th + 1).
    double emission_rate() const { return 2.0 * gamma * (n_th + 1.0); }
    /// Geometric ratio q = n_th / (1 + n_th) of the thermal distribution.
    double boltzmann_ratio() const { return n_th / (1.0 + n_th); }
};

BathParams make_bath(double gamma, double omega0, double n_th);

/// Alternate entry point: x = hbar*omega0 / (kB*T) > 0, n_th = 1/(e^x - 1).
BathParams bath_from_temperature_ratio(double gamma, double omega0, double x);

/// Fock-space truncation policy.
struct TruncationPolicy {
    double tail_tol = 1e-12;
    int n_min = 64;
    int n_max_cap = 4096;
};

/// Smallest N with q^N < tail_tol for the thermal law at n_th, clamped to
/// [n_min, n_max_cap]. Throws if the cap is exceeded.
int thermal_truncation(double n_th, const TruncationPolicy& policy);

}  // namespace mpemba
