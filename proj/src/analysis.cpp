#include "mpemba/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mpemba/eig.hpp"

namespace mpemba {

namespace {

constexpr double kProbFloor = 1e-300;
constexpr double kEigFloor = 1e-14;
constexpr double kEigNegativeTol = -1e-10;
constexpr double kFitFloor = 1e-12;
constexpr double kFitR2Min = 0.999;

void require_thermal_reference(double n_th, const char* where) {
    if (!(n_th > 0.0))
        throw std::domain_error(std::string(where) +
                                ": thermal reference needs n_th > 0 for full support");
}

double log_thermal(int n, double n_th) {
    // ln P_n^(S) = -ln(1+n_th) + n ln q
    return -std::log1p(n_th) + n * std::log(n_th / (1.0 + n_th));
}

/// Banded storage of rho - t * rho_S (t = 0 or 1), lower bands, column-major.
std::vector<std::complex<double>> banded_of(const DensityState& rho, double subtract_thermal,
                                            double n_th, int* kd_out) {
    const int N = rho.size();
    int kd = 0;
    for (const auto& b : rho.bands) kd = std::max(kd, b.s);
    *kd_out = kd;
    std::vector<std::complex<double>> ab(static_cast<size_t>(kd + 1) * N, 0.0);
    for (int n = 0; n < N; ++n) {
        double v = rho.diag.probs[n];
        if (subtract_thermal != 0.0)
            v -= subtract_thermal * std::exp(log_thermal(n, n_th));
        ab[static_cast<size_t>(n) * (kd + 1)] = v;
    }
    for (const auto& b : rho.bands)
        for (int n = 0; n + b.s < N; ++n)
            ab[static_cast<size_t>(n) * (kd + 1) + b.s] = std::conj(b.amps[n]);
    return ab;
}

}  // namespace

double kl_population(const PopulationState& P, double n_th) {
    require_thermal_reference(n_th, "kl_population");
    double acc = 0.0;
    for (int n = 0; n < P.size(); ++n) {
        const double p = P.probs[n];
        if (p < kProbFloor) continue;  // 0 ln 0 = 0
        acc += p * (std::log(p) - log_thermal(n, n_th));
    }
    return acc;
}

double trace_distance_population(const PopulationState& P, double n_th) {
    require_thermal_reference(n_th, "trace_distance_population");
    double acc = 0.0;
    for (int n = 0; n < P.size(); ++n)
        acc += std::abs(P.probs[n] - std::exp(log_thermal(n, n_th)));
    return 0.5 * acc;
}

double hs_distance_population(const PopulationState& P, double n_th) {
    require_thermal_reference(n_th, "hs_distance_population");
    double acc = 0.0;
    for (int n = 0; n < P.size(); ++n) {
        const double d = P.probs[n] - std::exp(log_thermal(n, n_th));
        acc += d * d;
    }
    return std::sqrt(acc);
}

double quantum_relative_entropy(const DensityState& rho, double n_th) {
    require_thermal_reference(n_th, "quantum_relative_entropy");
    if (rho.bands.empty()) return kl_population(rho.diag, n_th);

    int kd = 0;
    auto ab = banded_of(rho, 0.0, n_th, &kd);
    const auto mu = hermitian_banded_eigenvalues(rho.size(), kd, ab);
    double tr_rho_ln_rho = 0.0;
    for (double m : mu) {
        if (m < kEigNegativeTol)
            throw std::domain_error("quantum_relative_entropy: eigenvalue " + std::to_string(m) +
                                    " below tolerance; state is not a density matrix at this "
                                    "truncation");
        if (m > kEigFloor) tr_rho_ln_rho += m * std::log(m);
    }
    double tr_rho_ln_thermal = 0.0;
    for (int n = 0; n < rho.size(); ++n)
        tr_rho_ln_thermal += rho.diag.probs[n] * log_thermal(n, n_th);
    return tr_rho_ln_rho - tr_rho_ln_thermal;
}

double trace_distance_density(const DensityState& rho, double n_th) {
    require_thermal_reference(n_th, "trace_distance_density");
    int kd = 0;
    auto ab = banded_of(rho, 1.0, n_th, &kd);
    const auto mu = hermitian_banded_eigenvalues(rho.size(), kd, ab);
    double acc = 0.0;
    for (double m : mu) acc += std::abs(m);
    return 0.5 * acc;
}

double hs_distance_density(const DensityState& rho, double n_th) {
    require_thermal_reference(n_th, "hs_distance_density");
    double acc = 0.0;
    for (int n = 0; n < rho.size(); ++n) {
        const double d = rho.diag.probs[n] - std::exp(log_thermal(n, n_th));
        acc += d * d;
    }
    for (const auto& b : rho.bands)
        for (const auto& a : b.amps) acc += 2.0 * std::norm(a);  // both conjugate bands
    return std::sqrt(acc);
}

DistanceTrajectory distance_trajectory(const Trajectory& traj, double n_th, Measure measure) {
    DistanceTrajectory out;
    out.grid = traj.grid;
    out.values.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        switch (measure) {
            case Measure::kl: out.values.push_back(kl_population(s, n_th)); break;
            case Measure::trace: out.values.push_back(trace_distance_population(s, n_th)); break;
            case Measure::hs: out.values.push_back(hs_distance_population(s, n_th)); break;
        }
    }
    return out;
}

DistanceTrajectory distance_trajectory(const DensityTrajectory& traj, double n_th,
                                       Measure measure) {
    DistanceTrajectory out;
    out.grid = traj.grid;
    out.values.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        switch (measure) {
            case Measure::kl: out.values.push_back(quantum_relative_entropy(s, n_th)); break;
            case Measure::trace: out.values.push_back(trace_distance_density(s, n_th)); break;
            case Measure::hs: out.values.push_back(hs_distance_density(s, n_th)); break;
        }
    }
    return out;
}

std::optional<double> fit_decay_rate(DistanceTrajectory& traj, double window_fraction) {
    if (!(window_fraction > 0.0 && window_fraction < 1.0))
        throw std::invalid_argument("fit_decay_rate: window_fraction in (0,1)");
    std::vector<std::pair<double, double>> usable;  // (t, ln D)
    for (int k = 0; k < traj.grid.size(); ++k)
        if (traj.values[k] > kFitFloor)
            usable.emplace_back(traj.grid.times[k], std::log(traj.values[k]));
    const int start = static_cast<int>(usable.size() * (1.0 - window_fraction));
    const int count = static_cast<int>(usable.size()) - start;
    if (count < 5)
        throw std::invalid_argument("fit_decay_rate: fewer than 5 usable samples in window");

    double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
    for (int k = start; k < static_cast<int>(usable.size()); ++k) {
        st += usable[k].first;
        sy += usable[k].second;
    }
    const double mt = st / count, my = sy / count;
    for (int k = start; k < static_cast<int>(usable.size()); ++k) {
        const double dt = usable[k].first - mt, dy = usable[k].second - my;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    const double slope = sty / stt;
    const double ss_res = syy - sty * sty / stt;
    traj.fit_r2 = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
    traj.fit_window = {usable[start].first, usable.back().first};
    if (traj.fit_r2 < kFitR2Min || !(slope < 0.0)) {
        traj.fitted_rate.reset();
        return std::nullopt;
    }
    traj.fitted_rate = -slope;
    return traj.fitted_rate;
}

CrossingReport detect_crossing(const DistanceTrajectory& traj_I,
                               const DistanceTrajectory& traj_II) {
    if (traj_I.grid.times != traj_II.grid.times)
        throw std::invalid_argument("detect_crossing: trajectories use different grids");
    const int T = traj_I.grid.size();
    CrossingReport rep;
    rep.initially_farther = traj_II.values[0] > traj_I.values[0] ? 2 : 1;

    auto logdiff = [&](int k) {
        const double a = std::max(traj_I.values[k], kProbFloor);
        const double b = std::max(traj_II.values[k], kProbFloor);
        return std::log(b) - std::log(a);
    };
    double prev = logdiff(0);
    for (int k = 1; k < T; ++k) {
        const double cur = logdiff(k);
        if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
            const double t0 = traj_I.grid.times[k - 1], t1 = traj_I.grid.times[k];
            rep.crossings.push_back(t0 - prev * (t1 - t0) / (cur - prev));
        }
        prev = cur;
    }
    if (!rep.crossings.empty()) {
        // farther state must sit strictly below past the last crossing
        const double t_last = rep.crossings.back();
        bool below = true;
        for (int k = 0; k < T; ++k) {
            if (traj_I.grid.times[k] <= t_last) continue;
            const bool ii_below = traj_II.values[k] < traj_I.values[k];
            if ((rep.initially_farther == 2 && !ii_below) ||
                (rep.initially_farther == 1 && ii_below))
                below = false;
        }
        rep.mpemba_detected = below;
    }
    return rep;
}

}  // namespace mpemba
