#include "mpemba/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mpemba/eig.hpp"

namespace mpemba {

namespace {
constexpr double kNegativeSlack = 1e-12;
}

double PopulationState::mass() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0);
}

double PopulationState::mean() const { return moment(1); }

double PopulationState::moment(int l) const {
    double acc = 0.0;
    for (int n = 0; n < size(); ++n) acc += std::pow(static_cast<double>(n), l) * probs[n];
    return acc;
}

const CoherenceBand* DensityState::band(int s) const {
    for (const auto& b : bands)
        if (b.s == s) return &b;
    return nullptr;
}

double DensityState::min_eigenvalue() const {
    const int N = size();
    int kd = 0;
    for (const auto& b : bands) kd = std::max(kd, b.s);
    std::vector<std::complex<double>> banded(static_cast<size_t>(kd + 1) * N, 0.0);
    // lower-band column-major storage: banded[j*(kd+1) + (i-j)] = A(i,j), j <= i <= j+kd
    for (int n = 0; n < N; ++n) banded[static_cast<size_t>(n) * (kd + 1)] = diag.probs[n];
    for (const auto& b : bands)
        for (int n = 0; n + b.s < N; ++n)
            banded[static_cast<size_t>(n) * (kd + 1) + b.s] = std::conj(b.amps[n]);
    const auto mu = hermitian_banded_eigenvalues(N, kd, banded);
    return *std::min_element(mu.begin(), mu.end());
}

PopulationState thermal_population(double n_th, const TruncationPolicy& policy) {
    if (!(n_th >= 0.0))
        throw std::invalid_argument("thermal_population: n_th must be nonnegative");
    const int N = thermal_truncation(n_th, policy);
    PopulationState p;
    p.probs.assign(N, 0.0);
    if (n_th == 0.0) {
        p.probs[0] = 1.0;
        return p;
    }
    const double q = n_th / (1.0 + n_th);
    double v = 1.0 / (1.0 + n_th);
    for (int n = 0; n < N; ++n, v *= q) p.probs[n] = v;
    p.mass_deficit = std::pow(q, N);  // analytic geometric tail
    return p;
}

PopulationState two_point_population(double n_th, int n1, const TruncationPolicy& policy) {
    if (n1 < 1) throw std::invalid_argument("two_point_population: n1 must be positive");
    if (static_cast<double>(n1) < n_th)
        throw std::invalid_argument("two_point_population: n1 < n_th gives weight p > 1");
    if (n1 >= policy.n_max_cap)
        throw std::domain_error("two_point_population: n1 exceeds truncation cap");
    const double p = n_th / static_cast<double>(n1);
    PopulationState out;
    out.probs.assign(std::max(policy.n_min, n1 + 1), 0.0);
    out.probs[0] = 1.0 - p;
    out.probs[n1] = p;
    return out;
}

PopulationState fock_population(int n, const TruncationPolicy& policy) {
    if (n < 0) throw std::invalid_argument("fock_population: n must be nonnegative");
    if (n >= policy.n_max_cap)
        throw std::domain_error("fock_population: n exceeds truncation cap");
    PopulationState out;
    out.probs.assign(std::max(policy.n_min, n + 1), 0.0);
    out.probs[n] = 1.0;
    return out;
}

PopulationState power_law_population(const TruncationPolicy& policy) {
    const int N = policy.n_max_cap;
    PopulationState out;
    out.probs.resize(N);
    double mass = 0.0;
    for (int n = 0; n < N; ++n) {
        out.probs[n] = 1.0 / ((1.0 + n) * (1.0 + n));
        mass += out.probs[n];
    }
    for (auto& v : out.probs) v /= mass;  // renormalize after truncation
    out.finite_moments = false;           // untruncated law has no finite moments
    return out;
}

PopulationState explicit_population(std::vector<double> probs, const TruncationPolicy& policy) {
    if (probs.empty()) throw std::invalid_argument("explicit_population: empty vector");
    double mass = 0.0;
    for (auto& v : probs) {
        if (v < -kNegativeSlack)
            throw std::invalid_argument("explicit_population: negative entry beyond slack");
        if (v < 0.0) v = 0.0;
        mass += v;
    }
    if (!(mass > 0.0)) throw std::invalid_argument("explicit_population: zero mass");
    for (auto& v : probs) v /= mass;
    PopulationState out;
    out.probs = std::move(probs);
    if (out.size() < policy.n_min) out.probs.resize(policy.n_min, 0.0);
    return out;
}

DensityState pure_superposition_state(double n_th, int n1, const TruncationPolicy& policy) {
    if (n1 < 1) throw std::invalid_argument("pure_superposition_state: n1 must be positive");
    const double p = n_th / static_cast<double>(n1);
    if (!(p < 1.0))
        throw std::invalid_argument("pure_superposition_state: requires p = n_th/n1 < 1");
    if (n1 >= policy.n_max_cap)
        throw std::domain_error("pure_superposition_state: n1 exceeds truncation cap");
    DensityState rho;
    const int N = std::max(policy.n_min, n1 + 1);
    rho.diag.probs.assign(N, 0.0);
    rho.diag.probs[0] = 1.0 - p;
    rho.diag.probs[n1] = p;
    CoherenceBand b;
    b.s = n1;
    b.amps.assign(N, 0.0);
    b.amps[0] = std::sqrt(p * (1.0 - p));
    rho.bands.push_back(std::move(b));
    return rho;
}

DensityState density_from_population(PopulationState diag) {
    DensityState rho;
    rho.diag = std::move(diag);
    return rho;
}

PopulationState pad_to(const PopulationState& p, int N) {
    PopulationState out = p;
    if (out.size() < N) out.probs.resize(N, 0.0);
    return out;
}

DensityState pad_to(const DensityState& rho, int N) {
    DensityState out;
    out.diag = pad_to(rho.diag, N);
    for (const auto& b : rho.bands) {
        CoherenceBand nb;
        nb.s = b.s;
        nb.amps = b.amps;
        if (static_cast<int>(nb.amps.size()) < N) nb.amps.resize(N, 0.0);
        out.bands.push_back(std::move(nb));
    }
    return out;
}

}  // namespace mpemba
