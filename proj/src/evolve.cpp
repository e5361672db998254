#include "mpemba/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mpemba/eig.hpp"
#include "mpemba/ode.hpp"

namespace mpemba {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double log_magnitude(double v) { return std::log(std::abs(v)); }
double log_magnitude(const std::complex<double>& v) { return std::log(std::abs(v)); }

double rescale(double v, double mag) { return v < 0.0 ? -mag : mag; }
std::complex<double> rescale(const std::complex<double>& v, double mag) {
    return v / std::abs(v) * mag;
}

/// Largest log of |x_n| * scale_n over the support; -inf when x = 0.
template <class Scalar>
double similarity_shift(const std::vector<Scalar>& x, const std::vector<double>& log_scale) {
    double shift = -std::numeric_limits<double>::infinity();
    for (size_t n = 0; n < x.size(); ++n)
        if (x[n] != Scalar{}) shift = std::max(shift, log_scale[n] + log_magnitude(x[n]));
    return shift;
}

void check_grid(const TimeGrid& grid) {
    if (grid.times.empty()) throw std::invalid_argument("propagate: empty time grid");
    if (grid.times.front() < 0.0) throw std::invalid_argument("propagate: negative start time");
    for (size_t k = 1; k < grid.times.size(); ++k)
        if (!(grid.times[k] > grid.times[k - 1]))
            throw std::invalid_argument("propagate: times must be strictly increasing");
}

}  // namespace

TimeGrid TimeGrid::uniform(double t_end, int samples, double t_start) {
    if (samples < 2 || !(t_end > t_start))
        throw std::invalid_argument("TimeGrid::uniform: need t_end > t_start and >= 2 samples");
    TimeGrid g;
    g.times.resize(samples);
    const double dt = (t_end - t_start) / (samples - 1);
    for (int k = 0; k < samples; ++k) g.times[k] = t_start + dt * k;
    g.times.back() = t_end;
    return g;
}

struct PopulationPropagator::Impl {
    TridiagonalGenerator gen;
    PropagationOptions opts;
    // built on first spectral use; absent when the chain cannot be symmetrized
    mutable bool plan_tried = false;
    mutable std::string plan_error;
    mutable SymmetrizedGenerator sym;
    mutable TridiagEigen eig;

    bool ensure_plan() const {
        if (!plan_tried) {
            plan_tried = true;
            try {
                sym = symmetrize(gen);
                eig = tridiagonal_eigensystem(sym.diag, sym.offdiag);
            } catch (const std::exception& e) {
                plan_error = e.what();
            }
        }
        return plan_error.empty();
    }

    /// Spectral route for one vector through the eigenbasis of the symmetrized
    /// generator. Transforms in and out of the scaled gauge run entrywise in
    /// the log domain so the geometric similarity never overflows.
    template <class Scalar>
    std::vector<std::vector<Scalar>> spectral_samples(const std::vector<Scalar>& x0, double shift,
                                                      std::span<const double> times) const {
        const int N = eig.n;
        std::vector<Scalar> w(N, Scalar{});
        for (int n = 0; n < N; ++n)
            if (x0[n] != Scalar{})
                w[n] = rescale(x0[n], std::exp(sym.log_scale[n] + log_magnitude(x0[n]) - shift));
        std::vector<Scalar> a(N);
        kernels::project_onto_basis(eig.vectors, N, std::span<const Scalar>(w),
                                    std::span<Scalar>(a), opts.exec);
        std::vector<std::vector<Scalar>> out(times.size());
        kernels::propagate_in_basis(eig.vectors, N, eig.values, std::span<const Scalar>(a), times,
                                    out, opts.exec);
        for (auto& y : out)
            for (int n = 0; n < N; ++n) {
                if (y[n] == Scalar{}) continue;
                y[n] = rescale(y[n], std::exp(log_magnitude(y[n]) - sym.log_scale[n] + shift));
            }
        return out;
    }

    /// Roundoff from the scaled gauge lands at the foot of the scale ladder;
    /// refuse the spectral route when eps * e^span would exceed the mass
    /// tolerance.
    template <class Scalar>
    std::string spectral_objection(const std::vector<Scalar>& x0, double* shift_out) const {
        const double shift = similarity_shift(x0, sym.log_scale);
        *shift_out = shift;
        if (!std::isfinite(shift)) return {};  // zero vector: any route
        const double foot = *std::min_element(sym.log_scale.begin(), sym.log_scale.end());
        const double budget =
            std::log(opts.tail_tol / kEps) - 0.5 * std::log(static_cast<double>(sym.size()));
        if (shift - foot > budget)
            return "similarity scaling spans " + std::to_string(shift - foot) +
                   " nats over the state support; roundoff would exceed the mass tolerance";
        return {};
    }

    template <class Scalar>
    std::vector<std::vector<Scalar>> run_vector(const std::vector<Scalar>& x0,
                                                const TimeGrid& grid, Method method, Method* used,
                                                std::string* reason) const {
        *used = method;
        if (method == Method::spectral) {
            if (!ensure_plan()) {
                *used = Method::ode;
                *reason = plan_error;
            } else {
                double shift = 0.0;
                std::string objection = spectral_objection(x0, &shift);
                if (objection.empty()) return spectral_samples(x0, shift, grid.times);
                *used = Method::ode;
                *reason = objection;
            }
        }
        OdeOptions ode_opts;
        ode_opts.rel_tol = opts.rel_tol;
        ode_opts.abs_tol = opts.abs_tol;
        ode_opts.exec = opts.exec;
        return integrate_tridiagonal(gen, x0, grid.times, ode_opts);
    }
};

PopulationPropagator::PopulationPropagator(TridiagonalGenerator gen, PropagationOptions opts)
    : impl_(new Impl) {
    impl_->gen = std::move(gen);
    impl_->opts = opts;
}
PopulationPropagator::~PopulationPropagator() = default;
PopulationPropagator::PopulationPropagator(PopulationPropagator&&) noexcept = default;
PopulationPropagator& PopulationPropagator::operator=(PopulationPropagator&&) noexcept = default;

const TridiagonalGenerator& PopulationPropagator::generator() const { return impl_->gen; }

std::vector<std::vector<std::complex<double>>> PopulationPropagator::propagate_amplitudes(
    const std::vector<std::complex<double>>& b0, const TimeGrid& grid, Method method,
    Method* used, std::string* reason) const {
    check_grid(grid);
    if (static_cast<int>(b0.size()) != impl_->gen.size())
        throw std::invalid_argument("propagate_amplitudes: size mismatch");
    return impl_->run_vector(b0, grid, method, used, reason);
}

Trajectory PopulationPropagator::propagate(const PopulationState& P0, const TimeGrid& grid,
                                           Method method) const {
    check_grid(grid);
    if (impl_->gen.band_offset != 0)
        throw std::invalid_argument("propagate_population: generator has a band offset");
    if (P0.size() != impl_->gen.size())
        throw std::invalid_argument("propagate_population: state/generator size mismatch");

    Trajectory traj;
    traj.grid = grid;
    traj.requested = method;
    auto samples = impl_->run_vector(P0.probs, grid, method, &traj.used, &traj.fallback_reason);

    traj.states.reserve(samples.size());
    traj.mass_deficit.reserve(samples.size());
    for (auto& v : samples) {
        PopulationState s;
        s.probs = std::move(v);
        s.finite_moments = P0.finite_moments;
        s.mass_deficit = 1.0 - s.mass();
        traj.mass_deficit.push_back(s.mass_deficit);
        // no clipping or renormalization during evolution
        traj.states.push_back(std::move(s));
    }
    const double allowed = 10.0 * impl_->opts.tail_tol + std::abs(P0.mass_deficit);
    for (double d : traj.mass_deficit)
        if (std::abs(d) > allowed) traj.truncation_limited = true;
    return traj;
}

Trajectory propagate_population(const PopulationState& P0, const TridiagonalGenerator& gen,
                                const TimeGrid& grid, Method method,
                                const PropagationOptions& opts) {
    return PopulationPropagator(gen, opts).propagate(P0, grid, method);
}

DensityTrajectory propagate_density(const DensityState& rho0, const BathParams& params,
                                    const TimeGrid& grid, Method method,
                                    const PropagationOptions& opts) {
    check_grid(grid);
    const int N = rho0.size();
    DensityTrajectory traj;
    traj.grid = grid;

    PopulationPropagator diag_prop(population_generator(params, N), opts);
    Trajectory diag_traj = diag_prop.propagate(rho0.diag, grid, method);
    traj.used = diag_traj.used;
    traj.fallback_reason = diag_traj.fallback_reason;
    traj.mass_deficit = diag_traj.mass_deficit;
    traj.truncation_limited = diag_traj.truncation_limited;

    // per-band evolution in the factorial gauge: b_n = sqrt((n+s)!/n!) rho_{n,n+s}
    struct BandRun {
        int s;
        std::vector<std::vector<std::complex<double>>> samples;
    };
    std::vector<BandRun> band_runs;
    for (const auto& band : rho0.bands) {
        if (static_cast<int>(band.amps.size()) != N)
            throw std::invalid_argument("propagate_density: band length mismatch");
        auto gen = coherence_generator(params, band.s, N);
        std::vector<std::complex<double>> b0(N);
        for (int n = 0; n < N; ++n) {
            const double logw = 0.5 * (std::lgamma(n + band.s + 1.0) - std::lgamma(n + 1.0));
            b0[n] = band.amps[n] * std::exp(logw);
        }
        PopulationPropagator prop(std::move(gen), opts);
        Method used = method;
        std::string reason;
        BandRun run;
        run.s = band.s;
        run.samples = prop.propagate_amplitudes(b0, grid, method, &used, &reason);
        if (used == Method::ode && traj.fallback_reason.empty() && !reason.empty()) {
            traj.used = Method::ode;
            traj.fallback_reason = "band " + std::to_string(band.s) + ": " + reason;
        }
        band_runs.push_back(std::move(run));
    }

    traj.states.reserve(grid.size());
    for (int k = 0; k < grid.size(); ++k) {
        DensityState st;
        st.diag = diag_traj.states[k];
        const double t = grid.times[k];
        for (const auto& run : band_runs) {
            CoherenceBand b;
            b.s = run.s;
            b.amps.resize(N);
            const std::complex<double> phase =
                std::exp(std::complex<double>(0.0, params.omega0 * run.s * t));
            for (int n = 0; n < N; ++n) {
                const double logw = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(n + run.s + 1.0));
                b.amps[n] = run.samples[k][n] * std::exp(logw) * phase;
            }
            st.bands.push_back(std::move(b));
        }
        traj.states.push_back(std::move(st));
    }
    return traj;
}

}  // namespace mpemba
