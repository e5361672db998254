#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpemba/generator.hpp"
#include "mpemba/kernels.hpp"

namespace mpemba {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    long max_steps = 200'000'000;
    kernels::Exec exec = kernels::Exec::serial;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

/// Dormand-Prince 5(4) embedded pair, integrating dy/dt = G y segment by
/// segment so every sample time is hit exactly. The first-same-as-last stage
/// carries between accepted steps.
template <class Scalar>
class DormandPrince {
  public:
    DormandPrince(const TridiagonalGenerator& gen, const OdeOptions& opts)
        : gen_(gen), opts_(opts), n_(gen.size()) {
        for (auto& stage : k_) stage.resize(n_);
        ytmp_.resize(n_);
        ynew_.resize(n_);
        // explicit stability bound from the Gershgorin radius of the generator
        h_stab_ = 3.2 / std::max(gen.inf_norm(), 1e-30);
    }

    /// Advance y in place from t0 to t1.
    void advance(std::vector<Scalar>& y, double t0, double t1) {
        if (t1 <= t0) return;
        double t = t0;
        double h = h_prev_ > 0 ? std::min(h_prev_, h_stab_) : h_stab_;
        rhs(y, k_[0]);
        while (t < t1) {
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw std::runtime_error("ode: step size underflow");
            const bool clipped = t + h >= t1;
            const double h_try = clipped ? (t1 - t) : h;
            const double err = step(y, h_try);
            if (++steps_ > opts_.max_steps) throw std::runtime_error("ode: step budget exceeded");
            if (err <= 1.0) {
                y.swap(ynew_);
                k_[0].swap(k_[6]);  // FSAL
                t = clipped ? t1 : t + h_try;
            }
            // keep the controller step when a short clipped step succeeds
            if (!(clipped && err <= 1.0)) {
                const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                h = std::min(h_try * std::clamp(grow, 0.2, 5.0), h_stab_);
            }
        }
        h_prev_ = h;
    }

  private:
    void rhs(const std::vector<Scalar>& y, std::vector<Scalar>& out) {
        kernels::tridiag_apply(gen_, std::span<const Scalar>(y), std::span<Scalar>(out),
                               opts_.exec);
    }

    // Returns the scaled error estimate of one trial step of size h.
    double step(const std::vector<Scalar>& y, double h) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        const auto& k1 = k_[0];
        for (int i = 0; i < n_; ++i) ytmp_[i] = y[i] + h * (a21 * k1[i]);
        rhs(ytmp_, k_[1]);
        for (int i = 0; i < n_; ++i) ytmp_[i] = y[i] + h * (a31 * k1[i] + a32 * k_[1][i]);
        rhs(ytmp_, k_[2]);
        for (int i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a41 * k1[i] + a42 * k_[1][i] + a43 * k_[2][i]);
        rhs(ytmp_, k_[3]);
        for (int i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a51 * k1[i] + a52 * k_[1][i] + a53 * k_[2][i] + a54 * k_[3][i]);
        rhs(ytmp_, k_[4]);
        for (int i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a61 * k1[i] + a62 * k_[1][i] + a63 * k_[2][i] +
                                   a64 * k_[3][i] + a65 * k_[4][i]);
        rhs(ytmp_, k_[5]);
        for (int i = 0; i < n_; ++i)
            ynew_[i] = y[i] + h * (b1 * k1[i] + b3 * k_[2][i] + b4 * k_[3][i] + b5 * k_[4][i] +
                                   b6 * k_[5][i]);
        rhs(ynew_, k_[6]);
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            const Scalar err = h * (e1 * k1[i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                                    e6 * k_[5][i] + e7 * k_[6][i]);
            const double scale =
                opts_.abs_tol +
                opts_.rel_tol * std::max(magnitude(y[i]), magnitude(ynew_[i]));
            const double r = magnitude(err) / scale;
            acc += r * r;
        }
        return std::sqrt(acc / n_);
    }

    const TridiagonalGenerator& gen_;
    OdeOptions opts_;
    int n_;
    double h_stab_ = 0.0;
    double h_prev_ = 0.0;
    long steps_ = 0;
    std::vector<Scalar> k_[7];
    std::vector<Scalar> ytmp_, ynew_;
};

}  // namespace detail

/// Integrate dy/dt = G y, returning y at each requested time (times must be
/// nondecreasing; times[0] may be > 0).
template <class Scalar>
std::vector<std::vector<Scalar>> integrate_tridiagonal(const TridiagonalGenerator& gen,
                                                       const std::vector<Scalar>& y0,
                                                       std::span<const double> times,
                                                       const OdeOptions& opts = {}) {
    if (static_cast<int>(y0.size()) != gen.size())
        throw std::invalid_argument("integrate_tridiagonal: state/generator size mismatch");
    detail::DormandPrince<Scalar> stepper(gen, opts);
    std::vector<std::vector<Scalar>> out;
    out.reserve(times.size());
    std::vector<Scalar> y = y0;
    double t = 0.0;
    for (double ts : times) {
        if (ts < t) throw std::invalid_argument("integrate_tridiagonal: times must increase");
        if (ts > t) {
            stepper.advance(y, t, ts);
            t = ts;
        }
        out.push_back(y);
    }
    return out;
}

}  // namespace mpemba
