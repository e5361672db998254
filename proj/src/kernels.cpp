#include "mpemba/kernels.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mpemba {
namespace kernels {

namespace {

template <class Scalar>
void tridiag_apply_impl(const TridiagonalGenerator& g, std::span<const Scalar> x,
                        std::span<Scalar> y, Exec exec) {
    const int N = g.size();
    if (static_cast<int>(x.size()) != N || static_cast<int>(y.size()) != N)
        throw std::invalid_argument("tridiag_apply: size mismatch");
    const double* d = g.diag.data();
    const double* u = g.upper.data();
    const double* l = g.lower.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::parallel && N > 2048)
#endif
    for (int n = 0; n < N; ++n) {
        Scalar acc = d[n] * x[n];
        if (n + 1 < N) acc += u[n] * x[n + 1];
        if (n > 0) acc += l[n - 1] * x[n - 1];
        y[n] = acc;
    }
#ifndef _OPENMP
    (void)exec;
#endif
}

template <class Scalar>
void project_impl(std::span<const double> V, int n, std::span<const Scalar> w,
                  std::span<Scalar> a, Exec exec) {
    if (V.size() < static_cast<size_t>(n) * n || static_cast<int>(w.size()) != n ||
        static_cast<int>(a.size()) != n)
        throw std::invalid_argument("project_onto_basis: size mismatch");
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
#endif
    for (int k = 0; k < n; ++k) {
        const double* col = V.data() + static_cast<size_t>(k) * n;
        Scalar acc{};
        for (int i = 0; i < n; ++i) acc += col[i] * w[i];
        a[k] = acc;
    }
#ifndef _OPENMP
    (void)exec;
#endif
}

// One sample: y = V * (a .* exp(lambda t)). Column sweep keeps the V access
// contiguous; per-sample work is independent, so samples parallelize cleanly.
template <class Scalar>
void sample_impl(std::span<const double> V, int n, std::span<const double> lambda,
                 std::span<const Scalar> a, double t, std::vector<Scalar>& y) {
    y.assign(n, Scalar{});
    for (int k = 0; k < n; ++k) {
        const Scalar zk = a[k] * std::exp(lambda[k] * t);
        if (zk == Scalar{}) continue;
        const double* col = V.data() + static_cast<size_t>(k) * n;
        for (int i = 0; i < n; ++i) y[i] += col[i] * zk;
    }
}

template <class Scalar>
void propagate_impl(std::span<const double> V, int n, std::span<const double> lambda,
                    std::span<const Scalar> a, std::span<const double> times,
                    std::vector<std::vector<Scalar>>& out, Exec exec) {
    const int T = static_cast<int>(times.size());
    if (static_cast<int>(out.size()) != T)
        throw std::invalid_argument("propagate_in_basis: output size mismatch");
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
#endif
    for (int j = 0; j < T; ++j) sample_impl(V, n, lambda, a, times[j], out[j]);
#ifndef _OPENMP
    (void)exec;
#endif
}

}  // namespace

void tridiag_apply(const TridiagonalGenerator& g, std::span<const double> x,
                   std::span<double> y, Exec exec) {
    tridiag_apply_impl(g, x, y, exec);
}
void tridiag_apply(const TridiagonalGenerator& g, std::span<const std::complex<double>> x,
                   std::span<std::complex<double>> y, Exec exec) {
    tridiag_apply_impl(g, x, y, exec);
}

void project_onto_basis(std::span<const double> V, int n, std::span<const double> w,
                        std::span<double> a, Exec exec) {
    project_impl(V, n, w, a, exec);
}
void project_onto_basis(std::span<const double> V, int n,
                        std::span<const std::complex<double>> w,
                        std::span<std::complex<double>> a, Exec exec) {
    project_impl(V, n, w, a, exec);
}

void propagate_in_basis(std::span<const double> V, int n, std::span<const double> lambda,
                        std::span<const double> a, std::span<const double> times,
                        std::vector<std::vector<double>>& out, Exec exec) {
    propagate_impl(V, n, lambda, a, times, out, exec);
}
void propagate_in_basis(std::span<const double> V, int n, std::span<const double> lambda,
                        std::span<const std::complex<double>> a, std::span<const double> times,
                        std::vector<std::vector<std::complex<double>>>& out, Exec exec) {
    propagate_impl(V, n, lambda, a, times, out, exec);
}

}  // namespace kernels
}  // namespace mpemba
