#include "mpemba/generator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mpemba {

double TridiagonalGenerator::inf_norm() const {
    const int N = size();
    double worst = 0.0;
    for (int n = 0; n < N; ++n) {
        double row = std::abs(diag[n]);
        if (n + 1 < N) row += std::abs(upper[n]);
        if (n > 0) row += std::abs(lower[n - 1]);
        worst = std::max(worst, row);
    }
    return worst;
}

TridiagonalGenerator population_generator(const BathParams& params, int N, Boundary boundary) {
    if (N < 2) throw std::invalid_argument("population_generator: N must be at least 2");
    const double wu = params.absorption_rate();
    const double wd = params.emission_rate();
    TridiagonalGenerator g;
    g.diag.resize(N);
    g.upper.resize(N - 1);
    g.lower.resize(N - 1);
    for (int n = 0; n < N; ++n) g.diag[n] = -(wu * (n + 1) + wd * n);
    for (int n = 0; n < N - 1; ++n) {
        g.upper[n] = wd * (n + 1);  // emission from n+1 feeds n
        g.lower[n] = wu * (n + 1);  // absorption from n feeds n+1
    }
    g.boundary = boundary;
    if (boundary == Boundary::reflecting) {
        g.diag[N - 1] = -wd * (N - 1);  // no upward loss from the last site
        g.truncated_outflow = 0.0;
    } else {
        g.truncated_outflow = wu * N;
    }
    return g;
}

TridiagonalGenerator coherence_generator(const BathParams& params, int s, int N) {
    if (s < 1)
        throw std::invalid_argument("coherence_generator: band offset s must be >= 1; "
                                    "populations use population_generator");
    if (N < 2) throw std::invalid_argument("coherence_generator: N must be at least 2");
    const double g2 = 2.0 * params.gamma;
    const double nth = params.n_th;
    TridiagonalGenerator g;
    g.diag.resize(N);
    g.upper.resize(N - 1);
    g.lower.resize(N - 1);
    for (int n = 0; n < N; ++n)
        g.diag[n] = -g2 * (n * (1.0 + 2.0 * nth) + nth + 0.5 * s * (2.0 * nth + 1.0));
    for (int n = 0; n < N - 1; ++n) {
        g.upper[n] = g2 * (1.0 + nth) * (n + 1);
        g.lower[n] = g2 * nth * (n + 1 + s);
    }
    g.band_offset = s;
    g.phase_rate = params.omega0 * s;
    g.truncated_outflow = g2 * nth * (N + s);
    return g;
}

SymmetrizedGenerator symmetrize(const TridiagonalGenerator& gen) {
    const int N = gen.size();
    SymmetrizedGenerator sym;
    sym.diag = gen.diag;
    sym.offdiag.resize(N - 1);
    sym.log_scale.assign(N, 0.0);
    for (int n = 0; n < N - 1; ++n) {
        const double prod = gen.upper[n] * gen.lower[n];
        if (!(prod > 0.0))
            throw std::domain_error("symmetrize: zero coupling product at site " +
                                    std::to_string(n));
        sym.offdiag[n] = std::sqrt(prod);
        // U G U^{-1} symmetric requires (U_{n+1}/U_n)^2 = upper[n]/lower[n]
        sym.log_scale[n + 1] = sym.log_scale[n] + 0.5 * std::log(gen.upper[n] / gen.lower[n]);
    }
    return sym;
}

}  // namespace mpemba
