#include "mpemba/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mpemba/eig.hpp"

namespace mpemba {

namespace {

constexpr int kMaxMomentOrder = 20;

// Pascal triangle, exact in double up to the orders used here.
std::vector<std::vector<double>> binomial_table(int rows) {
    std::vector<std::vector<double>> C(rows + 1);
    for (int i = 0; i <= rows; ++i) {
        C[i].assign(i + 1, 1.0);
        for (int j = 1; j < i; ++j) C[i][j] = C[i - 1][j - 1] + C[i - 1][j];
    }
    return C;
}

// Stirling numbers of the second kind times k!, exact 128-bit integers.
std::vector<std::vector<unsigned __int128>> weighted_stirling(int l_max) {
    std::vector<std::vector<unsigned __int128>> S(l_max + 1);
    S[0] = {1};
    for (int l = 1; l <= l_max; ++l) {
        S[l].assign(l + 1, 0);
        // T(l,k) = k! S(l,k) obeys T(l,k) = k (T(l-1,k) + T(l-1,k-1))
        for (int k = 1; k <= l; ++k) {
            unsigned __int128 prev = (k <= l - 1) ? S[l - 1][k] : 0;
            unsigned __int128 prev2 = S[l - 1][k - 1];
            S[l][k] = static_cast<unsigned __int128>(k) * (prev + prev2);
        }
    }
    return S;
}

void check_l_max(int l_max, const char* where) {
    if (l_max < 0 || l_max > kMaxMomentOrder)
        throw std::invalid_argument(std::string(where) + ": l_max out of range [0, " +
                                    std::to_string(kMaxMomentOrder) + "]");
}

// Drive coefficient of Q_k in the equation for Q_l (population hierarchy).
double population_drive(int l, int k, double n_th, const std::vector<std::vector<double>>& C) {
    const double sign = ((l - k - 1) % 2 == 0) ? 1.0 : -1.0;
    return sign * (1.0 + n_th) * C[l][k - 1] + n_th * C[l + 1][k];
}

// Lawson-Hanson nonnegative least squares on a small dense system.
// A is row-major rows x cols.
std::vector<double> nnls(const std::vector<double>& A, int rows, int cols,
                         const std::vector<double>& b) {
    std::vector<double> x(cols, 0.0);
    std::vector<bool> passive(cols, false);
    std::vector<double> w(cols), resid(rows);

    auto residual = [&] {
        for (int i = 0; i < rows; ++i) {
            double acc = b[i];
            for (int j = 0; j < cols; ++j) acc -= A[i * cols + j] * x[j];
            resid[i] = acc;
        }
    };
    auto gradient = [&] {
        for (int j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (int i = 0; i < rows; ++i) acc += A[i * cols + j] * resid[i];
            w[j] = acc;
        }
    };
    // least-squares solve restricted to the passive set
    auto solve_passive = [&](std::vector<double>& z) {
        std::vector<int> idx;
        for (int j = 0; j < cols; ++j)
            if (passive[j]) idx.push_back(j);
        std::vector<double> Ap(static_cast<size_t>(rows) * idx.size());
        for (size_t c = 0; c < idx.size(); ++c)
            for (int i = 0; i < rows; ++i) Ap[c * rows + i] = A[i * cols + idx[c]];
        auto zp = least_squares(rows, static_cast<int>(idx.size()), std::move(Ap),
                                std::vector<double>(b.begin(), b.begin() + rows));
        z.assign(cols, 0.0);
        for (size_t c = 0; c < idx.size(); ++c) z[idx[c]] = zp[c];
        return idx;
    };

    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    const double tol = 1e-11 * scale;

    for (int outer = 0; outer < 3 * cols + 10; ++outer) {
        residual();
        gradient();
        int best = -1;
        double best_w = tol;
        for (int j = 0; j < cols; ++j)
            if (!passive[j] && w[j] > best_w) {
                best_w = w[j];
                best = j;
            }
        if (best < 0) break;
        passive[best] = true;

        std::vector<double> z;
        for (int inner = 0; inner < 3 * cols + 10; ++inner) {
            auto idx = solve_passive(z);
            bool feasible = true;
            for (int j : idx)
                if (z[j] <= 0.0) feasible = false;
            if (feasible) {
                x = z;
                break;
            }
            double alpha = 1.0;
            for (int j : idx)
                if (z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
            for (int j : idx) x[j] += alpha * (z[j] - x[j]);
            for (int j : idx)
                if (x[j] <= 1e-14 * scale) {
                    x[j] = 0.0;
                    passive[j] = false;
                }
        }
    }
    return x;
}

}  // namespace

std::vector<double> population_moments(const PopulationState& P, int l_max) {
    check_l_max(l_max, "population_moments");
    std::vector<double> Q(l_max + 1, 0.0);
    for (int n = 0; n < P.size(); ++n) {
        if (P.probs[n] == 0.0) continue;
        double w = P.probs[n];
        Q[0] += w;
        for (int l = 1; l <= l_max; ++l) {
            w *= n;
            Q[l] += w;
        }
    }
    return Q;
}

std::vector<double> stationary_moments(double n_th, int l_max) {
    check_l_max(l_max, "stationary_moments");
    if (!(n_th >= 0.0)) throw std::invalid_argument("stationary_moments: n_th >= 0");
    static const auto S = weighted_stirling(kMaxMomentOrder);
    std::vector<double> Q(l_max + 1, 0.0);
    Q[0] = 1.0;
    for (int l = 1; l <= l_max; ++l) {
        // sum_k k! S(l,k) n_th^k, all terms positive
        double acc = 0.0;
        for (int k = l; k >= 1; --k) acc = acc * n_th + static_cast<double>(S[l][k]);
        Q[l] = acc * n_th;
    }
    return Q;
}

std::vector<double> stationary_moments_recursion(double n_th, int l_max) {
    check_l_max(l_max, "stationary_moments_recursion");
    static const auto C = binomial_table(kMaxMomentOrder + 1);
    std::vector<double> Q(l_max + 1, 0.0);
    Q[0] = 1.0;
    for (int l = 1; l <= l_max; ++l) {
        double acc = n_th;
        for (int k = 1; k < l; ++k) acc += population_drive(l, k, n_th, C) * Q[k];
        Q[l] = acc / l;
    }
    return Q;
}

std::vector<std::vector<double>> evolve_population_moments(const std::vector<double>& Q0,
                                                           double n_th, double gamma,
                                                           const TimeGrid& grid) {
    const int l_max = static_cast<int>(Q0.size()) - 1;
    check_l_max(l_max, "evolve_population_moments");
    static const auto C = binomial_table(kMaxMomentOrder + 1);

    // coef[l][j]: coefficient of exp(-2 gamma j t) in Q_l(t)
    std::vector<std::vector<double>> coef(l_max + 1);
    coef[0] = {Q0.empty() ? 1.0 : Q0[0]};
    for (int l = 1; l <= l_max; ++l) {
        std::vector<double> drive(l, 0.0);  // drive[j], j = 0..l-1
        drive[0] = n_th * coef[0][0];
        for (int k = 1; k < l; ++k) {
            const double a = population_drive(l, k, n_th, C);
            for (int j = 0; j <= k; ++j) drive[j] += a * coef[k][j];
        }
        coef[l].assign(l + 1, 0.0);
        double partial = 0.0;
        for (int j = 0; j < l; ++j) {
            coef[l][j] = drive[j] / (l - j);
            partial += coef[l][j];
        }
        coef[l][l] = Q0[l] - partial;
    }

    std::vector<std::vector<double>> out(grid.size(), std::vector<double>(l_max + 1));
    for (int k = 0; k < grid.size(); ++k) {
        const double t = grid.times[k];
        for (int l = 0; l <= l_max; ++l) {
            double acc = 0.0;
            for (int j = l; j >= 0; --j) acc += coef[l][j] * std::exp(-2.0 * gamma * j * t);
            out[k][l] = acc;
        }
    }
    return out;
}

std::vector<std::complex<double>> coherence_moments(const DensityState& rho, int s, int l_max) {
    check_l_max(l_max, "coherence_moments");
    if (s < 1) throw std::invalid_argument("coherence_moments: s >= 1");
    std::vector<std::complex<double>> Q(l_max + 1, 0.0);
    const CoherenceBand* band = rho.band(s);
    if (band == nullptr) return Q;  // absent band: all moments vanish
    for (int n = 0; n < static_cast<int>(band->amps.size()); ++n) {
        if (band->amps[n] == std::complex<double>{}) continue;
        const double logw = 0.5 * (std::lgamma(n + s + 1.0) - std::lgamma(n + 1.0));
        std::complex<double> w = band->amps[n] * std::exp(logw);
        Q[0] += w;
        for (int l = 1; l <= l_max; ++l) {
            w *= static_cast<double>(n);
            Q[l] += w;
        }
    }
    return Q;
}

std::vector<std::vector<std::complex<double>>> evolve_coherence_moments(
    const std::vector<std::complex<double>>& Q0, int s, double n_th, double gamma,
    const TimeGrid& grid) {
    const int l_max = static_cast<int>(Q0.size()) - 1;
    check_l_max(l_max, "evolve_coherence_moments");
    if (s < 1) throw std::invalid_argument("evolve_coherence_moments: s >= 1");
    static const auto C = binomial_table(kMaxMomentOrder + 1);

    using cd = std::complex<double>;
    // coef[l][j]: coefficient of exp(-2 gamma (j + s/2) t) in Q_l^(s)(t)
    std::vector<std::vector<cd>> coef(l_max + 1);
    coef[0] = {Q0[0]};
    for (int l = 1; l <= l_max; ++l) {
        std::vector<cd> drive(l, 0.0);
        for (int k = 0; k < l; ++k) {
            double a = (1.0 + s) * n_th * C[l][k];
            if (k >= 1) {
                const double sign = ((l - k - 1) % 2 == 0) ? 1.0 : -1.0;
                a += (sign * (1.0 + n_th) + n_th) * C[l][k - 1];
            }
            for (int j = 0; j <= k; ++j) drive[j] += a * coef[k][j];
        }
        coef[l].assign(l + 1, 0.0);
        cd partial = 0.0;
        for (int j = 0; j < l; ++j) {
            coef[l][j] = drive[j] / static_cast<double>(l - j);
            partial += coef[l][j];
        }
        coef[l][l] = Q0[l] - partial;
    }

    std::vector<std::vector<cd>> out(grid.size(), std::vector<cd>(l_max + 1));
    for (int k = 0; k < grid.size(); ++k) {
        const double t = grid.times[k];
        for (int l = 0; l <= l_max; ++l) {
            cd acc = 0.0;
            for (int j = l; j >= 0; --j)
                acc += coef[l][j] * std::exp(-2.0 * gamma * (j + 0.5 * s) * t);
            out[k][l] = acc;
        }
    }
    return out;
}

int matched_moment_order(const PopulationState& P, double n_th, int r_max, double rel_tol) {
    check_l_max(r_max, "matched_moment_order");
    const auto Q = population_moments(P, r_max);
    const auto QS = stationary_moments(n_th, r_max);
    for (int l = 1; l <= r_max; ++l)
        if (std::abs(Q[l] - QS[l]) > rel_tol * std::max(std::abs(QS[l]), 1.0)) return l - 1;
    return r_max;
}

AccelerationOrder acceleration_order(const DensityState& rho0, const BathParams& params,
                                     int h_max, double rel_tol) {
    if (h_max < 1) throw std::invalid_argument("acceleration_order: h_max >= 1");
    if (!rho0.diag.finite_moments)
        throw std::domain_error("acceleration_order: state has no finite moments; "
                                "the matching conditions cannot be met");

    const int l_cap = std::min(h_max / 2 + 1, kMaxMomentOrder);
    const auto Q = population_moments(rho0.diag, l_cap);
    const auto QS = stationary_moments(params.n_th, l_cap);

    // population scale for the relative test; band moments compare against the
    // same-order absolute-value sum
    auto population_ok = [&](int l) {
        return std::abs(Q[l] - QS[l]) <= rel_tol * std::max(std::abs(QS[l]), 1.0);
    };

    std::vector<std::vector<double>> band_scale;  // |amps| moment sums per band
    std::vector<std::vector<std::complex<double>>> band_Q;
    for (const auto& band : rho0.bands) {
        const int lb = std::max(0, (h_max - band.s - 1) / 2);
        band_Q.push_back(coherence_moments(rho0, band.s, std::min(lb, kMaxMomentOrder)));
        DensityState absd;
        absd.diag = rho0.diag;
        CoherenceBand ab;
        ab.s = band.s;
        ab.amps.resize(band.amps.size());
        for (size_t i = 0; i < band.amps.size(); ++i) ab.amps[i] = std::abs(band.amps[i]);
        absd.bands.push_back(std::move(ab));
        std::vector<double> scale;
        for (const auto& v : coherence_moments(absd, band.s, std::min(lb, kMaxMomentOrder)))
            scale.push_back(v.real());
        band_scale.push_back(std::move(scale));
    }

    auto condition_holds = [&](int l, int s) {
        if (s == 0) return l <= l_cap && population_ok(l);
        for (size_t bi = 0; bi < rho0.bands.size(); ++bi) {
            if (rho0.bands[bi].s != s) continue;
            if (l >= static_cast<int>(band_Q[bi].size())) return false;
            return std::abs(band_Q[bi][l]) <= rel_tol * std::max(band_scale[bi][l], 1.0);
        }
        return true;  // band absent: moments vanish identically
    };

    int h = 1;
    for (; h <= h_max; ++h) {
        // h is admissible when every (l, s) with 2l + s < h, l + s > 0 holds;
        // incrementally this means checking the new conditions at 2l + s == h - 1
        bool ok = true;
        for (int s = 0; s <= h - 1 && ok; ++s) {
            const int rem = h - 1 - s;
            if (rem % 2 != 0) continue;
            const int l = rem / 2;
            if (l + s == 0) continue;
            ok = condition_holds(l, s);
        }
        if (!ok) break;
    }
    AccelerationOrder out;
    out.h = h - 1 < 1 ? 1 : h - 1;
    out.rate = params.gamma * out.h;
    return out;
}

PopulationState construct_matched_state(double n_th, int r, const std::vector<int>& support,
                                        const TruncationPolicy& policy) {
    if (r < 1) throw std::invalid_argument("construct_matched_state: r >= 1");
    check_l_max(r + 1, "construct_matched_state");
    if (support.empty())
        throw std::invalid_argument("construct_matched_state: empty support");
    for (int n : support)
        if (n < 0 || n >= policy.n_max_cap)
            throw std::invalid_argument("construct_matched_state: support point out of range");

    const auto QS = stationary_moments(n_th, r);
    const int m = static_cast<int>(support.size());
    std::vector<double> weights(m, 0.0);

    if (m == 2 && support[0] == 0 && r == 1) {
        // two-point closed form: p at n1 with p = n_th / n1
        const double p = n_th / support[1];
        if (p > 1.0) throw std::domain_error("construct_matched_state: infeasible support");
        weights[0] = 1.0 - p;
        weights[1] = p;
    } else {
        std::vector<double> A((r + 1) * m);  // row-major (r+1) x m Vandermonde in the nodes
        for (int l = 0; l <= r; ++l)
            for (int j = 0; j < m; ++j)
                A[l * m + j] = std::pow(static_cast<double>(support[j]), l);
        weights = nnls(A, r + 1, m, QS);
        // feasibility: the residual must vanish, not merely be minimal
        double resid = 0.0, scale = 0.0;
        for (int l = 0; l <= r; ++l) {
            double acc = 0.0;
            for (int j = 0; j < m; ++j) acc += A[l * m + j] * weights[j];
            resid = std::max(resid, std::abs(acc - QS[l]));
            scale = std::max(scale, std::abs(QS[l]));
        }
        if (resid > 1e-9 * std::max(scale, 1.0))
            throw std::domain_error("construct_matched_state: no nonnegative weights match "
                                    "the first " + std::to_string(r) + " moments");
    }

    int top = *std::max_element(support.begin(), support.end());
    PopulationState out;
    out.probs.assign(std::max(policy.n_min, top + 1), 0.0);
    for (int j = 0; j < m; ++j) out.probs[support[j]] = weights[j];
    return out;
}

}  // namespace mpemba
