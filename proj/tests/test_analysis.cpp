#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mpemba/analysis.hpp"
#include "mpemba/evolve.hpp"
#include "mpemba/generator.hpp"
#include "mpemba/states.hpp"

using namespace mpemba;

TEST_CASE("KL divergence closed values") {
    // thermal reference annihilates itself
    CHECK(kl_population(thermal_population(2.0), 2.0) == doctest::Approx(0.0).epsilon(1e-12));

    // frozen oracle: ln(3/4) + 3 ln(9/8) for thermal(3) against the bath at 2
    CHECK(kl_population(thermal_population(3.0), 2.0) ==
          doctest::Approx(0.065667034517369436).epsilon(1e-12));

    // Fock n = 2 against n_th = 2: ln(27/4), the single-support closed form
    CHECK(kl_population(fock_population(2), 2.0) ==
          doctest::Approx(1.9095425048844384).epsilon(1e-13));

    CHECK_THROWS_AS(kl_population(fock_population(1), 0.0), std::domain_error);
}

TEST_CASE("quantum relative entropy") {
    // diagonal states reduce to the classical divergence exactly
    for (auto P : {thermal_population(3.0), two_point_population(2.0, 4)}) {
        auto rho = density_from_population(P);
        CHECK(quantum_relative_entropy(rho, 2.0) ==
              doctest::Approx(kl_population(P, 2.0)).epsilon(1e-14));
    }

    // pure superposition at t = 0: -ln P0S/2 - ln P4S/2 (Tr rho ln rho = 0)
    auto rho = pure_superposition_state(2.0, 4);
    CHECK(quantum_relative_entropy(rho, 2.0) ==
          doctest::Approx(1.9095425048844384).epsilon(1e-10));

    CHECK(quantum_relative_entropy(density_from_population(thermal_population(2.0)), 2.0) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // an invalid matrix (eigenvalue below tolerance) is rejected
    DensityState bad;
    bad.diag.probs = {0.5, 0.5, 0.0, 0.0, 0.0, 0.0};
    CoherenceBand b;
    b.s = 1;
    b.amps.assign(6, 0.0);
    b.amps[0] = 0.9;  // far larger than sqrt(p0 p1): not positive semidefinite
    bad.bands.push_back(b);
    CHECK_THROWS_AS(quantum_relative_entropy(bad, 2.0), std::domain_error);
}

TEST_CASE("banded eigenvalues against the dense oracle") {
    auto rho = pure_superposition_state(2.0, 4, TruncationPolicy{1e-12, 16, 4096});
    const int N = rho.size();
    // dense reconstruction (column-major, lower triangle)
    std::vector<std::complex<double>> dense(N * N, 0.0);
    for (int n = 0; n < N; ++n) dense[n * N + n] = rho.diag.probs[n];
    for (const auto& band : rho.bands)
        for (int n = 0; n + band.s < N; ++n)
            dense[n * N + (n + band.s)] = std::conj(band.amps[n]);  // A(n+s, n) in col n
    auto dense_ev = hermitian_dense_eigenvalues(N, dense);
    CHECK(rho.min_eigenvalue() == doctest::Approx(dense_ev.front()).epsilon(1e-12));
    // a pure state has eigenvalues {0, ..., 0, 1}
    CHECK(dense_ev.back() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("secondary distance measures") {
    auto P = thermal_population(3.0);
    CHECK(trace_distance_population(P, 2.0) > 0.0);
    CHECK(hs_distance_population(P, 2.0) > 0.0);
    CHECK(trace_distance_population(thermal_population(2.0), 2.0) ==
          doctest::Approx(0.0).epsilon(1e-10));

    auto rho = pure_superposition_state(2.0, 4);
    CHECK(trace_distance_density(rho, 2.0) > 0.0);
    CHECK(hs_distance_density(rho, 2.0) > 0.0);
    // for a diagonal state the density measures match the population ones
    auto d = density_from_population(P);
    CHECK(trace_distance_density(d, 2.0) ==
          doctest::Approx(trace_distance_population(P, 2.0)).epsilon(1e-12));
    CHECK(hs_distance_density(d, 2.0) ==
          doctest::Approx(hs_distance_population(P, 2.0)).epsilon(1e-12));
}

TEST_CASE("rate fitting on synthetic exponentials") {
    auto grid = TimeGrid::uniform(3.0, 121);
    DistanceTrajectory traj;
    traj.grid = grid;
    for (double t : grid.times) traj.values.push_back(0.8 * std::exp(-4.0 * t));
    auto rate = fit_decay_rate(traj);
    REQUIRE(rate.has_value());
    CHECK(*rate == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(traj.fit_r2 >= 0.999);

    // noisy non-exponential data: rate withheld
    DistanceTrajectory bad;
    bad.grid = grid;
    for (int k = 0; k < grid.size(); ++k)
        bad.values.push_back(1.0 / (1.0 + grid.times[k]) + 0.5 * ((k % 2) ? 1.0 : 0.2));
    auto r2 = fit_decay_rate(bad);
    CHECK_FALSE(r2.has_value());

    // too few usable samples
    DistanceTrajectory tiny;
    tiny.grid = TimeGrid{{0.0, 1.0, 2.0, 3.0, 4.0, 5.0}};
    tiny.values = {1.0, 1e-13, 1e-13, 1e-13, 1e-13, 1e-13};
    CHECK_THROWS_AS(fit_decay_rate(tiny), std::invalid_argument);
    CHECK_THROWS_AS(fit_decay_rate(traj, 0.0), std::invalid_argument);
}

TEST_CASE("measured decay rates match the spectral prediction") {
    auto bath = make_bath(1.0, 0.0, 2.0);
    const int N = 140;
    auto gen = population_generator(bath, N);
    auto grid = TimeGrid::uniform(3.0, 301);

    // thermal(3): rate 2 gamma, KL decays at 4 gamma
    auto tI = propagate_population(pad_to(thermal_population(3.0), N), gen, grid);
    auto dI = distance_trajectory(tI, 2.0);
    auto rI = fit_decay_rate(dI);
    REQUIRE(rI.has_value());
    CHECK(*rI == doctest::Approx(4.0).epsilon(0.02));

    // Fock(2): first moment matched, KL decays at 8 gamma
    auto tII = propagate_population(pad_to(fock_population(2), N), gen, grid);
    auto dII = distance_trajectory(tII, 2.0);
    auto rII = fit_decay_rate(dII);
    REQUIRE(rII.has_value());
    CHECK(*rII == doctest::Approx(8.0).epsilon(0.02));
}

TEST_CASE("KL is monotone along population trajectories") {
    auto bath = make_bath(1.0, 0.0, 2.0);
    const int N = 140;
    auto gen = population_generator(bath, N);
    auto grid = TimeGrid::uniform(3.0, 61);
    for (auto P0 : {pad_to(thermal_population(3.0), N), pad_to(fock_population(2), N),
                    pad_to(two_point_population(2.0, 4), N)}) {
        auto traj = propagate_population(P0, gen, grid);
        auto d = distance_trajectory(traj, 2.0);
        for (int k = 0; k + 1 < grid.size(); ++k)
            CHECK(d.values[k + 1] <= d.values[k] + 1e-10);
    }
}

TEST_CASE("crossing detection") {
    auto grid = TimeGrid::uniform(3.0, 301);
    DistanceTrajectory a, b;
    a.grid = b.grid = grid;
    for (double t : grid.times) {
        a.values.push_back(0.065 * std::exp(-4.0 * t));
        b.values.push_back(1.9 * std::exp(-8.0 * t));
    }
    auto rep = detect_crossing(a, b);
    REQUIRE(rep.crossings.size() == 1);
    // exact crossing of the synthetic pair: ln(1.9/0.065)/4
    CHECK(rep.crossings[0] == doctest::Approx(std::log(1.9 / 0.065) / 4.0).epsilon(1e-6));
    CHECK(rep.initially_farther == 2);
    CHECK(rep.mpemba_detected);

    // identical trajectories: no crossing, no effect
    auto rep2 = detect_crossing(a, a);
    CHECK(rep2.crossings.empty());
    CHECK_FALSE(rep2.mpemba_detected);

    DistanceTrajectory c;
    c.grid = TimeGrid::uniform(2.0, 301);
    c.values.assign(301, 1.0);
    CHECK_THROWS_AS(detect_crossing(a, c), std::invalid_argument);
}
