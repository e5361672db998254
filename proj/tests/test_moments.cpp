#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "mpemba/evolve.hpp"
#include "mpemba/moments.hpp"
#include "mpemba/states.hpp"

using namespace mpemba;

TEST_CASE("population moments") {
    auto th = thermal_population(2.0);
    auto Q = population_moments(th, 2);
    CHECK(Q[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(Q[1] == doctest::Approx(2.0).epsilon(1e-11));

    auto tp = two_point_population(2.5, 6);
    auto Q2 = population_moments(tp, 2);
    CHECK(Q2[2] == doctest::Approx(15.0).epsilon(1e-13));  // n_th + 2 n_th^2 = n1^2 p

    auto f = fock_population(1);
    CHECK(population_moments(f, 3)[3] == doctest::Approx(1.0));
}

TEST_CASE("stationary moments: closed form, recursion, brute force") {
    // two independent routes agree
    for (double nth : {0.5, 1.0, 2.0, 2.5, 4.0}) {
        auto a = stationary_moments(nth, 12);
        auto b = stationary_moments_recursion(nth, 12);
        for (int l = 0; l <= 12; ++l)
            CHECK(a[l] == doctest::Approx(b[l]).epsilon(1e-12));
    }
    // pinned values
    auto Q = stationary_moments(2.0, 3);
    CHECK(Q[1] == doctest::Approx(2.0));
    CHECK(Q[2] == doctest::Approx(2.0 + 2.0 * 4.0));
    CHECK(Q[3] == doctest::Approx(2.0 + 6.0 * 4.0 + 6.0 * 8.0));  // n + 6n^2 + 6n^3
    // l = 3, n_th = 1: brute-force geometric sum gives 13
    CHECK(stationary_moments(1.0, 3)[3] == doctest::Approx(13.0).epsilon(1e-13));
    // brute-force oracle across orders
    const double nth = 2.5, q = nth / (1.0 + nth);
    auto QS = stationary_moments(nth, 6);
    for (int l = 1; l <= 6; ++l) {
        double acc = 0.0;
        for (int n = 0; n < 4000; ++n)
            acc += std::pow(static_cast<double>(n), l) * (1.0 - q) * std::pow(q, n);
        CHECK(QS[l] == doctest::Approx(acc).epsilon(1e-10));
    }
    // vacuum: all moments vanish
    auto V = stationary_moments(0.0, 5);
    for (int l = 1; l <= 5; ++l) CHECK(V[l] == 0.0);
}

TEST_CASE("population moment evolution") {
    const double nth = 2.0, gamma = 1.0;
    auto grid = TimeGrid::uniform(2.0, 21);

    // stationary moments stay fixed
    auto QS = stationary_moments(nth, 6);
    auto fixed = evolve_population_moments(QS, nth, gamma, grid);
    for (const auto& Qt : fixed)
        for (int l = 0; l <= 6; ++l)
            CHECK(Qt[l] == doctest::Approx(QS[l]).epsilon(1e-12));

    // matched first moment stays locked, the second relaxes at rate 4 gamma
    auto P0 = two_point_population(nth, 4);
    auto Q0 = population_moments(P0, 4);
    CHECK(Q0[1] == doctest::Approx(nth).epsilon(1e-13));
    auto Qt = evolve_population_moments(Q0, nth, gamma, grid);
    for (const auto& q : Qt) CHECK(q[1] == doctest::Approx(nth).epsilon(1e-12));
    const double dt = grid.times[1] - grid.times[0];
    for (int k = 5; k + 1 < grid.size(); ++k) {
        const double da = Qt[k][2] - QS[2], db = Qt[k + 1][2] - QS[2];
        if (std::abs(da) < 1e-9) break;
        CHECK(db / da == doctest::Approx(std::exp(-4.0 * gamma * dt)).epsilon(1e-8));
    }

    // unmatched first moment relaxes at rate 2 gamma
    auto f = fock_population(5);
    auto Qf = evolve_population_moments(population_moments(f, 1), nth, gamma, grid);
    for (int k = 0; k < grid.size(); ++k)
        CHECK(Qf[k][1] - nth ==
              doctest::Approx((5.0 - nth) * std::exp(-2.0 * gamma * grid.times[k]))
                  .epsilon(1e-12));
}

TEST_CASE("coherence moments of a superposition state") {
    auto rho = pure_superposition_state(2.0, 4);
    auto Q = coherence_moments(rho, 4, 2);
    CHECK(Q[0].real() == doctest::Approx(std::sqrt(24.0) * 0.5).epsilon(1e-13));
    CHECK(Q[0].imag() == doctest::Approx(0.0));
    CHECK(Q[1] == std::complex<double>{0.0, 0.0});  // single entry at n = 0

    // diagonal state: all band moments vanish
    auto d = density_from_population(thermal_population(2.0));
    for (auto v : coherence_moments(d, 2, 3)) CHECK(std::abs(v) == 0.0);
    // absent band treated as zero
    CHECK(std::abs(coherence_moments(rho, 3, 2)[0]) == 0.0);
}

TEST_CASE("coherence moment evolution") {
    const double nth = 2.0, gamma = 1.0;
    const int s = 3;
    auto grid = TimeGrid::uniform(1.0, 11);

    // |Q_0^(s)(t)| = |Q_0^(s)(0)| e^{-gamma s t}
    std::vector<std::complex<double>> Q0{{0.7, 0.2}, {0.1, 0.0}, {0.0, 0.3}};
    auto Qt = evolve_coherence_moments(Q0, s, nth, gamma, grid);
    for (int k = 0; k < grid.size(); ++k)
        CHECK(std::abs(Qt[k][0]) ==
              doctest::Approx(std::abs(Q0[0]) * std::exp(-gamma * s * grid.times[k]))
                  .epsilon(1e-12));

    // vanishing moments below h': pure exponential at rate 2 gamma (h' + s/2)
    std::vector<std::complex<double>> Qh{{0.0, 0.0}, {0.0, 0.0}, {0.5, -0.25}};
    auto Qht = evolve_coherence_moments(Qh, s, nth, gamma, grid);
    for (int k = 0; k < grid.size(); ++k) {
        CHECK(std::abs(Qht[k][0]) < 1e-14);
        CHECK(std::abs(Qht[k][1]) < 1e-14);
        const double expected =
            std::abs(Qh[2]) * std::exp(-2.0 * gamma * (2.0 + 0.5 * s) * grid.times[k]);
        CHECK(std::abs(Qht[k][2]) == doctest::Approx(expected).epsilon(1e-12));
    }

    // all-zero input stays zero
    std::vector<std::complex<double>> Z(4, {0.0, 0.0});
    for (const auto& q : evolve_coherence_moments(Z, 1, nth, gamma, grid))
        for (auto v : q) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("matched moment order") {
    CHECK(matched_moment_order(two_point_population(2.5, 4), 2.5, 6) == 1);
    CHECK(matched_moment_order(two_point_population(2.5, 6), 2.5, 6) == 2);
    CHECK(matched_moment_order(thermal_population(3.0), 2.5, 6) == 0);
    CHECK(matched_moment_order(thermal_population(2.5), 2.5, 6) == 6);
}

TEST_CASE("acceleration order") {
    auto bath = make_bath(1.0, 0.0, 2.5);

    // first moment matched only: r = 1, rate 4 gamma (h = 4)
    auto a = acceleration_order(density_from_population(two_point_population(2.5, 4)), bath, 12);
    CHECK(a.h == 4);
    CHECK(a.rate == doctest::Approx(4.0));

    // first and second matched: r = 2, rate 6 gamma
    auto b = acceleration_order(density_from_population(two_point_population(2.5, 6)), bath, 12);
    CHECK(b.h == 6);
    CHECK(b.rate == doctest::Approx(6.0));

    // generic state: no acceleration, h = 2
    auto c = acceleration_order(density_from_population(thermal_population(3.0)), bath, 12);
    CHECK(c.h == 2);
    CHECK(c.rate == doctest::Approx(2.0));

    // superposition: population r = 1 (h = 4) and band s = 4 (h <= 4): overall 4 gamma
    auto bath2 = make_bath(1.0, 0.0, 2.0);
    auto d = acceleration_order(pure_superposition_state(2.0, 4), bath2, 12);
    CHECK(d.h == 4);
    CHECK(d.rate == doctest::Approx(4.0));

    // heavy-tail input is rejected
    CHECK_THROWS_AS(
        acceleration_order(density_from_population(power_law_population()), bath, 12),
        std::domain_error);
    CHECK_THROWS_AS(acceleration_order(pure_superposition_state(2.0, 4), bath2, 0),
                    std::invalid_argument);
}

TEST_CASE("zero-temperature bath admits no acceleration") {
    auto bath = make_bath(1.0, 0.0, 0.0);
    for (auto P0 : {fock_population(1), fock_population(3), two_point_population(0.4, 2)}) {
        auto res = acceleration_order(density_from_population(P0), bath, 12);
        CHECK(res.h == 2);  // generic population rate, nothing faster
        CHECK(res.rate == doctest::Approx(2.0));
    }
}

TEST_CASE("construct matched states") {
    // r = 1 on {0, n1} reproduces the two-point closed form
    auto s1 = construct_matched_state(2.5, 1, {0, 4});
    CHECK(s1.probs[4] == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(s1.probs[0] == doctest::Approx(0.375).epsilon(1e-14));

    // r = 2 on {0, 6} at n_th = 2.5: weight 5/12 at n = 6
    auto s2 = construct_matched_state(2.5, 2, {0, 6});
    CHECK(s2.probs[6] == doctest::Approx(5.0 / 12).epsilon(1e-12));
    auto bath = make_bath(1.0, 0.0, 2.5);
    CHECK(acceleration_order(density_from_population(s2), bath, 12).h == 6);

    // r = 2 on {0, 1} at n_th = 2 has no nonnegative solution
    CHECK_THROWS_AS(construct_matched_state(2.0, 2, {0, 1}), std::domain_error);

    // richer supports found by the nonnegative solve
    for (int r = 1; r <= 4; ++r) {
        std::vector<std::vector<int>> supports = {
            {0, 3}, {0, 1, 7}, {0, 1, 2, 10}, {0, 1, 2, 5, 15}};
        auto st = construct_matched_state(2.5, r, supports[r - 1]);
        CHECK(matched_moment_order(st, 2.5, r + 1) == r);
        auto acc = acceleration_order(density_from_population(st), bath, 16);
        CHECK(acc.h == 2 * (r + 1));
    }
}

TEST_CASE("moment paths agree: propagated states vs closed-form hierarchy") {
    auto bath = make_bath(1.0, 0.0, 2.5);
    const int N = 220;
    auto gen = population_generator(bath, N);
    auto grid = TimeGrid::uniform(2.0, 17);
    for (auto P0 : {pad_to(thermal_population(3.0), N), pad_to(two_point_population(2.5, 6), N),
                    pad_to(fock_population(1), N)}) {
        auto traj = propagate_population(P0, gen, grid);
        auto Q0 = population_moments(P0, 6);
        auto closed = evolve_population_moments(Q0, bath.n_th, bath.gamma, grid);
        for (int k = 0; k < grid.size(); ++k) {
            auto direct = population_moments(traj.states[k], 6);
            for (int l = 0; l <= 6; ++l)
                CHECK(direct[l] ==
                      doctest::Approx(closed[k][l]).epsilon(1e-8).scale(std::abs(closed[k][l])));
        }
    }
}
