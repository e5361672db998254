#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mpemba/bath.hpp"
#include "mpemba/states.hpp"

using namespace mpemba;

TEST_CASE("bath construction and temperature ratio") {
    auto b = make_bath(1.0, 0.0, 2.0);
    CHECK(b.absorption_rate() == doctest::Approx(4.0));
    CHECK(b.emission_rate() == doctest::Approx(6.0));

    // x = ln 2 gives n_th = 1 exactly
    auto b2 = bath_from_temperature_ratio(0.5, 1.0, std::log(2.0));
    CHECK(b2.n_th == doctest::Approx(1.0).epsilon(1e-15));

    // zero-temperature limit
    auto b3 = bath_from_temperature_ratio(1.0, 1.0, 800.0);
    CHECK(b3.n_th == doctest::Approx(0.0));

    CHECK_THROWS_AS(make_bath(0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_bath(-1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_bath(1.0, 0.0, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(bath_from_temperature_ratio(1.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bath_from_temperature_ratio(1.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("thermal population") {
    auto p = thermal_population(2.0);
    CHECK(p.probs[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(p.probs[1] == doctest::Approx(2.0 / 9).epsilon(1e-15));
    CHECK(p.probs[2] == doctest::Approx(4.0 / 27).epsilon(1e-15));
    CHECK(p.mass() > 1.0 - 1e-12);
    CHECK(p.mass() <= 1.0 + 1e-15);
    CHECK(p.mass_deficit <= 1e-12);
    // mean equals n_th to the tail tolerance scale
    CHECK(p.mean() == doctest::Approx(2.0).epsilon(1e-9));

    auto v = thermal_population(0.0);
    CHECK(v.probs[0] == 1.0);
    CHECK(v.mass() == 1.0);

    auto p3 = thermal_population(3.0);
    CHECK(p3.probs[0] == doctest::Approx(0.25).epsilon(1e-15));
    for (int n = 0; n + 1 < 20; ++n)
        CHECK(p3.probs[n + 1] / p3.probs[n] == doctest::Approx(0.75).epsilon(1e-14));

    // required N above the cap
    TruncationPolicy tight;
    tight.n_max_cap = 16;
    CHECK_THROWS_AS(thermal_population(5.0, tight), std::domain_error);
}

TEST_CASE("two-point population") {
    auto s = two_point_population(2.0, 2);
    CHECK(s.probs[2] == 1.0);  // p = 1: a single Fock state
    CHECK(s.probs[0] == 0.0);

    auto s2 = two_point_population(2.5, 4);
    CHECK(s2.probs[4] == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(s2.probs[0] == doctest::Approx(0.375).epsilon(1e-15));

    auto s3 = two_point_population(2.5, 6);
    CHECK(s3.probs[6] == doctest::Approx(2.5 / 6.0).epsilon(1e-15));
    // first moment matches the bath occupation exactly
    CHECK(s3.mean() == doctest::Approx(2.5).epsilon(1e-14));

    CHECK_THROWS_AS(two_point_population(2.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(two_point_population(2.0, 10000), std::domain_error);
}

TEST_CASE("power-law population") {
    TruncationPolicy policy;
    policy.n_max_cap = 1800;
    auto p = power_law_population(policy);
    CHECK(p.size() == 1800);
    CHECK_FALSE(p.finite_moments);
    CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.probs[1] / p.probs[0] == doctest::Approx(0.25).epsilon(1e-14));
    // frozen oracles from high-precision partial sums at N = 1800:
    // normalized head entry 1 / sum_{n<1800} (1+n)^-2 and the truncated mean
    CHECK(p.probs[0] == doctest::Approx(0.60813243380544196).epsilon(1e-13));
    CHECK(p.mean() == doctest::Approx(3.9094746421870930).epsilon(1e-12));
}

TEST_CASE("pure superposition state") {
    auto rho = pure_superposition_state(2.0, 4);
    CHECK(rho.diag.probs[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rho.diag.probs[4] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-15));
    REQUIRE(rho.band(4) != nullptr);
    CHECK(rho.band(4)->amps[0].real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rho.band(4)->amps[1] == std::complex<double>{0.0, 0.0});
    CHECK(rho.band(3) == nullptr);

    // positivity of the reconstructed matrix (pure state: eigenvalues {0, 1})
    CHECK(rho.min_eigenvalue() >= -1e-10);

    // p -> 0 limit is the vacuum with no coherence weight
    auto vac = pure_superposition_state(0.0, 4);
    CHECK(vac.diag.probs[0] == 1.0);
    CHECK(std::abs(vac.band(4)->amps[0]) == 0.0);

    CHECK_THROWS_AS(pure_superposition_state(2.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(pure_superposition_state(2.0, 1), std::invalid_argument);
}

TEST_CASE("explicit population clips and renormalizes") {
    auto p = explicit_population({0.5, 0.5, -1e-13});
    CHECK(p.probs[2] == 0.0);
    CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(explicit_population({0.5, 0.5, -1e-3}), std::invalid_argument);
    CHECK_THROWS_AS(explicit_population({}), std::invalid_argument);
}

TEST_CASE("fock population") {
    auto f = fock_population(2);
    CHECK(f.probs[2] == 1.0);
    CHECK(f.mass() == 1.0);
    CHECK(f.moment(3) == doctest::Approx(8.0));
    auto f1 = fock_population(1);
    CHECK(f1.moment(3) == doctest::Approx(1.0));
}
