#include <doctest.h>

#include <random>

#include "raman_echo/core.hpp"
#include "raman_echo/diagnostics.hpp"
#include "raman_echo/spectral.hpp"

using namespace raman_echo;

TEST_CASE("gamma_r vanishes without a control field")
{
    SystemParams p;
    p.omega1 = 0.0;
    CHECK(derive_gamma_r(p) == 0.0);
}

TEST_CASE("gamma_r is quadratic in omega1")
{
    SystemParams p;
    p.omega1 = 5.0;
    const double g1 = derive_gamma_r(p);
    p.omega1 = 10.0;
    CHECK(derive_gamma_r(p) == doctest::Approx(4.0 * g1).epsilon(1e-14));
}

TEST_CASE("gamma_r hand arithmetic: N=1e6, g=1e-3, ratio 0.1, delta_in 0.5")
{
    SystemParams p;
    p.n_atoms = 1e6;
    p.g_bar = 1e-3;
    p.big_delta0 = 100.0;
    p.omega1 = 10.0;
    p.delta_in = 0.5;
    CHECK(derive_gamma_r(p) == doctest::Approx(4e-2).epsilon(1e-13));
}

TEST_CASE("derived rates carry per-atom effective couplings")
{
    SystemParams p;
    p.omega1 = {3.0, 4.0};
    const auto r = derive_rates(p, {1.0, {0.0, 2.0}});
    REQUIRE(r.omega_eff_j.size() == 2);
    const std::complex<double> expected = std::complex<double>(0, 1) * std::conj(p.omega1) / p.big_delta0;
    CHECK(std::abs(r.omega_eff_j[0] - expected) < 1e-15);
    CHECK(std::abs(r.omega_eff_j[1] - expected * std::complex<double>(0, 2)) < 1e-15);
    CHECK(r.gamma_r == derive_gamma_r(p));
}

TEST_CASE("transmission coefficient worked examples")
{
    CavityGeometry g;
    g.length_cm = 0.1;
    const double t = transmission_coefficient(g, 1e8);
    CHECK(t == doctest::Approx(2.0 * 0.1 * 1e8 / 2.9979e10).epsilon(1e-14));
    CHECK(std::abs(t - 0.7e-3) / 0.7e-3 < 0.1);
    g.length_cm = 1.0;
    CHECK(std::abs(transmission_coefficient(g, 1e8) - 0.7e-2) / 0.7e-2 < 0.1);
    g.length_cm = 1e-12;
    CHECK(transmission_coefficient(g, 1e8) < 1e-14);
}

TEST_CASE("geometry validation")
{
    CavityGeometry g;
    g.fill_chi = 0.0;
    CHECK_THROWS_AS(transmission_coefficient(g, 1e8), config_error);
    g.fill_chi = 1.5;
    CHECK_THROWS_AS(validate(g), config_error);
    g.fill_chi = 1.0;
    g.length_cm = -1.0;
    CHECK_THROWS_AS(validate(g), config_error);
}

TEST_CASE("matching Rabi ratio: closed form and round trip")
{
    SystemParams p;
    p.delta_in = 0.5;
    p.n_atoms = 1.0;
    p.g_bar = 5.0;
    const double r = matching_rabi_ratio(p);
    CHECK(r == doctest::Approx(0.1).epsilon(1e-15));
    p.omega1 = r * p.big_delta0;
    CHECK(derive_gamma_r(p) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("matching Rabi ratio above the adiabatic cap is rejected")
{
    SystemParams p;
    p.delta_in = 0.5;
    p.n_atoms = 1.0;
    p.g_bar = 1.0; // ratio 0.5
    CHECK_THROWS_AS(matching_rabi_ratio(p), config_error);
    p.allow_nonadiabatic = true;
    CHECK(matching_rabi_ratio(p) == doctest::Approx(0.5));
    p.g_bar = 0.0;
    CHECK_THROWS_AS(matching_rabi_ratio(p), config_error);
}

TEST_CASE("matching round trip at 100 random parameter points")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        SystemParams p;
        p.gamma1 = 0.1 + 10.0 * u(rng);
        p.delta_in = p.gamma1 * (0.05 + 2.0 * u(rng));
        p.n_atoms = std::pow(10.0, 1.0 + 6.0 * u(rng));
        p.big_delta0 = p.gamma1 * (50.0 + 500.0 * u(rng));
        const double target_ratio = 0.01 + 0.18 * u(rng);
        p.g_bar = std::sqrt(p.delta_in * p.gamma1 / (2.0 * p.n_atoms)) / target_ratio;
        const double r = matching_rabi_ratio(p);
        p.omega1 = r * p.big_delta0;
        worst = std::max(worst, std::abs(derive_gamma_r(p) - p.gamma1) / p.gamma1);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("validation rejects each broken invariant")
{
    SystemParams p;
    CHECK(validate(p).empty());
    auto broken = [](auto mutate) {
        SystemParams q;
        mutate(q);
        return q;
    };
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.gamma1 = 0.0; })), config_error);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.delta_in = -1.0; })), config_error);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.t2_inv = -0.1; })), config_error);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.n_atoms = 0.5; })), config_error);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.g_bar = -1.0; })), config_error);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.big_delta0 = 0.0; })), config_error);
    CHECK_THROWS_AS(validate(broken([](SystemParams& q) { q.omega1 = 30.0; })), config_error);
}

TEST_CASE("adiabatic guard: warning band and override")
{
    SystemParams p;
    p.omega1 = 15.0;
    const auto w = validate(p);
    CHECK(w.size() == 1);
    p.omega1 = 25.0;
    CHECK_THROWS_AS(validate(p), config_error);
    p.allow_nonadiabatic = true;
    CHECK(validate(p).size() == 1);
}

TEST_CASE("dimensionless outputs survive a joint rescaling of all rates")
{
    const SystemParams p = params_for_gamma_r(1.3, 0.4, 0.02, 0.08, 120.0, 1e4);
    for (double factor : {1e-3, 2.5, 1e8}) {
        const SystemParams q = rescaled(p, factor);
        CHECK(derive_gamma_r(q) / q.gamma1 == doctest::Approx(derive_gamma_r(p) / p.gamma1).epsilon(1e-12));
        for (double nu : {-0.7, 0.0, 0.3}) {
            const auto a = s_function(nu, p);
            const auto b = s_function(nu * factor, q);
            CHECK(std::abs(a - b) < 1e-12);
        }
        CHECK(rabi_ratio(q) == doctest::Approx(rabi_ratio(p)).epsilon(1e-14));
    }
}

TEST_CASE("matched parameter factory satisfies both conditions")
{
    const SystemParams p = matched_params();
    CHECK(derive_gamma_r(p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.delta_in == 0.5);
    CHECK(rabi_ratio(p) == doctest::Approx(0.1));
}

TEST_CASE("absorption matching coefficient: chi 0.5, ratio^2 0.01")
{
    const double c = optical_absorption_matching_coefficient(1e8, 0.5, 0.01);
    CHECK(c == doctest::Approx(1e8 / (2.9979e10 * 0.5 * 0.01)).epsilon(1e-14));
    CHECK(std::abs(c - 0.7) / 0.7 < 0.1);
    CHECK_THROWS_AS(optical_absorption_matching_coefficient(1e8, 0.0, 0.01), config_error);
}

TEST_CASE("warning handler captures diagnostics")
{
    std::vector<std::string> seen;
    {
        ScopedWarningHandler guard([&](const std::string& m) { seen.push_back(m); });
        warn("first");
        warn("second");
    }
    REQUIRE(seen.size() == 2);
    CHECK(seen[1] == "second");
}
