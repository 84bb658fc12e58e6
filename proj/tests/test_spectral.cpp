#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "raman_echo/core.hpp"
#include "raman_echo/diagnostics.hpp"
#include "raman_echo/spectral.hpp"

using namespace raman_echo;
using cd = std::complex<double>;

namespace {

// Direct transcription of the S-function in long double, written without the
// shared templates so the two evaluations are independent.
std::complex<long double> s_literal(long double nu, long double gamma1, long double gamma_r,
                                    long double delta_in, long double t2_inv)
{
    const std::complex<long double> i(0.0L, 1.0L);
    const long double shape = std::sqrt(delta_in * delta_in / (delta_in * delta_in + nu * nu));
    const std::complex<long double> inner = gamma_r * delta_in / (delta_in + t2_inv - i * nu);
    return shape * 2.0L * std::sqrt(gamma1 * gamma_r) / (gamma1 + inner - 2.0L * i * nu);
}

SystemParams random_params(std::mt19937_64& rng, bool finite_t2 = true)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double gamma_r = 0.01 + 5.0 * u(rng);
    const double delta_in = 0.02 + 5.0 * u(rng);
    const double t2_inv = (!finite_t2 || u(rng) < 0.3) ? 0.0 : u(rng);
    return params_for_gamma_r(gamma_r, delta_in, t2_inv, 0.01 + 0.09 * u(rng), 50.0 + 200.0 * u(rng),
                              1.0 + 1e4 * u(rng));
}

double gaussian_density(double nu, double dw)
{
    return std::exp(-nu * nu / (2.0 * dw * dw)) / (std::sqrt(2.0 * M_PI) * dw);
}

template <typename F>
double kronrod(F f)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -10.0, 10.0, 15, 1e-13);
}

} // namespace

TEST_CASE("S = 1 at the matched point and nu = 0")
{
    const SystemParams p = matched_params();
    const cd s = s_function(0.0, p);
    CHECK(s.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(s.imag()) < 1e-15);
    CHECK(ss_function(0.0, p) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("S matches the independent long double evaluation")
{
    const SystemParams p = matched_params();
    const auto s = s_value(0.25, p);
    const auto lit = s_literal(0.25L, 1.0L, 1.0L, 0.5L, 0.0L);
    CHECK(std::abs(s.s - cd(static_cast<double>(lit.real()), static_cast<double>(lit.imag()))) < 1e-14);
    CHECK(std::abs(s.s) == doctest::Approx(0.99228).epsilon(2e-5));
    CHECK(s.z == doctest::Approx(0.98462).epsilon(2e-5));
    CHECK(s.z == std::norm(s.s));

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const SystemParams q = random_params(rng);
        const double nu = u(rng);
        const auto ref = s_literal(nu, q.gamma1, derive_gamma_r(q), q.delta_in, q.t2_inv);
        const cd a = s_function(nu, q);
        const cd b(static_cast<double>(ref.real()), static_cast<double>(ref.imag()));
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("S vanishes far from resonance")
{
    const SystemParams p = matched_params();
    CHECK(std::abs(s_function(1e6, p)) < 1e-6);
    CHECK(std::abs(cavity_response(1e6, p)) < 1e-5);
}

TEST_CASE("no coupling gives Z = 0 and the empty-cavity response 2")
{
    SystemParams p = matched_params();
    p.g_bar = 0.0;
    for (double nu : {-2.0, 0.0, 0.7}) {
        CHECK(ss_function(nu, p) == 0.0);
    }
    const cd r = cavity_response(0.0, p);
    CHECK(r.real() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(std::abs(r.imag()) < 1e-15);
}

TEST_CASE("matched cavity response at nu = 0 is 1")
{
    const cd r = cavity_response(0.0, matched_params());
    CHECK(r.real() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(r.imag()) < 1e-15);
}

TEST_CASE("closed-form cavity response reproduces S")
{
    // S = lineshape * sqrt(Gamma_r / gamma1) * response
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const SystemParams p = random_params(rng);
        const double nu = u(rng);
        const double shape = std::sqrt(p.delta_in * p.delta_in / (p.delta_in * p.delta_in + nu * nu));
        const cd via_response = shape * std::sqrt(derive_gamma_r(p) / p.gamma1) * cavity_response(nu, p);
        const cd s = s_function(nu, p);
        CHECK(std::abs(via_response - s) <= 1e-13 * std::abs(s) + 1e-300);
    }
}

TEST_CASE("passivity at T2 = infinity, evenness and Im S^2(0) = 0 over 1000 random sets")
{
    std::mt19937_64 rng(23);
    const Eigen::VectorXd nu = FrequencyGrid{}.nodes();
    double z_min = 1.0;
    double z_max = 0.0;
    double odd = 0.0;
    double im0 = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const SystemParams p = random_params(rng, false);
        const Eigen::VectorXd z = ss_function(nu, p);
        z_min = std::min(z_min, z.minCoeff());
        z_max = std::max(z_max, z.maxCoeff());
        odd = std::max(odd, (z - z.reverse()).cwiseAbs().maxCoeff());
        const cd s0 = s_function(0.0, p);
        im0 = std::max(im0, std::abs((s0 * s0).imag()));
    }
    CHECK(z_min >= 0.0);
    CHECK(z_max <= 1.0 + 1e-15);
    CHECK(odd <= 1e-12);
    CHECK(im0 == 0.0);
}

TEST_CASE("finite T2: Z is bounded by 1 + 1/(T2 delta_in) and the bound is reached")
{
    std::mt19937_64 rng(25);
    const Eigen::VectorXd nu = FrequencyGrid{}.nodes();
    double worst = 0.0;
    double odd = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const SystemParams p = random_params(rng);
        const Eigen::VectorXd z = ss_function(nu, p);
        worst = std::max(worst, z.maxCoeff() / (1.0 + p.t2_inv / p.delta_in));
        odd = std::max(odd, (z - z.reverse()).cwiseAbs().maxCoeff());
        const cd s0 = s_function(0.0, p);
        CHECK((s0 * s0).imag() == 0.0);
    }
    CHECK(worst <= 1.0 + 1e-15);
    CHECK(odd <= 1e-12);
    // Gamma_r = gamma1 (delta_in + 1/T2) / delta_in saturates the bound at nu = 0.
    const double delta_in = 0.5;
    const double t2_inv = 0.05;
    const SystemParams p = params_for_gamma_r((delta_in + t2_inv) / delta_in, delta_in, t2_inv, 0.1);
    CHECK(ss_function(0.0, p) == doctest::Approx(1.0 + t2_inv / delta_in).epsilon(1e-13));
}

TEST_CASE("storage and echo efficiencies agree with adaptive quadrature")
{
    const SystemParams p = matched_params();
    const FrequencyGrid g{};
    for (double dw : {0.05, 0.2, 0.5}) {
        const ModeSpectrum m = gaussian_mode(g, dw, 0.0);
        const double q_st_ref = kronrod([&](double x) { return ss_function(x, p) * gaussian_density(x, dw); });
        const double q_e_ref = kronrod([&](double x) {
            const double z = ss_function(x, p);
            return z * z * gaussian_density(x, dw);
        });
        CHECK(std::abs(storage_efficiency(m, p) - q_st_ref) / q_st_ref < 1e-6);
        CHECK(std::abs(echo_efficiency(m, p) - q_e_ref) / q_e_ref < 1e-6);

        const double re = kronrod([&](double x) {
            const cd s = s_function(x, p);
            return (s * s).real() * gaussian_density(x, dw);
        });
        const double im = kronrod([&](double x) {
            const cd s = s_function(x, p);
            return (s * s).imag() * gaussian_density(x, dw);
        });
        const double f_ref = (re * re + im * im) / q_e_ref;
        CHECK(std::abs(fidelity(m, p) - f_ref) < 1e-6);
    }
}

TEST_CASE("narrowband matched limit: Q_ST, Q_e and F approach 1")
{
    const ModeSpectrum m = gaussian_mode(FrequencyGrid{-1.0, 1.0, 4001}, 0.002, 0.0);
    const EfficiencyReport r = efficiency_report(m, matched_params());
    CHECK(r.q_st > 1.0 - 1e-5);
    CHECK(r.q_e > 1.0 - 1e-5);
    CHECK(r.fidelity > 1.0 - 1e-5);
    CHECK(r.decay_factor == 1.0);
}

TEST_CASE("no coupling: zero efficiency and undefined fidelity")
{
    SystemParams p = matched_params();
    p.g_bar = 0.0;
    const ModeSpectrum m = gaussian_mode(FrequencyGrid{}, 0.2, 0.0);
    CHECK(storage_efficiency(m, p) == 0.0);
    CHECK(echo_efficiency(m, p) == 0.0);
    CHECK_THROWS_AS(fidelity(m, p), numerical_error);
}

TEST_CASE("ordering 0 <= Q_e <= Q_ST <= 1 and 0 <= F <= 1 at T2 = infinity")
{
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(0.01, 0.8);
    const FrequencyGrid g{};
    for (int k = 0; k < 100; ++k) {
        const SystemParams p = random_params(rng, false);
        const ModeSpectrum m = gaussian_mode(g, u(rng), 0.0);
        const EfficiencyReport r = efficiency_report(m, p, 10.0);
        CHECK(r.q_e >= 0.0);
        CHECK(r.q_e <= r.q_st);
        CHECK(r.q_st <= 1.0 + 1e-12);
        CHECK(r.fidelity >= 0.0);
        CHECK(r.fidelity <= 1.0 + 1e-12);
        CHECK(r.decay_factor == 1.0);
    }
}

TEST_CASE("fidelity is one for a flat transfer and drops for broad modes")
{
    // Tiny bandwidth relative to every rate: S^2 is constant over the support.
    const SystemParams p = params_for_gamma_r(3.0, 2.0, 0.1, 0.05);
    const ModeSpectrum narrow = gaussian_mode(FrequencyGrid{-0.1, 0.1, 2001}, 1e-4 * 2.0, 0.0);
    CHECK(fidelity(narrow, p) == doctest::Approx(1.0).epsilon(1e-6));

    const SystemParams m = matched_params();
    const FrequencyGrid g{};
    CHECK(fidelity(gaussian_mode(g, 0.3, 0.0), m) < 1.0);
    double previous = fidelity(gaussian_mode(g, 0.2, 0.0), m);
    for (double dw = 0.25; dw <= 0.5 + 1e-9; dw += 0.05) {
        const double f = fidelity(gaussian_mode(g, dw, 0.0), m);
        CHECK(f < previous);
        previous = f;
    }
}

TEST_CASE("grid truncation warns through the diagnostics channel")
{
    const FrequencyGrid wide{};
    ModeSpectrum m = gaussian_mode(wide, 0.2, 0.0);
    m.amp *= 1.001;
    std::vector<std::string> seen;
    ScopedWarningHandler guard([&](const std::string& msg) { seen.push_back(msg); });
    storage_efficiency(m, matched_params());
    CHECK(seen.size() == 1);
}

TEST_CASE("echo spectrum is S^2 times the delayed, decayed input")
{
    const SystemParams p = matched_params(0.01);
    const FrequencyGrid g{};
    PulseTrain train;
    train.modes.push_back(gaussian_mode(g, 0.1, 0.0));
    train.modes.push_back(gaussian_mode(g, 0.1, 60.0));
    const double t0 = 150.0;
    const Eigen::VectorXcd out = echo_spectrum(train, p, t0);
    const Eigen::VectorXcd b = train_spectrum(train);
    for (Eigen::Index i = 0; i < g.n_points; i += 97) {
        const double nu = g.node(i);
        const cd s = s_function(nu, p);
        const cd expected = s * s * b(i) * std::polar(std::exp(-2.0 * t0 * p.t2_inv), 2.0 * nu * t0);
        CHECK(std::abs(out(i) - expected) < 1e-13);
    }
}

TEST_CASE("phase of S^2: zero at nu = 0, nonzero off resonance")
{
    const SystemParams p = matched_params();
    const cd s0 = s_function(0.0, p);
    const cd s3 = s_function(0.3, p);
    CHECK(std::arg(s0 * s0) == 0.0);
    CHECK(std::abs(std::arg(s3 * s3)) > 0.1);
}

TEST_CASE("narrowband matched echo reproduces the input delayed by 2 T0")
{
    const SystemParams p = matched_params();
    const FrequencyGrid g{-0.5, 0.5, 2001};
    PulseTrain train;
    train.modes.push_back(gaussian_mode(g, 0.01, 0.0));
    const double t0 = 1000.0;
    const Eigen::VectorXcd out = echo_spectrum(train, p, t0);
    const double e_in = trapezoid(train_spectrum(train).cwiseAbs2().eval(), g.spacing());
    const double e_out = trapezoid(out.cwiseAbs2().eval(), g.spacing());
    CHECK(e_out / e_in == doctest::Approx(1.0).epsilon(1e-3));

    const TimeGrid tg = make_time_grid(2.0 * t0 - 500.0, 2.0 * t0 + 500.0, 0.5);
    const Eigen::VectorXcd w = echo_waveform(train, p, t0, tg);
    const Eigen::VectorXcd in = spectrum_to_time(g, train_spectrum(train), tg, 2.0 * t0);
    CHECK((w - in).norm() / in.norm() < 2e-3);
}

TEST_CASE("matching check residuals")
{
    const MatchingReport ok = matching_check(matched_params());
    CHECK(ok.impedance_ok);
    CHECK(ok.spectral_ok);
    CHECK(ok.impedance_residual < 1e-14);
    CHECK(ok.spectral_residual == 0.0);

    const MatchingReport twice = matching_check(params_for_gamma_r(2.0, 0.5, 0.0, 0.1));
    CHECK_FALSE(twice.impedance_ok);
    CHECK(twice.spectral_ok);
    CHECK(twice.impedance_residual == doctest::Approx(1.0).epsilon(1e-12));

    SystemParams p = params_for_gamma_r(0.3, 0.5, 0.0, 0.05, 100.0, 50.0);
    CHECK_FALSE(matching_check(p).impedance_ok);
    p.omega1 = matching_rabi_ratio(p) * p.big_delta0;
    CHECK(matching_check(p).impedance_ok);
}

namespace {

double best_gamma_r(double dw, double lo, double hi, double step)
{
    const ModeSpectrum m = gaussian_mode(FrequencyGrid{}, dw, 0.0);
    double best = -1.0;
    double arg = lo;
    for (double gr = lo; gr <= hi + 1e-12; gr += step) {
        const double q = echo_efficiency(m, params_for_gamma_r(gr, 0.5, 0.0, 0.1));
        if (q > best) {
            best = q;
            arg = gr;
        }
    }
    return arg;
}

} // namespace

TEST_CASE("Q_e is maximized near Gamma_r = gamma1, with a shift quadratic in the width")
{
    // The optimum leaves the matched point by about 4.1 dw^2.
    CHECK(std::abs(best_gamma_r(0.01, 0.99, 1.01, 1e-4) - 1.0) < 1e-3);
    CHECK(best_gamma_r(0.1, 0.5, 2.0, 0.01) == doctest::Approx(1.04).epsilon(0.011));
    CHECK(std::abs(best_gamma_r(0.1, 0.5, 2.0, 0.05) - 1.0) <= 0.05 + 1e-12);
}
