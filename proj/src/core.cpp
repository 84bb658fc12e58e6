#include "raman_echo/core.hpp"

#include <cmath>
#include <sstream>

#include "raman_echo/diagnostics.hpp"

namespace raman_echo {

namespace {

std::string describe(const char* what, double value)
{
    std::ostringstream os;
    os << what << " (got " << value << ")";
    return os.str();
}

} // namespace

std::vector<std::string> validate(const SystemParams& p)
{
    if (!(p.gamma1 > 0.0)) {
        throw config_error(describe("gamma1 must be positive", p.gamma1));
    }
    if (!(p.delta_in > 0.0)) {
        throw config_error(describe("delta_in must be positive", p.delta_in));
    }
    if (!(p.t2_inv >= 0.0)) {
        throw config_error(describe("t2_inv must be non-negative", p.t2_inv));
    }
    if (!(p.n_atoms >= 1.0)) {
        throw config_error(describe("n_atoms must be at least 1", p.n_atoms));
    }
    if (!(p.g_bar >= 0.0)) {
        throw config_error(describe("g_bar must be non-negative", p.g_bar));
    }
    if (p.big_delta0 == 0.0 || !std::isfinite(p.big_delta0)) {
        throw config_error(describe("big_delta0 must be finite and non-zero", p.big_delta0));
    }

    std::vector<std::string> warnings;
    const double ratio = rabi_ratio(p);
    if (ratio > adiabatic_cap_ratio) {
        if (!p.allow_nonadiabatic) {
            throw config_error(describe("|omega1/big_delta0| exceeds the adiabatic cap 0.2", ratio));
        }
        warnings.push_back(describe("|omega1/big_delta0| above 0.2, adiabatic elimination unreliable", ratio));
    } else if (ratio > adiabatic_warn_ratio) {
        warnings.push_back(describe("|omega1/big_delta0| above 0.1", ratio));
    }
    return warnings;
}

void validate(const CavityGeometry& g)
{
    if (!(g.length_cm > 0.0)) {
        throw config_error(describe("cavity length must be positive", g.length_cm));
    }
    if (!(g.fill_chi > 0.0 && g.fill_chi <= 1.0)) {
        throw config_error(describe("filling factor must lie in (0, 1]", g.fill_chi));
    }
    if (!(g.speed_c > 0.0)) {
        throw config_error(describe("speed of light must be positive", g.speed_c));
    }
}

double derive_gamma_r(const SystemParams& p)
{
    return raman_absorption_rate(p.n_atoms, p.g_bar, p.omega1, p.big_delta0, p.delta_in);
}

DerivedRates derive_rates(const SystemParams& p, const std::vector<std::complex<double>>& g_j)
{
    DerivedRates rates;
    rates.gamma_r = derive_gamma_r(p);
    rates.omega_eff_j.reserve(g_j.size());
    const std::complex<double> i(0.0, 1.0);
    for (const auto& g : g_j) {
        rates.omega_eff_j.push_back(i * std::conj(p.omega1) / p.big_delta0 * g);
    }
    return rates;
}

double transmission_coefficient(const CavityGeometry& geom, double gamma1_si)
{
    validate(geom);
    if (!(gamma1_si > 0.0)) {
        throw config_error(describe("gamma1 (SI) must be positive", gamma1_si));
    }
    return 2.0 * geom.length_cm * gamma1_si / geom.speed_c;
}

double matching_rabi_ratio(const SystemParams& p)
{
    const double coupling = p.n_atoms * p.g_bar * p.g_bar;
    if (!(coupling > 0.0)) {
        throw config_error("matching requires N * g_bar^2 > 0");
    }
    const double ratio = std::sqrt(p.delta_in * p.gamma1 / (2.0 * coupling));
    if (ratio > adiabatic_cap_ratio && !p.allow_nonadiabatic) {
        throw config_error(describe("impedance matching needs |omega1/big_delta0| above the adiabatic cap; "
                                    "increase N or g_bar", ratio));
    }
    return ratio;
}

double optical_absorption_matching_coefficient(double gamma1_si, double fill_chi,
                                               double rabi_ratio_sq, double speed_c)
{
    if (!(gamma1_si > 0.0 && fill_chi > 0.0 && fill_chi <= 1.0 && rabi_ratio_sq > 0.0)) {
        throw config_error("absorption matching needs gamma1 > 0, 0 < chi <= 1 and |omega1/delta0|^2 > 0");
    }
    // alpha_r = T / (2 chi L) with T = 2 L gamma1 / c: L cancels.
    const double alpha_r = gamma1_si / (speed_c * fill_chi);
    return alpha_r / rabi_ratio_sq;
}

SystemParams params_for_gamma_r(double gamma_r, double delta_in, double t2_inv,
                                double rabi_ratio, double big_delta0, double n_atoms,
                                double gamma1)
{
    if (!(gamma_r >= 0.0) || !(rabi_ratio > 0.0)) {
        throw config_error("params_for_gamma_r needs gamma_r >= 0 and rabi_ratio > 0");
    }
    SystemParams p;
    p.gamma1 = gamma1;
    p.delta_in = delta_in;
    p.t2_inv = t2_inv;
    p.big_delta0 = big_delta0;
    p.omega1 = rabi_ratio * big_delta0;
    p.n_atoms = n_atoms;
    p.g_bar = std::sqrt(gamma_r * delta_in / (2.0 * n_atoms)) / rabi_ratio;
    for (const auto& w : validate(p)) {
        warn(w);
    }
    return p;
}

SystemParams matched_params(double t2_inv, double rabi_ratio, double big_delta0)
{
    return params_for_gamma_r(1.0, 0.5, t2_inv, rabi_ratio, big_delta0);
}

SystemParams rescaled(const SystemParams& p, double factor)
{
    SystemParams q = p;
    q.gamma1 *= factor;
    q.delta_in *= factor;
    q.t2_inv *= factor;
    q.big_delta0 *= factor;
    q.omega1 *= factor;
    q.g_bar *= factor;
    return q;
}

} // namespace raman_echo
