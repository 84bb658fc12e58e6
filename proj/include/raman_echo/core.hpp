#ifndef RAMAN_ECHO_CORE_HPP
#define RAMAN_ECHO_CORE_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace raman_echo {

// Invalid parameters or configuration. Maps to exit code 2 in the CLI.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integrator or quadrature failure. Maps to exit code 3 in the CLI.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double speed_of_light_cm_s = 2.9979e10;

// Above this |Omega1/Delta0| a warning is emitted; above the hard cap validation fails.
inline constexpr double adiabatic_warn_ratio = 0.1;
inline constexpr double adiabatic_cap_ratio = 0.2;

// Protocol rates and couplings. Every rate is in units of the cavity decay
// rate; gamma1 is kept as a field so that the formulas stay homogeneous
// under a joint rescaling of all rates.
struct SystemParams {
    double gamma1 = 1.0;
    double delta_in = 0.5;
    double t2_inv = 0.0;
    double big_delta0 = 100.0;
    std::complex<double> omega1 = 10.0;
    double n_atoms = 1.0;
    double g_bar = 5.0;
    // Cavity decay rate in s^-1; only used for reporting.
    double gamma1_si = 0.0;
    // Skip the adiabatic hard cap (research override).
    bool allow_nonadiabatic = false;
};

struct DerivedRates {
    double gamma_r = 0.0;
    // i * conj(Omega1)/Delta0 * g_j for each attached coupling
    std::vector<std::complex<double>> omega_eff_j;
};

struct CavityGeometry {
    double length_cm = 0.1;
    double fill_chi = 1.0;
    double speed_c = speed_of_light_cm_s;
};

// Throws config_error on a violated invariant; returns human-readable warnings.
std::vector<std::string> validate(const SystemParams& p);
void validate(const CavityGeometry& g);

inline double rabi_ratio(const SystemParams& p)
{
    return std::abs(p.omega1 / p.big_delta0);
}

// Raman absorption rate Gamma_r = 2 N |Omega1 g / Delta0|^2 / delta_in.
template <typename Real>
Real raman_absorption_rate(Real n_atoms, Real g_bar, std::complex<Real> omega1,
                           Real big_delta0, Real delta_in)
{
    const Real coupling = std::norm(omega1 * g_bar / big_delta0);
    return Real(2) * n_atoms * coupling / delta_in;
}

double derive_gamma_r(const SystemParams& p);
DerivedRates derive_rates(const SystemParams& p,
                          const std::vector<std::complex<double>>& g_j = {});

// T = 2 L gamma1 / c, from gamma1 ~ T c / (2L).
double transmission_coefficient(const CavityGeometry& geom, double gamma1_si);

// |Omega1/Delta0| that puts Gamma_r exactly at gamma1. Throws when the
// result exceeds the adiabatic cap (unless the override is set).
double matching_rabi_ratio(const SystemParams& p);

// Absorption-coefficient matching: alpha_13 = coefficient * delta_in / Delta_in^(13),
// coefficient in cm^-1. Follows from T = 2 chi alpha_r L and
// alpha_r = |Omega1/Delta0|^2 (Delta_in^(13)/delta_in) alpha_13.
double optical_absorption_matching_coefficient(double gamma1_si, double fill_chi,
                                               double rabi_ratio_sq,
                                               double speed_c = speed_of_light_cm_s);

// Parameter set with a prescribed Gamma_r: keeps N, Delta0 and the given
// |Omega1/Delta0| and solves for g_bar.
SystemParams params_for_gamma_r(double gamma_r, double delta_in, double t2_inv,
                                double rabi_ratio, double big_delta0 = 100.0,
                                double n_atoms = 1.0, double gamma1 = 1.0);

// Both matching conditions satisfied: Gamma_r = gamma1, delta_in = gamma1/2.
SystemParams matched_params(double t2_inv = 0.0, double rabi_ratio = 0.1,
                            double big_delta0 = 100.0);

// Multiplies every rate by factor (unit change); dimensionless outputs are invariant.
SystemParams rescaled(const SystemParams& p, double factor);

} // namespace raman_echo

#endif // RAMAN_ECHO_CORE_HPP
