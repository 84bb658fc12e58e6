#ifndef RAMAN_ECHO_SPECTRAL_HPP
#define RAMAN_ECHO_SPECTRAL_HPP

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "raman_echo/core.hpp"
#include "raman_echo/pulses.hpp"

namespace raman_echo {

// Rates entering the closed-form transfer functions, templated on the real
// scalar so the same expressions can be evaluated in extended precision.
template <typename Real>
struct SpectralRates {
    Real gamma1;
    Real gamma_r;
    Real delta_in;
    Real t2_inv;
};

template <typename Real = double>
SpectralRates<Real> spectral_rates(const SystemParams& p)
{
    return {Real(p.gamma1), Real(derive_gamma_r(p)), Real(p.delta_in), Real(p.t2_inv)};
}

// Lorentzian pole integral I(nu) = int d delta G(delta/delta_in) / (delta - nu - i/T2),
// closed by residues: I(nu) = -1 / (nu + i (delta_in + 1/T2)).
template <typename Real>
std::complex<Real> lorentzian_pole_integral(Real nu, Real delta_in, Real t2_inv)
{
    return Real(-1) / std::complex<Real>(nu, delta_in + t2_inv);
}

// Cavity response a_o(nu) sqrt(gamma1) / b_in(nu)
//   = gamma1 / (gamma1/2 - i nu - (i/2) Gamma_r delta_in I(nu)).
template <typename Real>
std::complex<Real> cavity_response(Real nu, const SpectralRates<Real>& r)
{
    const std::complex<Real> i(0, 1);
    const std::complex<Real> denom = r.gamma1 / Real(2) - i * nu
        - i / Real(2) * r.gamma_r * r.delta_in * lorentzian_pole_integral(nu, r.delta_in, r.t2_inv);
    return r.gamma1 / denom;
}

// S_r(nu) = sqrt(delta_in^2 / (delta_in^2 + nu^2))
//           * 2 sqrt(gamma1 Gamma_r) / [gamma1 + Gamma_r delta_in / (delta_in + 1/T2 - i nu) - 2 i nu]
template <typename Real>
std::complex<Real> s_function(Real nu, const SpectralRates<Real>& r)
{
    const std::complex<Real> i(0, 1);
    const Real lineshape = std::sqrt(r.delta_in * r.delta_in / (r.delta_in * r.delta_in + nu * nu));
    const std::complex<Real> bracket = r.gamma1
        + r.gamma_r * r.delta_in / (r.delta_in + r.t2_inv - i * nu) - Real(2) * i * nu;
    return lineshape * Real(2) * std::sqrt(r.gamma1 * r.gamma_r) / bracket;
}

// Z_r(nu) = |S_r(nu)|^2
template <typename Real>
Real ss_function(Real nu, const SpectralRates<Real>& r)
{
    return std::norm(s_function(nu, r));
}

std::complex<double> s_function(double nu, const SystemParams& p);
double ss_function(double nu, const SystemParams& p);
std::complex<double> cavity_response(double nu, const SystemParams& p);

// Grid evaluation.
Eigen::VectorXcd s_function(const Eigen::Ref<const Eigen::VectorXd>& nu, const SystemParams& p);
Eigen::VectorXd ss_function(const Eigen::Ref<const Eigen::VectorXd>& nu, const SystemParams& p);

struct SFunctionValue {
    std::complex<double> s;
    double z = 0.0;
};

SFunctionValue s_value(double nu, const SystemParams& p);

struct EfficiencyReport {
    double q_st = 0.0;
    double q_e = 0.0;
    double fidelity = 0.0;
    // Photon-number factor exp(-4 T0 / T2) for the given storage time.
    double decay_factor = 1.0;
};

// Q_ST,k = int Z_r |f_k|^2 d nu
double storage_efficiency(const ModeSpectrum& mode, const SystemParams& p);

// Q_e,k = int Z_r^2 |f_k|^2 d nu (excludes the exp(-4 T0/T2) factor)
double echo_efficiency(const ModeSpectrum& mode, const SystemParams& p);

// F_k = |int S_r^2 |f_k|^2 d nu|^2 / Q_e,k; throws numerical_error when Q_e,k = 0.
double fidelity(const ModeSpectrum& mode, const SystemParams& p);

EfficiencyReport efficiency_report(const ModeSpectrum& mode, const SystemParams& p, double t0_storage = 0.0);

double decay_factor(const SystemParams& p, double t0_storage);

// Output spectral amplitude: sum_k S_r^2 f_k exp(i nu (2 T0 + tau_k)) exp(-2 T0/T2).
Eigen::VectorXcd echo_spectrum(const PulseTrain& train, const SystemParams& p, double t0_storage);

// Echo waveform b_out(t) as the inverse transform of echo_spectrum.
Eigen::VectorXcd echo_waveform(const PulseTrain& train, const SystemParams& p, double t0_storage,
                               const TimeGrid& times);

struct MatchingReport {
    bool impedance_ok = false;
    bool spectral_ok = false;
    double impedance_residual = 0.0;
    double spectral_residual = 0.0;
};

inline constexpr double matching_tolerance = 1e-9;

MatchingReport matching_check(const SystemParams& p);

} // namespace raman_echo

#endif // RAMAN_ECHO_SPECTRAL_HPP
