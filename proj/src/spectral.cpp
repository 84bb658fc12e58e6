#include "raman_echo/spectral.hpp"

#include <sstream>

#include "raman_echo/diagnostics.hpp"

namespace raman_echo {

namespace {

void check_mode_norm(const ModeSpectrum& mode)
{
    validate(mode.grid);
    if (mode.amp.size() != mode.grid.n_points) {
        throw config_error("mode amplitude size does not match its grid");
    }
    const double n2 = norm_squared(mode);
    if (std::abs(n2 - 1.0) > 1e-4) {
        std::ostringstream os;
        os << "mode norm on the grid is " << n2 << "; truncation loses more than 1e-4";
        warn(os.str());
    }
}

} // namespace

std::complex<double> s_function(double nu, const SystemParams& p)
{
    return s_function(nu, spectral_rates(p));
}

double ss_function(double nu, const SystemParams& p)
{
    return ss_function(nu, spectral_rates(p));
}

std::complex<double> cavity_response(double nu, const SystemParams& p)
{
    return cavity_response(nu, spectral_rates(p));
}

Eigen::VectorXcd s_function(const Eigen::Ref<const Eigen::VectorXd>& nu, const SystemParams& p)
{
    const auto rates = spectral_rates(p);
    return nu.unaryExpr([&](double x) { return s_function(x, rates); });
}

Eigen::VectorXd ss_function(const Eigen::Ref<const Eigen::VectorXd>& nu, const SystemParams& p)
{
    const auto rates = spectral_rates(p);
    return nu.unaryExpr([&](double x) { return ss_function(x, rates); });
}

SFunctionValue s_value(double nu, const SystemParams& p)
{
    SFunctionValue v;
    v.s = s_function(nu, p);
    v.z = std::norm(v.s);
    return v;
}

double storage_efficiency(const ModeSpectrum& mode, const SystemParams& p)
{
    check_mode_norm(mode);
    const Eigen::VectorXd z = ss_function(mode.grid.nodes(), p);
    return trapezoid(z.cwiseProduct(mode.amp.cwiseAbs2()), mode.grid.spacing());
}

double echo_efficiency(const ModeSpectrum& mode, const SystemParams& p)
{
    check_mode_norm(mode);
    const Eigen::VectorXd z = ss_function(mode.grid.nodes(), p);
    return trapezoid(z.cwiseAbs2().cwiseProduct(mode.amp.cwiseAbs2()), mode.grid.spacing());
}

double fidelity(const ModeSpectrum& mode, const SystemParams& p)
{
    check_mode_norm(mode);
    const Eigen::VectorXcd s = s_function(mode.grid.nodes(), p);
    const Eigen::VectorXcd s2 = s.cwiseProduct(s);
    const Eigen::VectorXd density = mode.amp.cwiseAbs2();
    const double q_e = trapezoid(s2.cwiseAbs2().cwiseProduct(density), mode.grid.spacing());
    if (!(q_e > 0.0)) {
        throw numerical_error("fidelity is undefined when the echo efficiency vanishes");
    }
    const std::complex<double> overlap
        = trapezoid(Eigen::VectorXcd(s2.cwiseProduct(density.cast<std::complex<double>>())),
                    mode.grid.spacing());
    return std::norm(overlap) / q_e;
}

double decay_factor(const SystemParams& p, double t0_storage)
{
    return std::exp(-4.0 * t0_storage * p.t2_inv);
}

EfficiencyReport efficiency_report(const ModeSpectrum& mode, const SystemParams& p, double t0_storage)
{
    EfficiencyReport r;
    r.q_st = storage_efficiency(mode, p);
    r.q_e = echo_efficiency(mode, p);
    r.fidelity = fidelity(mode, p);
    r.decay_factor = decay_factor(p, t0_storage);
    return r;
}

Eigen::VectorXcd echo_spectrum(const PulseTrain& train, const SystemParams& p, double t0_storage)
{
    if (train.modes.empty()) {
        throw config_error("pulse train is empty");
    }
    const FrequencyGrid& grid = train.modes.front().grid;
    const Eigen::VectorXd nu = grid.nodes();
    const Eigen::VectorXcd s = s_function(nu, p);
    const double amplitude_decay = std::exp(-2.0 * t0_storage * p.t2_inv);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(grid.n_points);
    for (const auto& mode : train.modes) {
        if (!(mode.grid == grid)) {
            throw config_error("echo_spectrum: modes are on different grids");
        }
        for (Eigen::Index i = 0; i < grid.n_points; ++i) {
            out(i) += s(i) * s(i) * mode.amp(i) * std::polar(amplitude_decay, nu(i) * (2.0 * t0_storage + mode.tau));
        }
    }
    return out;
}

Eigen::VectorXcd echo_waveform(const PulseTrain& train, const SystemParams& p, double t0_storage,
                               const TimeGrid& times)
{
    return spectrum_to_time(train.modes.front().grid, echo_spectrum(train, p, t0_storage), times);
}

MatchingReport matching_check(const SystemParams& p)
{
    MatchingReport r;
    r.impedance_residual = std::abs(derive_gamma_r(p) - p.gamma1) / p.gamma1;
    r.spectral_residual = std::abs(p.delta_in - 0.5 * p.gamma1) / p.gamma1;
    r.impedance_ok = r.impedance_residual <= matching_tolerance;
    r.spectral_ok = r.spectral_residual <= matching_tolerance;
    return r;
}

} // namespace raman_echo
