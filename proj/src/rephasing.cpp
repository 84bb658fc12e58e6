#include "raman_echo/rephasing.hpp"

#include <cmath>
#include <numbers>

#include "raman_echo/core.hpp"

namespace raman_echo {

namespace {

constexpr std::complex<double> I(0.0, 1.0);

} // namespace

TwoLevelOp TwoLevelOp::p12()
{
    TwoLevelOp op;
    op.m(0, 1) = 1.0;
    return op;
}

TwoLevelOp TwoLevelOp::p21()
{
    TwoLevelOp op;
    op.m(1, 0) = 1.0;
    return op;
}

TwoLevelOp TwoLevelOp::w()
{
    TwoLevelOp op;
    op.m(0, 0) = 1.0;
    op.m(1, 1) = -1.0;
    return op;
}

bool TwoLevelOp::is_unitary(double tol) const
{
    return (m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= tol;
}

TwoLevelOp conjugate(const TwoLevelOp& op, const TwoLevelOp& u)
{
    return {u.m.adjoint() * op.m * u.m};
}

TwoLevelOp raman_unitary(double theta, double phi)
{
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    TwoLevelOp u;
    u.m(0, 0) = c;
    u.m(1, 1) = c;
    u.m(0, 1) = -I * s * std::polar(1.0, -phi);
    u.m(1, 0) = -I * s * std::polar(1.0, phi);
    return u;
}

TwoLevelOp free_evolution(double delta, double t)
{
    TwoLevelOp u;
    u.m(0, 0) = 1.0;
    u.m(1, 1) = std::polar(1.0, -delta * t);
    return u;
}

Coherences rotate_coherence(double theta, double phi, std::complex<double> p12_in,
                            std::complex<double> p21_in, std::complex<double> w_in)
{
    const double c2 = std::pow(std::cos(0.5 * theta), 2);
    const double s2 = std::pow(std::sin(0.5 * theta), 2);
    const double st = std::sin(theta);
    const std::complex<double> e1 = std::polar(1.0, phi);
    const std::complex<double> e2 = std::polar(1.0, 2.0 * phi);

    Coherences out;
    out.p12 = c2 * p12_in + s2 * e2 * p21_in - 0.5 * I * e1 * st * w_in;
    out.p21 = c2 * p21_in + s2 * std::conj(e2) * p12_in + 0.5 * I * std::conj(e1) * st * w_in;
    out.w = std::cos(theta) * w_in + I * st * (e1 * p21_in - std::conj(e1) * p12_in);
    return out;
}

TwoLevelOp sequence_operator(double delta, double t0_storage, const ControlPair& first,
                             const ControlPair& second)
{
    const TwoLevelOp total = raman_unitary(second.theta, second.phase_phi)
        * free_evolution(delta, t0_storage) * raman_unitary(first.theta, first.phase_phi);
    return conjugate(TwoLevelOp::p12(), total);
}

std::complex<double> sequence_multiplier(double delta, double t0_storage, double theta, double phase_phi)
{
    const ControlPair first{theta, phase_phi, 0.0};
    const ControlPair second{theta, phase_phi + rephasing_pair_phase_offset, 0.0};
    return sequence_operator(delta, t0_storage, first, second).m(0, 1);
}

std::complex<double> sequence_map(double delta, double t0_storage, double phase_phi)
{
    return sequence_multiplier(delta, t0_storage, std::numbers::pi, phase_phi);
}

double stark_detuning(double delta_j, std::complex<double> omega2, std::complex<double> omega3,
                      double delta02)
{
    if (delta02 == 0.0) {
        throw config_error("stark_detuning: Delta02 must be non-zero");
    }
    return delta_j - (std::norm(omega2) - std::norm(omega3)) / delta02;
}

OpticalCoherences adiabatic_optical_coherences(double omega2, double omega3, double phase2, double phase3,
                                               std::complex<double> p11, std::complex<double> p33,
                                               std::complex<double> p22, std::complex<double> p12,
                                               std::complex<double> p21, double delta02)
{
    if (delta02 == 0.0) {
        throw config_error("adiabatic_optical_coherences: Delta02 must be non-zero");
    }
    const std::complex<double> field2 = std::polar(omega2, phase2);
    const std::complex<double> field3 = std::polar(omega3, phase3);
    OpticalCoherences out;
    out.p13 = (field2 * (p11 - p33) + field3 * p12) / delta02;
    out.p23 = (field3 * (p22 - p33) + field2 * p21) / delta02;
    return out;
}

std::complex<double> pulse_area_closed_form(double theta_in, double alpha_r13, double z)
{
    return theta_in * std::polar(1.0, 0.5 * alpha_r13 * z);
}

PulseAreaProfile pulse_area_propagate(double theta_in, double alpha_r13, double length_z,
                                      Eigen::Index n_steps, const PulseAreaOptions& options)
{
    if (n_steps < 1 || options.n_tau < 3 || !(length_z >= 0.0) || options.delta02 == 0.0) {
        throw config_error("pulse_area_propagate: need n_steps >= 1, n_tau >= 3, L_z >= 0, Delta02 != 0");
    }
    const double alpha13 = alpha_r13;
    const double alpha23 = options.alpha_r23 < 0.0 ? alpha_r13 : options.alpha_r23;
    const Eigen::Index n = options.n_tau;
    const double delta02 = options.delta02;

    // Gaussian envelope exp(-tau^2/2) on [-6, 6]; amplitude fixes the total area.
    const Eigen::VectorXd tau = Eigen::VectorXd::LinSpaced(n, -6.0, 6.0);
    const double dtau = tau(1) - tau(0);
    const Eigen::VectorXd shape = (-0.5 * tau.array().square()).exp().matrix();
    const double ratio = options.omega3_over_omega2;
    const double shape_area = 2.0 * ratio * dtau * (shape.squaredNorm() - 0.5 * (shape(0) * shape(0) + shape(n - 1) * shape(n - 1))) / delta02;
    const double amplitude = std::sqrt(std::abs(theta_in / shape_area));

    // state = [Omega2(tau); Omega3(tau)]
    Eigen::VectorXcd state(2 * n);
    state.head(n) = (amplitude * shape).cast<std::complex<double>>();
    state.tail(n) = (ratio * amplitude * shape).cast<std::complex<double>>();

    auto cumulative_area = [&](const Eigen::VectorXcd& s) {
        Eigen::VectorXcd theta(n);
        theta(0) = 0.0;
        for (Eigen::Index i = 1; i < n; ++i) {
            const std::complex<double> left = s(i - 1) * s(n + i - 1);
            const std::complex<double> right = s(i) * s(n + i);
            theta(i) = theta(i - 1) + dtau * (left + right) / delta02;
        }
        return theta;
    };

    auto rhs = [&](const Eigen::VectorXcd& s) {
        const Eigen::VectorXcd theta = cumulative_area(s);
        Eigen::VectorXcd d(2 * n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::complex<double> om2 = s(i);
            const std::complex<double> om3 = s(n + i);
            const std::complex<double> th = theta(i);
            const std::complex<double> sin_th = std::sin(th);
            const std::complex<double> cos_half_sq = std::pow(std::cos(0.5 * th), 2);
            const std::complex<double> sin_half_sq = std::pow(std::sin(0.5 * th), 2);
            d(i) = -0.5 * alpha13 * (0.5 * om3 * sin_th - I * om2 * cos_half_sq);
            d(n + i) = 0.5 * alpha23 * (0.5 * om2 * sin_th + I * om3 * sin_half_sq);
        }
        return d;
    };

    PulseAreaProfile profile;
    profile.z = Eigen::VectorXd::LinSpaced(n_steps + 1, 0.0, length_z);
    profile.theta_numeric.resize(n_steps + 1);
    profile.theta_closed_form.resize(n_steps + 1);

    const double h = length_z / static_cast<double>(n_steps);
    const std::complex<double> theta0 = cumulative_area(state)(n - 1);
    profile.theta_numeric(0) = theta0;
    for (Eigen::Index step = 0; step < n_steps; ++step) {
        const Eigen::VectorXcd k1 = rhs(state);
        const Eigen::VectorXcd k2 = rhs(state + 0.5 * h * k1);
        const Eigen::VectorXcd k3 = rhs(state + 0.5 * h * k2);
        const Eigen::VectorXcd k4 = rhs(state + h * k3);
        state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        profile.theta_numeric(step + 1) = cumulative_area(state)(n - 1);
    }

    const double mag0 = std::abs(theta0);
    for (Eigen::Index k = 0; k <= n_steps; ++k) {
        profile.theta_closed_form(k) = theta0 * std::polar(1.0, 0.5 * alpha13 * profile.z(k));
        profile.max_relative_magnitude_deviation = std::max(
            profile.max_relative_magnitude_deviation, std::abs(std::abs(profile.theta_numeric(k)) - mag0) / mag0);
        profile.max_closed_form_deviation = std::max(
            profile.max_closed_form_deviation,
            std::abs(profile.theta_numeric(k) - profile.theta_closed_form(k)) / mag0);
    }
    profile.phase_rotation = std::arg(profile.theta_numeric(n_steps) / theta0);
    return profile;
}

} // namespace raman_echo
