#include "raman_echo/pulses.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "raman_echo/core.hpp"

namespace raman_echo {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_aliasing(const FrequencyGrid& grid, const TimeGrid& times)
{
    const double nu_abs = std::max(std::abs(grid.nu_min), std::abs(grid.nu_max));
    if (times.n_points > 1 && !(times.dt * nu_abs < std::numbers::pi)) {
        std::ostringstream os;
        os << "time step " << times.dt << " violates the Nyquist bound pi/|nu|max = "
           << std::numbers::pi / nu_abs;
        throw numerical_error(os.str());
    }
}

// out_j = scale * sum_k in_k exp(sign * i * x_k * y_j); the phase for each
// output point is advanced by recurrence along the uniform input grid.
Eigen::VectorXcd uniform_fourier_sum(double x0, double dx, const Eigen::Ref<const Eigen::VectorXcd>& in,
                                     const Eigen::Ref<const Eigen::VectorXd>& y, double sign, double scale)
{
    Eigen::VectorXcd out(y.size());
    const Eigen::Index n = in.size();
    for (Eigen::Index j = 0; j < y.size(); ++j) {
        const std::complex<double> step = std::polar(1.0, sign * dx * y(j));
        std::complex<double> phase = std::polar(1.0, sign * x0 * y(j));
        std::complex<double> acc = 0.0;
        // Re-anchor the recurrence periodically to bound round-off drift.
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k % 256 == 0) {
                phase = std::polar(1.0, sign * (x0 + dx * static_cast<double>(k)) * y(j));
            }
            acc += in(k) * phase;
            phase *= step;
        }
        out(j) = scale * acc;
    }
    return out;
}

} // namespace

void validate(const FrequencyGrid& grid)
{
    if (!(grid.nu_min < 0.0 && grid.nu_max > 0.0)) {
        throw config_error("frequency grid must satisfy nu_min < 0 < nu_max");
    }
    if (grid.n_points < 3 || grid.n_points % 2 == 0) {
        throw config_error("frequency grid size must be odd and at least 3");
    }
}

TimeGrid make_time_grid(double t_start, double t_end, double dt_target)
{
    if (!(t_end > t_start) || !(dt_target > 0.0)) {
        throw config_error("time grid needs t_end > t_start and dt > 0");
    }
    const auto steps = static_cast<Eigen::Index>(std::ceil((t_end - t_start) / dt_target - 1e-9));
    TimeGrid g;
    g.t_start = t_start;
    g.n_points = steps + 1;
    g.dt = (t_end - t_start) / static_cast<double>(steps);
    return g;
}

TimeGrid conjugate_time_grid(const FrequencyGrid& grid)
{
    validate(grid);
    TimeGrid g;
    g.n_points = grid.n_points;
    g.dt = two_pi / (static_cast<double>(grid.n_points) * grid.spacing());
    g.t_start = -0.5 * g.dt * static_cast<double>(grid.n_points - 1);
    return g;
}

double trapezoid(const Eigen::Ref<const Eigen::VectorXd>& values, double spacing)
{
    const Eigen::Index n = values.size();
    if (n < 2) {
        return 0.0;
    }
    return spacing * (values.sum() - 0.5 * (values(0) + values(n - 1)));
}

std::complex<double> trapezoid(const Eigen::Ref<const Eigen::VectorXcd>& values, double spacing)
{
    const Eigen::Index n = values.size();
    if (n < 2) {
        return 0.0;
    }
    return spacing * (values.sum() - 0.5 * (values(0) + values(n - 1)));
}

double norm_squared(const ModeSpectrum& mode)
{
    return trapezoid(mode.amp.cwiseAbs2(), mode.grid.spacing());
}

double spectral_rms_width(const ModeSpectrum& mode)
{
    const Eigen::VectorXd nu = mode.grid.nodes();
    const Eigen::VectorXd density = mode.amp.cwiseAbs2();
    const double h = mode.grid.spacing();
    const double mass = trapezoid(density, h);
    const double mean = trapezoid(density.cwiseProduct(nu), h) / mass;
    const Eigen::VectorXd centred = (nu.array() - mean).square().matrix();
    return std::sqrt(trapezoid(density.cwiseProduct(centred), h) / mass);
}

void validate(const ModeSpectrum& mode)
{
    validate(mode.grid);
    if (mode.amp.size() != mode.grid.n_points) {
        throw config_error("mode amplitude size does not match its grid");
    }
    const double n2 = norm_squared(mode);
    if (std::abs(n2 - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "mode is not normalized: integral |f|^2 = " << n2;
        throw config_error(os.str());
    }
}

void validate(const PulseTrain& train)
{
    if (train.modes.empty()) {
        throw config_error("pulse train is empty");
    }
    for (std::size_t k = 0; k < train.modes.size(); ++k) {
        validate(train.modes[k]);
        if (!(train.modes[k].grid == train.modes.front().grid)) {
            throw config_error("all modes of a train must share one frequency grid");
        }
        if (k == 0) {
            continue;
        }
        const double gap = train.modes[k].tau - train.modes[k - 1].tau;
        const double duration = 1.0 / spectral_rms_width(train.modes[k]);
        if (!(gap > 0.0)) {
            throw config_error("arrival times must be strictly increasing");
        }
        if (gap < min_mode_separation_widths * duration) {
            std::ostringstream os;
            os << "modes " << k - 1 << " and " << k << " are separated by " << gap
               << ", less than " << min_mode_separation_widths << " temporal durations ("
               << min_mode_separation_widths * duration << ")";
            throw config_error(os.str());
        }
    }
}

ModeSpectrum gaussian_mode(const FrequencyGrid& grid, double dw_f, double tau)
{
    validate(grid);
    if (!(dw_f > 0.0)) {
        throw config_error("spectral width must be positive");
    }
    const double half_span = std::min(-grid.nu_min, grid.nu_max);
    const double lost = std::erfc(half_span / (std::numbers::sqrt2 * dw_f));
    if (lost > 1e-6) {
        std::ostringstream os;
        os << "frequency grid +-" << half_span << " truncates " << lost
           << " of the Gaussian mode norm (dw_f = " << dw_f << ")";
        throw config_error(os.str());
    }
    if (grid.spacing() > dw_f) {
        throw config_error("frequency grid spacing is coarser than the mode width");
    }
    ModeSpectrum mode;
    mode.grid = grid;
    mode.tau = tau;
    const Eigen::VectorXd nu = grid.nodes();
    mode.amp = (-nu.array().square() / (4.0 * dw_f * dw_f)).exp().cast<std::complex<double>>().matrix();
    mode.amp /= std::sqrt(norm_squared(mode));
    return mode;
}

Eigen::VectorXcd train_spectrum(const PulseTrain& train)
{
    if (train.modes.empty()) {
        throw config_error("pulse train is empty");
    }
    const FrequencyGrid& grid = train.modes.front().grid;
    const Eigen::VectorXd nu = grid.nodes();
    Eigen::VectorXcd total = Eigen::VectorXcd::Zero(grid.n_points);
    for (const auto& mode : train.modes) {
        if (!(mode.grid == grid) || mode.amp.size() != grid.n_points) {
            throw config_error("train_spectrum: modes are on different grids");
        }
        for (Eigen::Index i = 0; i < grid.n_points; ++i) {
            total(i) += std::polar(1.0, nu(i) * mode.tau) * mode.amp(i);
        }
    }
    return total;
}

Eigen::VectorXcd spectrum_to_time(const FrequencyGrid& grid,
                                  const Eigen::Ref<const Eigen::VectorXcd>& spectrum,
                                  const TimeGrid& times, double shift)
{
    if (spectrum.size() != grid.n_points) {
        throw config_error("spectrum size does not match its grid");
    }
    check_aliasing(grid, times);
    const Eigen::VectorXd t = (times.nodes().array() - shift).matrix();
    return uniform_fourier_sum(grid.nu_min, grid.spacing(), spectrum, t, -1.0,
                               grid.spacing() / std::sqrt(two_pi));
}

Eigen::VectorXcd time_to_spectrum(const TimeGrid& times,
                                  const Eigen::Ref<const Eigen::VectorXcd>& samples,
                                  const FrequencyGrid& grid, double shift)
{
    if (samples.size() != times.n_points) {
        throw config_error("sample count does not match the time grid");
    }
    check_aliasing(grid, times);
    const Eigen::VectorXd nu = grid.nodes();
    Eigen::VectorXcd out = uniform_fourier_sum(times.t_start - shift, times.dt, samples, nu, +1.0,
                                               times.dt / std::sqrt(two_pi));
    return out;
}

Eigen::VectorXcd spectrum_to_time(const ModeSpectrum& mode, const TimeGrid& times)
{
    return spectrum_to_time(mode.grid, mode.amp, times, mode.tau);
}

ModeSpectrum time_to_mode(const TimeGrid& times, const Eigen::Ref<const Eigen::VectorXcd>& samples,
                          const FrequencyGrid& grid, double tau)
{
    ModeSpectrum mode;
    mode.grid = grid;
    mode.tau = tau;
    mode.amp = time_to_spectrum(times, samples, grid, tau);
    return mode;
}

Eigen::VectorXcd train_to_time(const PulseTrain& train, const TimeGrid& times)
{
    if (train.modes.empty()) {
        throw config_error("pulse train is empty");
    }
    return spectrum_to_time(train.modes.front().grid, train_spectrum(train), times);
}

} // namespace raman_echo
