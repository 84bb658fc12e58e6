#ifndef RAMAN_ECHO_PULSES_HPP
#define RAMAN_ECHO_PULSES_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace raman_echo {

// Uniform grid over the signal detuning nu (units of gamma1). n_points is
// odd so that nu = 0 is a node when the grid is symmetric.
struct FrequencyGrid {
    double nu_min = -10.0;
    double nu_max = 10.0;
    Eigen::Index n_points = 4001;

    double spacing() const { return (nu_max - nu_min) / static_cast<double>(n_points - 1); }
    double node(Eigen::Index i) const { return nu_min + spacing() * static_cast<double>(i); }
    Eigen::VectorXd nodes() const { return Eigen::VectorXd::LinSpaced(n_points, nu_min, nu_max); }
    bool operator==(const FrequencyGrid&) const = default;
};

void validate(const FrequencyGrid& grid);

// Uniform time grid t_i = t_start + i * dt.
struct TimeGrid {
    double t_start = 0.0;
    double dt = 0.05;
    Eigen::Index n_points = 0;

    double node(Eigen::Index i) const { return t_start + dt * static_cast<double>(i); }
    double t_end() const { return node(n_points - 1); }
    Eigen::VectorXd nodes() const
    {
        return Eigen::VectorXd::LinSpaced(n_points, t_start, t_end());
    }
};

// Covering [t_start, t_end] with step close to dt_target (the end point is included).
TimeGrid make_time_grid(double t_start, double t_end, double dt_target);

// Time grid whose DFT pairs exactly with the frequency grid: same size,
// dt = 2 pi / (N dnu), centred on t = 0.
TimeGrid conjugate_time_grid(const FrequencyGrid& grid);

// Spectral amplitude f_k(nu) of one temporal mode arriving at tau.
struct ModeSpectrum {
    FrequencyGrid grid;
    Eigen::VectorXcd amp;
    double tau = 0.0;
};

struct PulseTrain {
    std::vector<ModeSpectrum> modes;
};

// Minimum arrival-time separation in units of the inverse spectral width.
inline constexpr double min_mode_separation_widths = 5.0;

// Trapezoid quadrature on a uniform grid.
double trapezoid(const Eigen::Ref<const Eigen::VectorXd>& values, double spacing);
std::complex<double> trapezoid(const Eigen::Ref<const Eigen::VectorXcd>& values, double spacing);

double norm_squared(const ModeSpectrum& mode);

// r.m.s. width of |f(nu)|^2 about its centroid.
double spectral_rms_width(const ModeSpectrum& mode);

// Throws unless the mode is on a valid grid and has unit norm within 1e-6.
void validate(const ModeSpectrum& mode);
void validate(const PulseTrain& train);

// |f(nu)|^2 proportional to exp(-nu^2 / (2 dw_f^2)), flat phase, unit norm on the grid.
ModeSpectrum gaussian_mode(const FrequencyGrid& grid, double dw_f, double tau);

// b_in(nu) = sum_k exp(i nu tau_k) f_k(nu).
Eigen::VectorXcd train_spectrum(const PulseTrain& train);

// f(t) = (1/sqrt(2 pi)) sum_nu dnu f(nu) exp(-i nu (t - shift)).
// Throws numerical_error when dt >= pi / max|nu| (aliasing).
Eigen::VectorXcd spectrum_to_time(const FrequencyGrid& grid,
                                  const Eigen::Ref<const Eigen::VectorXcd>& spectrum,
                                  const TimeGrid& times, double shift = 0.0);

// f(nu) = (1/sqrt(2 pi)) sum_t dt f(t) exp(i nu (t - shift)).
Eigen::VectorXcd time_to_spectrum(const TimeGrid& times,
                                  const Eigen::Ref<const Eigen::VectorXcd>& samples,
                                  const FrequencyGrid& grid, double shift = 0.0);

// Temporal waveform of a mode, i.e. f_k(t - tau_k).
Eigen::VectorXcd spectrum_to_time(const ModeSpectrum& mode, const TimeGrid& times);
ModeSpectrum time_to_mode(const TimeGrid& times, const Eigen::Ref<const Eigen::VectorXcd>& samples,
                          const FrequencyGrid& grid, double tau);

// Band-limited evaluation at arbitrary times: sum of all modes of the train.
Eigen::VectorXcd train_to_time(const PulseTrain& train, const TimeGrid& times);

} // namespace raman_echo

#endif // RAMAN_ECHO_PULSES_HPP
