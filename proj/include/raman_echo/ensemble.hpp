#ifndef RAMAN_ECHO_ENSEMBLE_HPP
#define RAMAN_ECHO_ENSEMBLE_HPP

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace raman_echo {

enum class SamplingScheme {
    // Inverse-CDF strata of equal Lorentzian mass, node at each stratum's mass midpoint.
    stratified_midpoint,
};

// Discretized inhomogeneous ensemble (isochromats).
struct EnsembleSample {
    Eigen::VectorXd detunings;
    // Quadrature weights, sum to 1.
    Eigen::VectorXd weights;
    // Relative couplings g_j / g_bar (|.| = 1 at cavity antinodes).
    Eigen::VectorXcd couplings;
    // Lorentzian mass inside the truncation window; the continuum ensemble
    // is represented by mass_fraction * sum_j w_j (...).
    double mass_fraction = 1.0;

    Eigen::Index size() const { return detunings.size(); }
};

struct EnsembleOptions {
    SamplingScheme scheme = SamplingScheme::stratified_midpoint;
    // Truncation in units of delta_in.
    double cutoff = 50.0;
    // Draw cos(k r_j) standing-wave factors instead of uniform couplings.
    bool standing_wave = false;
    std::uint64_t seed = 12345;
};

// k_atoms must be odd and >= 3 (a nu = 0 isochromat is required).
EnsembleSample sample_ensemble(Eigen::Index k_atoms, double delta_in, const EnsembleOptions& options = {});

void validate(const EnsembleSample& ens);

// mass_fraction * sum_j w_j / (delta_j - nu - i t2_inv): the discretized
// counterpart of the Lorentzian pole integral.
std::complex<double> pole_sum(const EnsembleSample& ens, double nu, double t2_inv);

// sup_x |F_sample(x) - F_lorentz(x)| over the sample nodes, using the
// Lorentzian restricted to the truncation window.
double cdf_distance(const EnsembleSample& ens, double delta_in, double cutoff);

} // namespace raman_echo

#endif // RAMAN_ECHO_ENSEMBLE_HPP
