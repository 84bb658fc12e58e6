#include "raman_echo/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "raman_echo/core.hpp"

namespace raman_echo {

namespace {

double lorentz_cdf(double x, double delta_in)
{
    return 0.5 + std::atan(x / delta_in) / std::numbers::pi;
}

} // namespace

EnsembleSample sample_ensemble(Eigen::Index k_atoms, double delta_in, const EnsembleOptions& options)
{
    if (k_atoms < 3 || k_atoms % 2 == 0) {
        throw config_error("k_atoms must be odd and at least 3");
    }
    if (!(delta_in > 0.0) || !(options.cutoff > 0.0)) {
        throw config_error("sample_ensemble needs delta_in > 0 and cutoff > 0");
    }

    const double u_lo = lorentz_cdf(-options.cutoff * delta_in, delta_in);
    const double u_hi = lorentz_cdf(options.cutoff * delta_in, delta_in);
    const double mass = u_hi - u_lo;
    const double stratum = mass / static_cast<double>(k_atoms);
    const Eigen::Index centre = k_atoms / 2;

    EnsembleSample ens;
    ens.mass_fraction = mass;
    ens.detunings.resize(k_atoms);
    ens.weights = Eigen::VectorXd::Constant(k_atoms, 1.0 / static_cast<double>(k_atoms));
    // Offsets from the median keep the node set exactly antisymmetric.
    for (Eigen::Index j = 0; j < k_atoms; ++j) {
        const double offset = stratum * static_cast<double>(j - centre);
        ens.detunings(j) = delta_in * std::tan(std::numbers::pi * offset);
    }

    ens.couplings = Eigen::VectorXcd::Ones(k_atoms);
    if (options.standing_wave) {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        for (Eigen::Index j = 0; j < k_atoms; ++j) {
            ens.couplings(j) = std::cos(phase(rng));
        }
    }
    return ens;
}

void validate(const EnsembleSample& ens)
{
    const Eigen::Index n = ens.size();
    if (n < 1 || ens.weights.size() != n || ens.couplings.size() != n) {
        throw config_error("ensemble arrays have inconsistent sizes");
    }
    if ((ens.weights.array() <= 0.0).any()) {
        throw config_error("ensemble weights must be positive");
    }
    if (std::abs(ens.weights.sum() - 1.0) > 1e-12) {
        throw config_error("ensemble weights must sum to 1");
    }
}

std::complex<double> pole_sum(const EnsembleSample& ens, double nu, double t2_inv)
{
    std::complex<double> acc = 0.0;
    for (Eigen::Index j = 0; j < ens.size(); ++j) {
        acc += ens.weights(j) / std::complex<double>(ens.detunings(j) - nu, -t2_inv);
    }
    return ens.mass_fraction * acc;
}

double cdf_distance(const EnsembleSample& ens, double delta_in, double cutoff)
{
    const double lo = lorentz_cdf(-cutoff * delta_in, delta_in);
    const double mass = lorentz_cdf(cutoff * delta_in, delta_in) - lo;
    double cumulative = 0.0;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < ens.size(); ++j) {
        const double exact = (lorentz_cdf(ens.detunings(j), delta_in) - lo) / mass;
        worst = std::max(worst, std::abs(cumulative - exact));
        cumulative += ens.weights(j);
        worst = std::max(worst, std::abs(cumulative - exact));
    }
    return worst;
}

} // namespace raman_echo
