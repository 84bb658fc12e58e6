#ifndef RAMAN_ECHO_DYNAMICS_HPP
#define RAMAN_ECHO_DYNAMICS_HPP

#include <complex>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "raman_echo/core.hpp"
#include "raman_echo/ensemble.hpp"
#include "raman_echo/ode.hpp"
#include "raman_echo/pulses.hpp"

namespace raman_echo {

// Input field b_in(t), band-limited and resampled for cheap evaluation
// inside the integrator: cubic Hermite interpolation on a fine grid using
// exact samples and exact derivatives. Zero outside the sampled window.
class TimeSignal {
public:
    TimeSignal() = default;

    // Samples the train (sum over modes) on [t_start, t_end] with step dt.
    static TimeSignal from_train(const PulseTrain& train, double t_start, double t_end, double dt = 0.02);

    std::complex<double> operator()(double t) const;
    bool empty() const { return values_.size() == 0; }
    double t_start() const { return grid_.t_start; }
    double t_end() const { return grid_.n_points > 0 ? grid_.t_end() : grid_.t_start; }

private:
    TimeGrid grid_;
    Eigen::VectorXcd values_;
    Eigen::VectorXcd derivatives_;
};

// Time series from one integration run, sampled on a uniform output grid.
struct Trajectory {
    TimeGrid grid;
    Eigen::VectorXcd a_o;
    Eigen::VectorXcd b_in;
    // b_out = sqrt(gamma1) a_o - b_in
    Eigen::VectorXcd b_out;
    // Per-atom collective coherences sqrt(N) P12^j; column k is output node k * thin.
    Eigen::MatrixXcd p12;
    // Same for sqrt(N) P13^j (three-level model only).
    Eigen::MatrixXcd p13;
    Eigen::VectorXcd p12_final;
    Eigen::VectorXcd p13_final;
    IntegratorStats stats;

    // sum_j w_j |p12_j|^2 at the final node, with the ensemble mass normalization.
    double stored_excitation = 0.0;
};

struct SimulationOptions {
    IntegratorOptions integrator;
    double dt_out = 0.05;
    // Store p12 snapshots every `thin` output nodes (0 = final state only).
    Eigen::Index thin = 0;
    // Optical inhomogeneous detunings Delta_31^j for the three-level model (empty = 0).
    Eigen::VectorXd optical_detunings;
    // Three-level model: retune the cavity and the two-photon detuning so the
    // uniform dispersive pull N g^2/Delta0 and Stark shift |Omega1|^2/Delta0
    // cancel, as the effective model assumes.
    bool absorb_uniform_shifts = true;
    // Cavity amplitude at t_begin for the storage models.
    std::complex<double> initial_a = 0.0;
};

// Collective optical coupling G = g_bar sqrt(N / sum_j w_j |r_j|^2), r_j the
// relative couplings. Each isochromat carries mass_fraction * w_j of it, so the
// discretized pole sum approaches the full Lorentzian integral.
double optical_coupling(const SystemParams& p, const EnsembleSample& ens);

// Collective Raman coupling c = (Omega1/Delta0) G, so that |c|^2 sum_j w_j |r_j|^2
// = Gamma_r delta_in / 2. In the
// effective model the per-atom coupling is i c r_j (cavity equation) and
// i conj(c r_j) (coherence equation); the phase of c is that of Omega1/Delta0.
std::complex<double> collective_coupling(const SystemParams& p, const EnsembleSample& ens);

// da/dt  = -(gamma1/2) a + i (Omega1/Delta0) sum_j g_j P12^j + sqrt(gamma1) b_in(t)
// dP12/dt = -i (delta_j - i/T2) P12^j + i (Omega1*/Delta0) g_j* a
Trajectory simulate_storage_effective(const SystemParams& p, const EnsembleSample& ens,
                                      const TimeSignal& b_in, double t_begin, double t_end,
                                      const SimulationOptions& options = {});

// Three-level model with explicit optical coherences:
// da/dt   = -(gamma1/2 + i N g^2/Delta0) a + i sum_j g_j P13^j + sqrt(gamma1) b_in
// dP13/dt = -i (Delta31_j + Delta0) P13^j + i g_j* a + i Omega1 P12^j
// dP12/dt = -i (delta_j + |Omega1|^2/Delta0 - i/T2) P12^j + i Omega1* P13^j
// The N g^2/Delta0 and |Omega1|^2/Delta0 terms are the detuning offsets that
// cancel the dispersive and Stark shifts (see absorb_uniform_shifts); without
// them the model runs at the bare cavity and Raman frequencies.
Trajectory simulate_storage_full(const SystemParams& p, const EnsembleSample& ens,
                                 const TimeSignal& b_in, double t_begin, double t_end,
                                 const SimulationOptions& options = {});

// P13 = (g_j* a + Omega1 P12) / Delta0
std::complex<double> adiabatic_p13(std::complex<double> a_o, std::complex<double> p12_j,
                                   const SystemParams& p, std::complex<double> g_j);

// Source-free readout from given coherences with a_o(t_begin) = 0. The
// reading field equals the writing field. b_out = sqrt(gamma1) a_o.
Trajectory simulate_retrieval(const SystemParams& p, const EnsembleSample& ens,
                              const Eigen::Ref<const Eigen::VectorXcd>& initial_p12, double t_begin,
                              double t_end, const SimulationOptions& options = {});

// Energy of a sampled field, trapezoid rule.
double field_energy(const TimeGrid& grid, const Eigen::Ref<const Eigen::VectorXcd>& field);

// CSV columns: t, re_a_o, im_a_o, abs_b_out_sq
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& comment = {});

} // namespace raman_echo

#endif // RAMAN_ECHO_DYNAMICS_HPP
