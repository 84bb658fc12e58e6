#ifndef RAMAN_ECHO_REPHASING_HPP
#define RAMAN_ECHO_REPHASING_HPP

#include <complex>

#include <Eigen/Dense>

namespace raman_echo {

// Operator on span{|1>, |2>}; index 0 is |1>, index 1 is |2>.
struct TwoLevelOp {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();

    static TwoLevelOp identity() { return {Eigen::Matrix2cd::Identity()}; }
    // |1><2|
    static TwoLevelOp p12();
    // |2><1|
    static TwoLevelOp p21();
    // P11 - P22
    static TwoLevelOp w();

    TwoLevelOp adjoint() const { return {m.adjoint()}; }
    bool is_unitary(double tol = 1e-12) const;
};

inline TwoLevelOp operator*(const TwoLevelOp& a, const TwoLevelOp& b) { return {a.m * b.m}; }

// Heisenberg-picture map U^dagger op U.
TwoLevelOp conjugate(const TwoLevelOp& op, const TwoLevelOp& u);

// exp{-i theta/2 [P12 exp(-i phi) + P21 exp(i phi)]}, in closed form.
TwoLevelOp raman_unitary(double theta, double phi);

// exp{-i delta t P22}: free precession between control pairs.
TwoLevelOp free_evolution(double delta, double t);

// Expectation values of the |1>-|2> operators.
struct Coherences {
    std::complex<double> p12;
    std::complex<double> p21;
    std::complex<double> w;
};

// Effect of one control pair of area theta on (P12, P21, W):
//   P12 -> cos^2(theta/2) P12 + sin^2(theta/2) exp(2 i phi) P21 - (i/2) exp(i phi) sin(theta) W
//   W   -> cos(theta) W + i sin(theta) (exp(i phi) P21 - exp(-i phi) P12)
// which is conjugation by raman_unitary(theta, phi).
Coherences rotate_coherence(double theta, double phi, std::complex<double> p12_in,
                            std::complex<double> p21_in, std::complex<double> w_in);

// One control pair acting at a given instant.
struct ControlPair {
    double theta = 0.0;
    double phase_phi = 0.0;
    double delta02 = 0.0;
};

// Heisenberg operator P12 after pair `first`, free precession T0 at detuning
// delta, then pair `second`.
TwoLevelOp sequence_operator(double delta, double t0_storage, const ControlPair& first,
                             const ControlPair& second);

// Relative phase of the second control pair in the rephasing sequence.
inline constexpr double rephasing_pair_phase_offset = 1.5707963267948966;

// Multiplier m with P12(after) = m P12(t0) for two pi pairs separated by T0;
// evaluates to -exp(i delta T0). Independent of the common pair phase.
std::complex<double> sequence_map(double delta, double t0_storage, double phase_phi = 0.0);

// Generalized multiplier for pairs of area theta (P12 component of the
// sequence operator); theta = pi reproduces sequence_map.
std::complex<double> sequence_multiplier(double delta, double t0_storage, double theta,
                                         double phase_phi = 0.0);

// delta - (|Omega2|^2 - |Omega3|^2) / Delta02
double stark_detuning(double delta_j, std::complex<double> omega2, std::complex<double> omega3,
                      double delta02);

struct OpticalCoherences {
    std::complex<double> p13;
    std::complex<double> p23;
};

// Adiabatic optical coherences under the two rephasing control fields.
// Throws config_error when delta02 = 0.
OpticalCoherences adiabatic_optical_coherences(double omega2, double omega3, double phase2, double phase3,
                                               std::complex<double> p11, std::complex<double> p33,
                                               std::complex<double> p22, std::complex<double> p12,
                                               std::complex<double> p21, double delta02);

struct PulseAreaOptions {
    // Absorption coefficient on the 2-3 transition; negative means equal to alpha_r13.
    double alpha_r23 = -1.0;
    Eigen::Index n_tau = 401;
    double delta02 = 1.0;
    // Relative imbalance Omega3/Omega2 at the input face (1 = balanced).
    double omega3_over_omega2 = 1.0;
};

struct PulseAreaProfile {
    Eigen::VectorXd z;
    // Total pulse area Theta(tau_end, Z) from the numeric propagation.
    Eigen::VectorXcd theta_numeric;
    // Balanced closed form Theta(0) exp(i alpha_r13 Z / 2).
    Eigen::VectorXcd theta_closed_form;
    // max_Z | |Theta(Z)| - |Theta(0)| | / |Theta(0)|
    double max_relative_magnitude_deviation = 0.0;
    // max_Z |Theta_numeric - Theta_closed| / |Theta(0)|
    double max_closed_form_deviation = 0.0;
    // arg(Theta(L)/Theta(0)) from the numeric branch.
    double phase_rotation = 0.0;
};

// Control-field propagation across the medium (moving frame Z, tau):
//   dOmega2/dZ = -(alpha13/2) [ (Omega3/2) sin Theta - i Omega2 cos^2(Theta/2) ]
//   dOmega3/dZ = +(alpha23/2) [ (Omega2/2) sin Theta + i Omega3 sin^2(Theta/2) ]
// with Theta(tau) = 2 int^tau Omega2 Omega3 / Delta02, integrated by RK4 in Z
// over n_steps on a Gaussian input envelope of total area theta_in.
PulseAreaProfile pulse_area_propagate(double theta_in, double alpha_r13, double length_z,
                                      Eigen::Index n_steps, const PulseAreaOptions& options = {});

// Balanced closed form.
std::complex<double> pulse_area_closed_form(double theta_in, double alpha_r13, double z);

} // namespace raman_echo

#endif // RAMAN_ECHO_REPHASING_HPP
