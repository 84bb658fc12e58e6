#ifndef RAMAN_ECHO_PIPELINE_HPP
#define RAMAN_ECHO_PIPELINE_HPP

#include <vector>

#include <Eigen/Dense>

#include "raman_echo/core.hpp"
#include "raman_echo/dynamics.hpp"
#include "raman_echo/ensemble.hpp"
#include "raman_echo/pulses.hpp"

namespace raman_echo {

struct PipelineOptions {
    SimulationOptions simulation;
    // Margin after the last input mode before the writing field is switched off.
    double settle = 5.0;
    // Half-width of each mode's time window, in units of its temporal r.m.s. width.
    double extent_sigmas = 12.0;
    // Sampling step of the interpolated input field.
    double input_dt = 0.02;
};

struct ModeEcho {
    double tau = 0.0;
    // 2 T0 + tau
    double expected_peak = 0.0;
    // argmax |b_out| inside the mode's echo window
    double peak_time = 0.0;
    // Echo energy in the mode's window over the mode's input energy.
    double energy_ratio = 0.0;
    // Normalized overlap with the delayed input mode.
    double fidelity = 0.0;
};

struct PipelineReport {
    double input_energy = 0.0;
    // Stored excitation at switch-off over input energy.
    double q_st = 0.0;
    // Raw echo energy over input energy.
    double echo_energy_ratio = 0.0;
    // echo_energy_ratio with the decoherence factor exp(-4 T0/T2) divided out.
    double q_e = 0.0;
    double decay_factor = 1.0;
    // |<b_in(t - 2 T0), b_out>|^2 / (E_in E_out) over the whole train.
    double fidelity = 0.0;
    std::vector<ModeEcho> modes;
};

struct PipelineTimeline {
    double storage_begin = 0.0;
    // Writing field off, first control pair.
    double switch_off = 0.0;
    // Second control pair at switch_off + T0.
    double second_pair = 0.0;
    // Reading field on.
    double read_begin = 0.0;
    double read_end = 0.0;
};

struct PipelineResult {
    PipelineTimeline timeline;
    Trajectory storage;
    Trajectory retrieval;
    // Coherences handed to the retrieval stage.
    Eigen::VectorXcd rephased_p12;
    PipelineReport report;
};

// Window half-width used around each mode: extent_sigmas times the temporal
// r.m.s. width 1/(2 dw_rms).
double mode_extent(const ModeSpectrum& mode, const PipelineOptions& options);

// Store, rephase (two pi pairs separated by T0, applied as the exact map),
// read out. The reading field is switched on once the ensemble has drifted
// back to within the storage window of the echo, so the retrieval run is
// the time mirror of the storage run. Throws config_error when T0 is too
// short for that ordering.
PipelineTimeline pipeline_timeline(const PulseTrain& train, double t0_storage, const PipelineOptions& options = {});

PipelineResult run_pipeline(const SystemParams& p, const EnsembleSample& ens, const PulseTrain& train,
                            double t0_storage, const PipelineOptions& options = {});

} // namespace raman_echo

#endif // RAMAN_ECHO_PIPELINE_HPP
