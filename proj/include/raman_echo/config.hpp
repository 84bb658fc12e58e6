#ifndef RAMAN_ECHO_CONFIG_HPP
#define RAMAN_ECHO_CONFIG_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "raman_echo/core.hpp"
#include "raman_echo/ensemble.hpp"
#include "raman_echo/pipeline.hpp"
#include "raman_echo/pulses.hpp"

namespace raman_echo {

struct PulseSpec {
    std::string shape = "gaussian";
    double dw_f = 0.1;
    double tau = 0.0;
};

struct PipelineSettings {
    double t0_storage = 300.0;
    Eigen::Index k_atoms = 2001;
    PipelineOptions options;
    EnsembleOptions ensemble;
    // Use the three-level model for the storage-stage comparison run.
    bool compare_full_model = false;
};

struct GeometrySettings {
    CavityGeometry geometry;
    double gamma1_si = 1e8;
    // |Omega1/Delta0|^2 used by the absorption-coefficient matching line.
    double rabi_ratio_sq = 0.01;
};

// Parsed configuration. Sections and keys:
//   [system]   gamma1 delta_in t2_inv big_delta0 omega1 omega1_im rabi_ratio
//              n_atoms g_bar gamma_r gamma1_si allow_nonadiabatic
//   [grid]     nu_min nu_max n_points
//   [pulses]   pulse = <shape> <dw_f> <tau>   (repeatable)
//   [pipeline] T0 k_atoms rtol atol dt_out settle extent_sigmas input_dt
//              cutoff standing_wave seed fixed_step
//   [geometry] length_cm fill_chi gamma1_si rabi_ratio_sq
struct RunConfig {
    SystemParams system;
    FrequencyGrid grid;
    std::vector<PulseSpec> pulses;
    PipelineSettings pipeline;
    GeometrySettings geometry;
    // When set, g_bar is re-solved from this Raman absorption rate whenever
    // delta_in, N or the Rabi ratio change.
    std::optional<double> gamma_r_target;
    // FNV-1a over the normalized key/value content.
    std::uint64_t hash = 0;
    std::string source;
};

// Throws config_error carrying "source:line: message".
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

std::string hash_string(std::uint64_t hash);
std::uint64_t fnv1a(const std::string& text, std::uint64_t seed = 0xcbf29ce484222325ULL);

// Builds the validated pulse train on the configured grid.
PulseTrain build_train(const RunConfig& cfg);

// Sets a named scalar (delta_in, t2_inv, gamma_r, rabi_ratio, dw_f, T0, k_atoms,
// big_delta0, n_atoms, g_bar) keeping the other settings; used by sweeps.
void apply_parameter(RunConfig& cfg, const std::string& name, double value);

struct SweepSpec {
    std::string name;
    std::vector<double> values;
};

// "name=a:b:step" (inclusive, tolerant of rounding) or "name=v1,v2,...".
SweepSpec parse_sweep(const std::string& text);

} // namespace raman_echo

#endif // RAMAN_ECHO_CONFIG_HPP
