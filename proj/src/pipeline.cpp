#include "raman_echo/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "raman_echo/rephasing.hpp"
#include "raman_echo/spectral.hpp"

namespace raman_echo {

namespace {

constexpr std::complex<double> I(0.0, 1.0);

// Trapezoid over nodes [lo, hi] of a uniform grid.
template <typename Values>
auto window_trapezoid(const Values& v, Eigen::Index lo, Eigen::Index hi, double dt)
{
    using Scalar = typename Values::Scalar;
    if (hi <= lo) {
        return Scalar(0);
    }
    Scalar sum = v.segment(lo, hi - lo + 1).sum();
    sum -= Scalar(0.5) * (v(lo) + v(hi));
    return sum * dt;
}

Eigen::Index nearest_node(const TimeGrid& grid, double t)
{
    const double x = std::round((t - grid.t_start) / grid.dt);
    return std::clamp(static_cast<Eigen::Index>(x), Eigen::Index{0}, grid.n_points - 1);
}

} // namespace

double mode_extent(const ModeSpectrum& mode, const PipelineOptions& options)
{
    const double width = spectral_rms_width(mode);
    if (!(width > 0.0)) {
        throw config_error("mode has zero spectral width");
    }
    return options.extent_sigmas / (2.0 * width);
}

PipelineTimeline pipeline_timeline(const PulseTrain& train, double t0_storage, const PipelineOptions& options)
{
    validate(train);
    if (!(options.settle >= 0.0) || !(options.extent_sigmas > 0.0)) {
        throw config_error("pipeline: settle must be >= 0 and extent_sigmas > 0");
    }
    const ModeSpectrum& first = train.modes.front();
    const ModeSpectrum& last = train.modes.back();
    PipelineTimeline tl;
    tl.storage_begin = first.tau - mode_extent(first, options);
    tl.switch_off = last.tau + mode_extent(last, options) + options.settle;
    tl.second_pair = tl.switch_off + t0_storage;
    // Mirror image: the first mode is as far from its echo when reading
    // starts as it was from switch-off when writing ended.
    const double lead = tl.switch_off - first.tau;
    tl.read_begin = 2.0 * t0_storage + first.tau - lead;
    tl.read_end = 2.0 * t0_storage + last.tau + (tl.switch_off - last.tau);
    if (tl.read_begin < tl.second_pair) {
        std::ostringstream os;
        os << "storage time T0 = " << t0_storage << " is too short: the echo window opens at " << tl.read_begin
           << " before the second control pair at " << tl.second_pair << "; need T0 >= "
           << 2.0 * lead;
        throw config_error(os.str());
    }
    return tl;
}

PipelineResult run_pipeline(const SystemParams& p, const EnsembleSample& ens, const PulseTrain& train,
                            double t0_storage, const PipelineOptions& options)
{
    PipelineResult out;
    out.timeline = pipeline_timeline(train, t0_storage, options);
    const PipelineTimeline& tl = out.timeline;

    const TimeSignal b_in = TimeSignal::from_train(train, tl.storage_begin, tl.switch_off, options.input_dt);
    out.storage = simulate_storage_effective(p, ens, b_in, tl.storage_begin, tl.switch_off, options.simulation);

    // Two pi pairs at switch_off and switch_off + T0, then free precession
    // with the reading field still off until read_begin.
    const double drift = tl.read_begin - tl.second_pair;
    const double damping = std::exp(-p.t2_inv * (tl.read_begin - tl.switch_off));
    out.rephased_p12.resize(ens.size());
    for (Eigen::Index j = 0; j < ens.size(); ++j) {
        const double delta = ens.detunings(j);
        out.rephased_p12(j) = sequence_map(delta, t0_storage) * std::exp(-I * delta * drift) * damping
            * out.storage.p12_final(j);
    }
    out.retrieval = simulate_retrieval(p, ens, out.rephased_p12, tl.read_begin, tl.read_end, options.simulation);

    PipelineReport& rep = out.report;
    const FrequencyGrid& fgrid = train.modes.front().grid;
    const Eigen::VectorXcd spectrum = train_spectrum(train);
    rep.input_energy = trapezoid(spectrum.cwiseAbs2().eval(), fgrid.spacing());
    rep.q_st = out.storage.stored_excitation / rep.input_energy;
    const TimeGrid& grid = out.retrieval.grid;
    const Eigen::VectorXcd& b_out = out.retrieval.b_out;
    const double echo_energy = field_energy(grid, b_out);
    rep.echo_energy_ratio = echo_energy / rep.input_energy;
    rep.decay_factor = decay_factor(p, t0_storage);
    rep.q_e = rep.echo_energy_ratio / rep.decay_factor;

    const Eigen::VectorXcd delayed = spectrum_to_time(fgrid, spectrum, grid, 2.0 * t0_storage);
    const std::complex<double> overlap = trapezoid((delayed.conjugate().cwiseProduct(b_out)).eval(), grid.dt);
    rep.fidelity = echo_energy > 0.0 ? std::norm(overlap) / (echo_energy * rep.input_energy) : 0.0;

    const std::size_t m = train.modes.size();
    const Eigen::VectorXd intensity = b_out.cwiseAbs2();
    for (std::size_t k = 0; k < m; ++k) {
        const ModeSpectrum& mode = train.modes[k];
        ModeEcho echo;
        echo.tau = mode.tau;
        echo.expected_peak = 2.0 * t0_storage + mode.tau;
        const double left = k == 0 ? grid.t_start : 2.0 * t0_storage + 0.5 * (train.modes[k - 1].tau + mode.tau);
        const double right = k + 1 == m ? grid.t_end() : 2.0 * t0_storage + 0.5 * (mode.tau + train.modes[k + 1].tau);
        const Eigen::Index lo = nearest_node(grid, left);
        const Eigen::Index hi = nearest_node(grid, right);
        Eigen::Index arg = lo;
        intensity.segment(lo, hi - lo + 1).maxCoeff(&arg);
        echo.peak_time = grid.node(lo + arg);

        const double mode_in = norm_squared(mode);
        const double energy = window_trapezoid(intensity, lo, hi, grid.dt);
        echo.energy_ratio = energy / mode_in;
        const Eigen::VectorXcd ref = spectrum_to_time(fgrid, mode.amp, grid, echo.expected_peak);
        const Eigen::VectorXcd prod = ref.conjugate().cwiseProduct(b_out);
        const std::complex<double> ov = window_trapezoid(prod, lo, hi, grid.dt);
        echo.fidelity = energy > 0.0 ? std::norm(ov) / (energy * mode_in) : 0.0;
        rep.modes.push_back(echo);
    }
    return out;
}

} // namespace raman_echo
