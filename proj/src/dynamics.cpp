#include "raman_echo/dynamics.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "raman_echo/diagnostics.hpp"

namespace raman_echo {

namespace {

constexpr std::complex<double> I(0.0, 1.0);

// Runs an integrator over the output grid and collects the cavity field and
// coherence snapshots. `p12_offset` is the index of the first P12 component.
template <typename Rhs>
Trajectory integrate_on_grid(Rhs rhs, Eigen::VectorXcd y, const TimeGrid& grid, Eigen::Index n_atoms,
                             Eigen::Index p12_offset, Eigen::Index p13_offset, const SimulationOptions& options)
{
    auto integrator = make_integrator(std::move(rhs), options.integrator);
    Trajectory traj;
    traj.grid = grid;
    traj.a_o.resize(grid.n_points);
    const Eigen::Index n_snap = options.thin > 0 ? (grid.n_points - 1) / options.thin + 1 : 0;
    traj.p12.resize(n_snap > 0 ? n_atoms : 0, n_snap);
    if (p13_offset >= 0) {
        traj.p13.resize(n_snap > 0 ? n_atoms : 0, n_snap);
    }

    double t = grid.t_start;
    for (Eigen::Index k = 0; k < grid.n_points; ++k) {
        integrator.advance(t, y, grid.node(k));
        traj.a_o(k) = y(0);
        if (options.thin > 0 && k % options.thin == 0) {
            traj.p12.col(k / options.thin) = y.segment(p12_offset, n_atoms);
            if (p13_offset >= 0) {
                traj.p13.col(k / options.thin) = y.segment(p13_offset, n_atoms);
            }
        }
    }
    traj.p12_final = y.segment(p12_offset, n_atoms);
    if (p13_offset >= 0) {
        traj.p13_final = y.segment(p13_offset, n_atoms);
    }
    traj.stats = integrator.stats();
    return traj;
}

void finish_storage(Trajectory& traj, const SystemParams& p, const EnsembleSample& ens, const TimeSignal& b_in)
{
    const Eigen::Index n = traj.grid.n_points;
    traj.b_in.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        traj.b_in(k) = b_in.empty() ? 0.0 : b_in(traj.grid.node(k));
    }
    traj.b_out = std::sqrt(p.gamma1) * traj.a_o - traj.b_in;
    traj.stored_excitation
        = ens.mass_fraction * (ens.weights.array() * traj.p12_final.array().abs2()).sum();

    const double peak = traj.a_o.cwiseAbs2().maxCoeff();
    const double last = std::norm(traj.a_o(n - 1));
    if (peak > 0.0 && last > 1e-4 * peak) {
        std::ostringstream os;
        os << "cavity field has not decayed at the end of storage (|a|^2 = " << last << ", peak " << peak
           << "); check the matching conditions or extend the window";
        warn(os.str());
    }
}

TimeGrid output_grid(double t_begin, double t_end, double dt_out)
{
    if (!(t_end > t_begin)) {
        throw config_error("simulation window must satisfy t_end > t_begin");
    }
    return make_time_grid(t_begin, t_end, dt_out);
}

} // namespace

TimeSignal TimeSignal::from_train(const PulseTrain& train, double t_start, double t_end, double dt)
{
    validate(train);
    TimeSignal s;
    s.grid_ = make_time_grid(t_start, t_end, dt);
    const FrequencyGrid& fgrid = train.modes.front().grid;
    const Eigen::VectorXcd spectrum = train_spectrum(train);
    s.values_ = spectrum_to_time(fgrid, spectrum, s.grid_);
    // d/dt of the inverse transform multiplies each component by -i nu.
    const Eigen::VectorXcd weighted = (-I * fgrid.nodes().cast<std::complex<double>>()).cwiseProduct(spectrum);
    s.derivatives_ = spectrum_to_time(fgrid, weighted, s.grid_);
    return s;
}

std::complex<double> TimeSignal::operator()(double t) const
{
    if (values_.size() == 0 || t < grid_.t_start || t > grid_.t_end()) {
        return 0.0;
    }
    const double x = (t - grid_.t_start) / grid_.dt;
    auto i = static_cast<Eigen::Index>(std::floor(x));
    if (i >= grid_.n_points - 1) {
        i = grid_.n_points - 2;
    }
    const double s = x - static_cast<double>(i);
    const double h = grid_.dt;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * values_(i) + h10 * h * derivatives_(i) + h01 * values_(i + 1) + h11 * h * derivatives_(i + 1);
}

double optical_coupling(const SystemParams& p, const EnsembleSample& ens)
{
    validate(ens);
    // Atoms beyond the truncation window are dropped, not redistributed: the
    // retained isochromats keep their share mass_fraction * w_j of the ensemble.
    const double mean_sq = (ens.weights.array() * ens.couplings.array().abs2()).sum();
    if (!(mean_sq > 0.0)) {
        throw config_error("ensemble couplings vanish");
    }
    return p.g_bar * std::sqrt(p.n_atoms / mean_sq);
}

std::complex<double> collective_coupling(const SystemParams& p, const EnsembleSample& ens)
{
    return p.omega1 / p.big_delta0 * optical_coupling(p, ens);
}

Trajectory simulate_storage_effective(const SystemParams& p, const EnsembleSample& ens, const TimeSignal& b_in,
                                      double t_begin, double t_end, const SimulationOptions& options)
{
    for (const auto& w : validate(p)) {
        warn(w);
    }
    const std::complex<double> c = collective_coupling(p, ens);
    const Eigen::Index n = ens.size();

    const Eigen::ArrayXcd lambda = (-I * ens.detunings.array().cast<std::complex<double>>()) - p.t2_inv;
    const Eigen::ArrayXcd to_atoms = I * std::conj(c) * ens.couplings.array().conjugate();
    const Eigen::ArrayXcd to_cavity = I * c * ens.mass_fraction * ens.weights.array() * ens.couplings.array();
    const double half_gamma = 0.5 * p.gamma1;
    const double sqrt_gamma = std::sqrt(p.gamma1);

    auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
        const std::complex<double> a = y(0);
        const auto atoms = y.tail(n).array();
        dy(0) = -half_gamma * a + (to_cavity * atoms).sum() + sqrt_gamma * b_in(t);
        dy.tail(n).array() = lambda * atoms + to_atoms * a;
    };

    Eigen::VectorXcd y0 = Eigen::VectorXcd::Zero(n + 1);
    y0(0) = options.initial_a;
    Trajectory traj = integrate_on_grid(rhs, y0, output_grid(t_begin, t_end, options.dt_out), n, 1, -1, options);
    finish_storage(traj, p, ens, b_in);
    return traj;
}

Trajectory simulate_storage_full(const SystemParams& p, const EnsembleSample& ens, const TimeSignal& b_in,
                                 double t_begin, double t_end, const SimulationOptions& options)
{
    for (const auto& w : validate(p)) {
        warn(w);
    }
    const Eigen::Index n = ens.size();
    const double g_opt = optical_coupling(p, ens);
    const double dispersive = ens.mass_fraction * (ens.weights.array() * ens.couplings.array().abs2()).sum()
        * std::norm(g_opt) / p.big_delta0;
    const double stark = std::norm(p.omega1) / p.big_delta0;

    Eigen::ArrayXd optical = Eigen::ArrayXd::Zero(n);
    if (options.optical_detunings.size() == n) {
        optical = options.optical_detunings.array();
    } else if (options.optical_detunings.size() != 0) {
        throw config_error("optical detuning vector does not match the ensemble size");
    }

    const Eigen::ArrayXcd lambda13 = -I * (optical + p.big_delta0).cast<std::complex<double>>();
    const double p12_offset = options.absorb_uniform_shifts ? stark : 0.0;
    const Eigen::ArrayXcd lambda12
        = (-I * (ens.detunings.array() + p12_offset).cast<std::complex<double>>()) - p.t2_inv;
    const Eigen::ArrayXcd cav_to_p13 = I * std::conj(g_opt) * ens.couplings.array().conjugate();
    const Eigen::ArrayXcd p13_to_cav = I * g_opt * ens.mass_fraction * ens.weights.array() * ens.couplings.array();
    const std::complex<double> p12_to_p13 = I * p.omega1;
    const std::complex<double> p13_to_p12 = I * std::conj(p.omega1);
    const std::complex<double> cavity_rate
        = -0.5 * p.gamma1 - I * (options.absorb_uniform_shifts ? dispersive : 0.0);
    const double sqrt_gamma = std::sqrt(p.gamma1);

    auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
        const std::complex<double> a = y(0);
        const auto p13 = y.segment(1, n).array();
        const auto p12 = y.segment(1 + n, n).array();
        dy(0) = cavity_rate * a + (p13_to_cav * p13).sum() + sqrt_gamma * b_in(t);
        dy.segment(1, n).array() = lambda13 * p13 + cav_to_p13 * a + p12_to_p13 * p12;
        dy.segment(1 + n, n).array() = lambda12 * p12 + p13_to_p12 * p13;
    };

    SimulationOptions opts = options;
    // The optical coherences rotate at Delta0; resolve them.
    opts.integrator.max_step = std::min(opts.integrator.max_step, 1.0 / std::abs(p.big_delta0));
    Eigen::VectorXcd y0 = Eigen::VectorXcd::Zero(2 * n + 1);
    y0(0) = options.initial_a;
    Trajectory traj;
    try {
        traj = integrate_on_grid(rhs, y0, output_grid(t_begin, t_end, opts.dt_out), n, 1 + n, 1, opts);
    } catch (const numerical_error& e) {
        throw numerical_error(std::string("three-level integration failed (") + e.what()
                              + "); Delta0 is too large for explicit stepping, retry in a frame rotating at Delta0 "
                                "or reduce Delta0");
    }
    finish_storage(traj, p, ens, b_in);
    return traj;
}

std::complex<double> adiabatic_p13(std::complex<double> a_o, std::complex<double> p12_j, const SystemParams& p,
                                   std::complex<double> g_j)
{
    if (p.big_delta0 == 0.0) {
        throw config_error("adiabatic_p13: Delta0 must be non-zero");
    }
    return (std::conj(g_j) * a_o + p.omega1 * p12_j) / p.big_delta0;
}

Trajectory simulate_retrieval(const SystemParams& p, const EnsembleSample& ens,
                              const Eigen::Ref<const Eigen::VectorXcd>& initial_p12, double t_begin, double t_end,
                              const SimulationOptions& options)
{
    const Eigen::Index n = ens.size();
    if (initial_p12.size() != n) {
        throw config_error("initial coherence vector does not match the ensemble size");
    }
    for (const auto& w : validate(p)) {
        warn(w);
    }
    const std::complex<double> c = collective_coupling(p, ens);
    const Eigen::ArrayXcd lambda = (-I * ens.detunings.array().cast<std::complex<double>>()) - p.t2_inv;
    const Eigen::ArrayXcd to_atoms = I * std::conj(c) * ens.couplings.array().conjugate();
    const Eigen::ArrayXcd to_cavity = I * c * ens.mass_fraction * ens.weights.array() * ens.couplings.array();
    const double half_gamma = 0.5 * p.gamma1;

    auto rhs = [&](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
        const std::complex<double> a = y(0);
        const auto atoms = y.tail(n).array();
        dy(0) = -half_gamma * a + (to_cavity * atoms).sum();
        dy.tail(n).array() = lambda * atoms + to_atoms * a;
    };

    Eigen::VectorXcd y0(n + 1);
    y0(0) = 0.0;
    y0.tail(n) = initial_p12;
    Trajectory traj = integrate_on_grid(rhs, y0, output_grid(t_begin, t_end, options.dt_out), n, 1, -1, options);
    traj.b_in = Eigen::VectorXcd::Zero(traj.grid.n_points);
    traj.b_out = std::sqrt(p.gamma1) * traj.a_o;
    traj.stored_excitation
        = ens.mass_fraction * (ens.weights.array() * traj.p12_final.array().abs2()).sum();
    return traj;
}

double field_energy(const TimeGrid& grid, const Eigen::Ref<const Eigen::VectorXcd>& field)
{
    return trapezoid(field.cwiseAbs2(), grid.dt);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const std::string& comment)
{
    if (!comment.empty()) {
        os << "# " << comment << '\n';
    }
    os << "t,re_a_o,im_a_o,abs_b_out_sq\n";
    os << std::setprecision(12);
    for (Eigen::Index k = 0; k < traj.grid.n_points; ++k) {
        os << traj.grid.node(k) << ',' << traj.a_o(k).real() << ',' << traj.a_o(k).imag() << ','
           << std::norm(traj.b_out(k)) << '\n';
    }
}

} // namespace raman_echo
