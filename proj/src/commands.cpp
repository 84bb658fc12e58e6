#include "raman_echo/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "raman_echo/spectral.hpp"

namespace raman_echo {

namespace {

// Holds Gamma_r at its current value while other parameters move.
RunConfig with_fixed_gamma_r(const RunConfig& cfg)
{
    RunConfig c = cfg;
    if (!c.gamma_r_target) {
        c.gamma_r_target = derive_gamma_r(c.system);
    }
    return c;
}

RunConfig config_at(const RunConfig& cfg, const std::string& name, double value)
{
    RunConfig c = cfg;
    apply_parameter(c, name, value);
    return c;
}

struct SpectralSummary {
    double q_st = 0.0;
    double q_e = 0.0;
    double fidelity = 0.0;
};

// Efficiencies of a whole train from its summed spectrum; equal to the
// mode average when the modes are well separated.
SpectralSummary train_summary(const PulseTrain& train, const SystemParams& p)
{
    const FrequencyGrid& grid = train.modes.front().grid;
    const Eigen::VectorXcd b = train_spectrum(train);
    const Eigen::VectorXd weight = b.cwiseAbs2();
    const Eigen::VectorXcd s = s_function(grid.nodes(), p);
    const Eigen::VectorXd z = s.cwiseAbs2();
    const double h = grid.spacing();
    const double norm = trapezoid(weight, h);
    SpectralSummary out;
    out.q_st = trapezoid(z.cwiseProduct(weight).eval(), h) / norm;
    out.q_e = trapezoid(z.cwiseProduct(z).cwiseProduct(weight).eval(), h) / norm;
    const std::complex<double> overlap
        = trapezoid(s.cwiseProduct(s).cwiseProduct(weight.cast<std::complex<double>>()).eval(), h);
    out.fidelity = out.q_e > 0.0 ? std::norm(overlap) / (out.q_e * norm * norm) : 0.0;
    return out;
}

std::vector<CsvCell> efficiency_row(const RunConfig& c)
{
    const ModeSpectrum mode = gaussian_mode(c.grid, c.pulses.front().dw_f, 0.0);
    const EfficiencyReport r = efficiency_report(mode, c.system);
    return {c.pulses.front().dw_f, r.q_st, r.q_e, r.fidelity};
}

std::vector<double> range(double a, double b, double step)
{
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= n; ++i) {
        out.push_back(a + static_cast<double>(i) * step);
    }
    return out;
}

} // namespace

std::string format_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

void write_csv(std::ostream& os, const CsvTable& table, std::uint64_t config_hash, const std::string& extra)
{
    os << "# config_hash=" << hash_string(config_hash);
    if (!extra.empty()) {
        os << ' ' << extra;
    }
    os << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        os << (i ? "," : "") << table.columns[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "");
            if (const double* d = std::get_if<double>(&row[i])) {
                os << format_number(*d);
            } else {
                os << std::get<std::string>(row[i]);
            }
        }
        os << '\n';
    }
}

std::string write_csv_file(const std::string& dir, const std::string& name, const CsvTable& table,
                           std::uint64_t config_hash, const std::string& extra)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw config_error("cannot create output directory '" + dir + "': " + ec.message());
    }
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) {
        throw config_error("cannot write '" + path + "'");
    }
    write_csv(out, table, config_hash, extra);
    return path;
}

unsigned thread_count()
{
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("RAMAN_ECHO_THREADS");
    if (env == nullptr || *env == '\0') {
        return hw;
    }
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
        throw config_error(std::string("RAMAN_ECHO_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<unsigned>(v);
}

CsvTable spectra_table(const RunConfig& cfg, const std::optional<SweepSpec>& sweep, unsigned threads)
{
    CsvTable table;
    const std::vector<std::string> base = {"nu", "re_s", "im_s", "z", "re_s2", "im_s2"};
    if (sweep) {
        table.columns.push_back(sweep->name);
    }
    table.columns.insert(table.columns.end(), base.begin(), base.end());

    std::vector<double> values = sweep ? sweep->values : std::vector<double>{0.0};
    const RunConfig fixed = with_fixed_gamma_r(cfg);
    auto blocks = parallel_map<std::vector<std::vector<CsvCell>>>(values.size(), threads, [&](std::size_t i) {
        const RunConfig c = sweep ? config_at(fixed, sweep->name, values[i]) : cfg;
        const Eigen::VectorXd nu = c.grid.nodes();
        const Eigen::VectorXcd s = s_function(nu, c.system);
        std::vector<std::vector<CsvCell>> rows;
        for (Eigen::Index k = 0; k < nu.size(); ++k) {
            const std::complex<double> s2 = s(k) * s(k);
            std::vector<CsvCell> row;
            if (sweep) {
                row.emplace_back(values[i]);
            }
            for (double v : {nu(k), s(k).real(), s(k).imag(), std::norm(s(k)), s2.real(), s2.imag()}) {
                row.emplace_back(v);
            }
            rows.push_back(std::move(row));
        }
        return rows;
    });
    for (auto& b : blocks) {
        for (auto& r : b) {
            table.rows.push_back(std::move(r));
        }
    }
    return table;
}

CsvTable efficiency_table(const RunConfig& cfg, const std::optional<SweepSpec>& sweep, unsigned threads)
{
    const SweepSpec spec = sweep ? *sweep : SweepSpec{"dw_f", range(0.01, 0.5, 0.01)};
    CsvTable table;
    const bool extra = spec.name != "dw_f";
    if (extra) {
        table.columns.push_back(spec.name);
    }
    for (const char* c : {"dw_f", "q_st", "q_e", "fidelity"}) {
        table.columns.emplace_back(c);
    }
    const RunConfig fixed = with_fixed_gamma_r(cfg);
    table.rows = parallel_map<std::vector<CsvCell>>(spec.values.size(), threads, [&](std::size_t i) {
        const RunConfig c = config_at(fixed, spec.name, spec.values[i]);
        std::vector<CsvCell> row;
        if (extra) {
            row.emplace_back(spec.values[i]);
        }
        const auto r = efficiency_row(c);
        row.insert(row.end(), r.begin(), r.end());
        return row;
    });
    return table;
}

MatchReport match_report(const RunConfig& cfg)
{
    MatchReport rep;
    rep.table.columns = {"quantity", "value", "reference"};
    auto add = [&](const std::string& name, double value, const std::string& reference, const std::string& text) {
        rep.table.rows.push_back({name, value, reference});
        rep.lines.push_back(text);
    };

    const GeometrySettings& geo = cfg.geometry;
    const double t = transmission_coefficient(geo.geometry, geo.gamma1_si);
    std::string ref;
    if (std::abs(geo.gamma1_si - 1e8) < 1e-6 * 1e8) {
        if (std::abs(geo.geometry.length_cm - 0.1) < 1e-12) {
            ref = "0.7e-3";
        } else if (std::abs(geo.geometry.length_cm - 1.0) < 1e-12) {
            ref = "0.7e-2";
        }
    }
    {
        std::ostringstream os;
        os << "transmission T = 2 L gamma1 / c = " << format_number(t) << " (gamma1 = " << format_number(geo.gamma1_si)
           << " s^-1, L = " << format_number(geo.geometry.length_cm) << " cm)";
        if (!ref.empty()) {
            os << "  [reference: " << ref << "]";
        }
        add("transmission_coefficient", t, ref, os.str());
    }

    const MatchingReport m = matching_check(cfg.system);
    add("gamma_r", derive_gamma_r(cfg.system), "", "Gamma_r = " + format_number(derive_gamma_r(cfg.system)) + " gamma1");
    add("impedance_residual", m.impedance_residual, "0",
        "impedance matching |Gamma_r - gamma1|/gamma1 = " + format_number(m.impedance_residual)
            + (m.impedance_ok ? "  ok" : "  NOT matched"));
    add("spectral_residual", m.spectral_residual, "0",
        "spectral matching |delta_in - gamma1/2|/gamma1 = " + format_number(m.spectral_residual)
            + (m.spectral_ok ? "  ok" : "  NOT matched"));

    try {
        const double r = matching_rabi_ratio(cfg.system);
        add("matching_rabi_ratio", r, "", "|Omega1/Delta0| for Gamma_r = gamma1: " + format_number(r));
    } catch (const config_error& e) {
        rep.satisfiable = false;
        rep.table.rows.push_back({std::string("matching_rabi_ratio"), std::nan(""), std::string("unsatisfiable")});
        rep.lines.push_back(std::string("matching |Omega1/Delta0| unsatisfiable: ") + e.what());
    }

    const double coeff = optical_absorption_matching_coefficient(geo.gamma1_si, geo.geometry.fill_chi, geo.rabi_ratio_sq,
                                                                 geo.geometry.speed_c);
    {
        std::ostringstream os;
        os << "absorption matching: alpha_13 = " << format_number(coeff) << " * delta_in / Delta_in^(13)  [cm^-1]"
           << " (chi = " << format_number(geo.geometry.fill_chi)
           << ", |Omega1/Delta0|^2 = " << format_number(geo.rabi_ratio_sq) << ")";
        add("alpha13_coefficient", coeff, "", os.str());
    }
    return rep;
}

CsvTable figure_table(const RunConfig& cfg, int fig_id, const std::optional<SweepSpec>& sweep, unsigned threads)
{
    if (std::find(figure_ids.begin(), figure_ids.end(), fig_id) == figure_ids.end()) {
        std::ostringstream os;
        os << "unknown figure id " << fig_id << "; valid ids:";
        for (int id : figure_ids) {
            os << ' ' << id;
        }
        throw config_error(os.str());
    }
    const RunConfig fixed = with_fixed_gamma_r(cfg);
    CsvTable table;
    if (fig_id <= 9) {
        if (sweep && sweep->name != "delta_in") {
            throw config_error("figures 6-9 sweep delta_in only");
        }
        std::vector<double> deltas;
        if (sweep) {
            deltas = sweep->values;
        } else if (fig_id == 6 || fig_id == 8) {
            deltas = range(0.1, 0.5, 0.05);
        } else {
            deltas = range(0.5, 5.0, 0.5);
        }
        const bool imag = fig_id == 6 || fig_id == 7;
        table.columns = {"nu_over_gamma1", "delta_in_over_gamma1", imag ? "im_s_squared" : "z"};
        const Eigen::VectorXd nu = Eigen::VectorXd::LinSpaced(401, -1.0, 1.0);
        auto blocks = parallel_map<std::vector<std::vector<CsvCell>>>(deltas.size(), threads, [&](std::size_t i) {
            const RunConfig c = config_at(fixed, "delta_in", deltas[i]);
            const Eigen::VectorXcd s = s_function(nu, c.system);
            std::vector<std::vector<CsvCell>> rows;
            for (Eigen::Index k = 0; k < nu.size(); ++k) {
                const double v = imag ? (s(k) * s(k)).imag() : std::norm(s(k));
                rows.push_back({nu(k), deltas[i], v});
            }
            return rows;
        });
        for (auto& b : blocks) {
            for (auto& r : b) {
                table.rows.push_back(std::move(r));
            }
        }
        return table;
    }
    if (sweep && sweep->name != "dw_f") {
        throw config_error("figures 10-11 sweep dw_f only");
    }
    const SweepSpec spec = sweep ? *sweep : SweepSpec{"dw_f", range(0.01, 0.5, 0.01)};
    const bool q = fig_id == 10;
    table.columns = {"dw_f_over_gamma1", q ? "q_e" : "fidelity"};
    table.rows = parallel_map<std::vector<CsvCell>>(spec.values.size(), threads, [&](std::size_t i) {
        const RunConfig c = config_at(fixed, "dw_f", spec.values[i]);
        const ModeSpectrum mode = gaussian_mode(c.grid, spec.values[i], 0.0);
        const double v = q ? echo_efficiency(mode, c.system) : fidelity(mode, c.system);
        return std::vector<CsvCell>{spec.values[i], v};
    });
    return table;
}

SimulateOutput simulate_tables(const RunConfig& cfg, const std::optional<SweepSpec>& sweep, unsigned threads)
{
    SimulateOutput out;
    const std::vector<double> values = sweep ? sweep->values : std::vector<double>{0.0};
    const RunConfig fixed = sweep ? with_fixed_gamma_r(cfg) : cfg;

    struct Point {
        PipelineResult result;
        SpectralSummary analytic;
        double decay = 1.0;
    };
    // Pipeline runs are single-threaded; sweep points run side by side.
    auto points = parallel_map<Point>(values.size(), threads, [&](std::size_t i) {
        const RunConfig c = sweep ? config_at(fixed, sweep->name, values[i]) : cfg;
        const PulseTrain train = build_train(c);
        const EnsembleSample ens = sample_ensemble(c.pipeline.k_atoms, c.system.delta_in, c.pipeline.ensemble);
        Point pt;
        pt.result = run_pipeline(c.system, ens, train, c.pipeline.t0_storage, c.pipeline.options);
        pt.analytic = train_summary(train, c.system);
        pt.decay = decay_factor(c.system, c.pipeline.t0_storage);
        if (i != 0) {
            // Keep only the report for later points.
            pt.result.storage = {};
            pt.result.retrieval = {};
            pt.result.rephased_p12.resize(0);
        }
        return pt;
    });

    const std::vector<std::string> report_cols
        = {"q_st", "q_e", "echo_energy_ratio", "decay_factor", "fidelity", "q_st_analytic", "q_e_analytic",
           "fidelity_analytic"};
    const std::vector<std::string> mode_cols
        = {"mode", "tau", "expected_peak", "peak_time", "energy_ratio", "fidelity"};
    if (sweep) {
        out.report.columns.push_back(sweep->name);
        out.modes.columns.push_back(sweep->name);
    }
    out.report.columns.insert(out.report.columns.end(), report_cols.begin(), report_cols.end());
    out.modes.columns.insert(out.modes.columns.end(), mode_cols.begin(), mode_cols.end());

    for (std::size_t i = 0; i < points.size(); ++i) {
        const PipelineReport& r = points[i].result.report;
        std::vector<CsvCell> row;
        if (sweep) {
            row.emplace_back(values[i]);
        }
        for (double v : {r.q_st, r.q_e, r.echo_energy_ratio, r.decay_factor, r.fidelity, points[i].analytic.q_st,
                         points[i].analytic.q_e, points[i].analytic.fidelity}) {
            row.emplace_back(v);
        }
        out.report.rows.push_back(std::move(row));
        for (std::size_t k = 0; k < r.modes.size(); ++k) {
            const ModeEcho& m = r.modes[k];
            std::vector<CsvCell> mrow;
            if (sweep) {
                mrow.emplace_back(values[i]);
            }
            for (double v : {static_cast<double>(k + 1), m.tau, m.expected_peak, m.peak_time, m.energy_ratio,
                             m.fidelity}) {
                mrow.emplace_back(v);
            }
            out.modes.rows.push_back(std::move(mrow));
        }
    }
    out.first = std::move(points.front().result);
    return out;
}

void cmd_spectra(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const CsvTable t = spectra_table(cfg, opt.sweep, opt.threads);
    log << "wrote " << write_csv_file(opt.out_dir, "spectra.csv", t, cfg.hash) << " (" << t.rows.size() << " rows)\n";
}

void cmd_efficiency(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const CsvTable t = efficiency_table(cfg, opt.sweep, opt.threads);
    log << "wrote " << write_csv_file(opt.out_dir, "efficiency.csv", t, cfg.hash) << " (" << t.rows.size()
        << " rows)\n";
}

void cmd_match(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const MatchReport rep = match_report(cfg);
    for (const auto& line : rep.lines) {
        log << line << '\n';
    }
    log << "wrote " << write_csv_file(opt.out_dir, "match.csv", rep.table, cfg.hash) << '\n';
}

void cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const SimulateOutput out = simulate_tables(cfg, opt.sweep, opt.threads);
    const std::string tag = "config_hash=" + hash_string(cfg.hash);
    for (const auto& [name, traj] :
         {std::pair<std::string, const Trajectory*>{"storage.csv", &out.first.storage},
          std::pair<std::string, const Trajectory*>{"echo.csv", &out.first.retrieval}}) {
        std::filesystem::create_directories(opt.out_dir);
        const std::string path = (std::filesystem::path(opt.out_dir) / name).string();
        std::ofstream os(path);
        if (!os) {
            throw config_error("cannot write '" + path + "'");
        }
        write_trajectory_csv(os, *traj, tag);
        log << "wrote " << path << '\n';
    }
    log << "wrote " << write_csv_file(opt.out_dir, "report.csv", out.report, cfg.hash) << '\n';
    log << "wrote " << write_csv_file(opt.out_dir, "modes.csv", out.modes, cfg.hash) << '\n';
    const PipelineReport& r = out.first.report;
    log << "Q_ST = " << format_number(r.q_st) << ", Q_e = " << format_number(r.q_e)
        << ", echo/input = " << format_number(r.echo_energy_ratio) << ", F = " << format_number(r.fidelity) << '\n';
}

void cmd_figure(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    if (!opt.fig) {
        throw config_error("figure requires --fig <id>");
    }
    const CsvTable t = figure_table(cfg, *opt.fig, opt.sweep, opt.threads);
    const std::string name = "fig" + std::to_string(*opt.fig) + ".csv";
    log << "wrote " << write_csv_file(opt.out_dir, name, t, cfg.hash) << " (" << t.rows.size() << " rows)\n";
}

} // namespace raman_echo
