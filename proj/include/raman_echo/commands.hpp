#ifndef RAMAN_ECHO_COMMANDS_HPP
#define RAMAN_ECHO_COMMANDS_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "raman_echo/config.hpp"

namespace raman_echo {

// A table cell is either numeric (printed with 12 significant digits) or text.
using CsvCell = std::variant<double, std::string>;

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<CsvCell>> rows;
};

// "# config_hash=<hex> <extra>" comment line, header row, data rows.
void write_csv(std::ostream& os, const CsvTable& table, std::uint64_t config_hash, const std::string& extra = {});
// Writes <dir>/<name>, creating the directory. Returns the path.
std::string write_csv_file(const std::string& dir, const std::string& name, const CsvTable& table,
                           std::uint64_t config_hash, const std::string& extra = {});
std::string format_number(double v);

// Worker count: RAMAN_ECHO_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1). Throws config_error on a malformed value.
unsigned thread_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers. Results land in
// index order; the first exception (lowest index) is rethrown after all
// workers stop.
template <typename T>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const std::function<T(std::size_t)>& fn)
{
    std::vector<std::optional<T>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

// Table builders (no I/O), used by the subcommands and the tests.

// nu, re_s, im_s, z, re_s2, im_s2 on the config grid; with a sweep the swept
// parameter is prepended as the first column (long format).
CsvTable spectra_table(const RunConfig& cfg, const std::optional<SweepSpec>& sweep, unsigned threads = 1);

// dw_f, q_st, q_e, fidelity for the first configured pulse shape. Default
// sweep: dw_f = 0.01:0.5:0.01. A sweep over another parameter prepends it.
CsvTable efficiency_table(const RunConfig& cfg, const std::optional<SweepSpec>& sweep, unsigned threads = 1);

struct MatchReport {
    CsvTable table;
    std::vector<std::string> lines;
    bool satisfiable = true;
};
MatchReport match_report(const RunConfig& cfg);

inline const std::vector<int> figure_ids = {6, 7, 8, 9, 10, 11};
// Throws config_error listing the valid ids for anything else.
CsvTable figure_table(const RunConfig& cfg, int fig_id, const std::optional<SweepSpec>& sweep, unsigned threads = 1);

struct SimulateOutput {
    CsvTable report;
    CsvTable modes;
    // Trajectories of the unswept run (or the first sweep point).
    PipelineResult first;
};
SimulateOutput simulate_tables(const RunConfig& cfg, const std::optional<SweepSpec>& sweep, unsigned threads = 1);

struct CommandOptions {
    std::string out_dir = ".";
    std::optional<int> fig;
    std::optional<SweepSpec> sweep;
    unsigned threads = 1;
};

// Each subcommand writes its CSV files into out_dir and a short summary to `log`.
void cmd_spectra(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
void cmd_efficiency(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
void cmd_match(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
void cmd_simulate(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
void cmd_figure(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

} // namespace raman_echo

#endif // RAMAN_ECHO_COMMANDS_HPP
