#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "raman_echo/commands.hpp"
#include "raman_echo/config.hpp"
#include "raman_echo/core.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

} // namespace

int main(int argc, char** argv)
{
    using namespace raman_echo;

    CLI::App app{"Cavity-assisted off-resonant Raman photon-echo memory simulator"};
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    int fig = 0;
    std::string sweep;
    app.add_option("command", command, "spectra | efficiency | match | simulate | figure")
        ->required()
        ->check(CLI::IsMember({"spectra", "efficiency", "match", "simulate", "figure"}));
    app.add_option("--config", config_path, "configuration file")->required();
    app.add_option("--out", out_dir, "output directory (default: current directory)");
    auto* fig_opt = app.add_option("--fig", fig, "figure id for the figure command (6-11)");
    app.add_option("--sweep", sweep, "name=a:b:step or name=v1,v2,...");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        const RunConfig cfg = load_config(config_path);
        CommandOptions opt;
        opt.out_dir = out_dir;
        opt.threads = thread_count();
        if (!sweep.empty()) {
            opt.sweep = parse_sweep(sweep);
        }
        if (fig_opt->count() > 0) {
            opt.fig = fig;
        }
        if (command == "spectra") {
            cmd_spectra(cfg, opt, std::cout);
        } else if (command == "efficiency") {
            cmd_efficiency(cfg, opt, std::cout);
        } else if (command == "match") {
            cmd_match(cfg, opt, std::cout);
        } else if (command == "simulate") {
            cmd_simulate(cfg, opt, std::cout);
        } else {
            cmd_figure(cfg, opt, std::cout);
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerical;
    }
    return 0;
}
