// linksense command-line front end: config validation, single runs,
// the full speed sweep, and effective-config dumps.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "linksense/config.hpp"
#include "linksense/metrics.hpp"
#include "linksense/sweep.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

linksense::ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return linksense::parse_config("");
    return linksense::parse_config(read_file(path));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace linksense;

    CLI::App app{"Neighbor-adjacency simulator for mobile mesh networks"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "experiment config file (INI-style)")
        ->check(CLI::ExistingFile);

    auto* validate_cmd = app.add_subcommand("validate", "check the config and exit");

    auto* print_cmd =
        app.add_subcommand("print-config", "dump the effective config with defaults applied");

    auto* run_cmd = app.add_subcommand("run", "run a single (speed, algorithm, seed) cell");
    std::string algo_str;
    double speed = 0.0;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string trace_path;
    run_cmd->add_option("--algo", algo_str, "adjacency algorithm: loss or signal");
    run_cmd->add_option("--speed", speed, "mobile speed in km/h");
    run_cmd->add_option("--seed", seed, "run seed")->capture_default_str();
    run_cmd->add_option("--out", out_path, "write the result row as CSV to this file");
    run_cmd->add_option("--trace", trace_path, "write the per-event debug trace to this file");

    auto* sweep_cmd = app.add_subcommand("sweep", "run the full speeds x algorithms x seeds grid");
    std::string sweep_out;
    std::string plot_out;
    sweep_cmd->add_option("--out", sweep_out, "output CSV path (default: config output.path)");
    sweep_cmd->add_option("--plot-out", plot_out, "also write per-algorithm PDR series");

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = load_config(config_path);

        if (validate_cmd->parsed()) {
            std::cout << "config OK\n";
            return 0;
        }

        if (print_cmd->parsed()) {
            std::cout << print_config(cfg);
            return 0;
        }

        if (run_cmd->parsed()) {
            const Algorithm algo =
                algo_str.empty() ? cfg.adjacency.algorithm : algorithm_from_string(algo_str);
            const double speed_kmh = speed > 0.0 ? speed : cfg.scenario.speed_kmh;

            SimObserver obs;
            std::ofstream trace_file;
            if (!trace_path.empty()) {
                trace_file.open(trace_path);
                if (!trace_file) throw std::runtime_error("cannot write: " + trace_path);
                obs.trace_out = &trace_file;
            }
            RunResult r = run_once(cfg, speed_kmh, algo, seed, obs);

            SweepOutput single;
            single.runs.push_back(r);
            single.aggregates.push_back({speed_kmh, algo, {pdr(r), 0.0, 1},
                                         static_cast<double>(r.control_transmissions)});
            const std::string csv = format_csv(single);
            if (!out_path.empty()) write_file(out_path, csv);

            std::cout << "speed=" << speed_kmh << " km/h algorithm=" << to_string(algo)
                      << " seed=" << seed << " sent=" << r.data_sent
                      << " received=" << r.data_received << " pdr=" << pdr(r)
                      << " control_tx=" << r.control_transmissions
                      << " control_bytes=" << r.control_bytes << "\n";
            return 0;
        }

        if (sweep_cmd->parsed()) {
            SweepOutput out = sweep(cfg);
            const std::string path = sweep_out.empty() ? cfg.output_path : sweep_out;
            write_file(path, format_csv(out));
            if (!plot_out.empty()) write_file(plot_out, format_plot_data(out));
            std::cout << "wrote " << out.runs.size() << " raw + " << out.aggregates.size()
                      << " aggregate rows to " << path << "\n";
            for (const AggregateRow& a : out.aggregates) {
                std::cout << "  speed=" << a.speed_kmh << " " << to_string(a.algorithm)
                          << ": mean_pdr=" << a.pdr_stat.mean << " +/- "
                          << a.pdr_stat.ci95_halfwidth
                          << " mean_control_tx=" << a.mean_control_tx << "\n";
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
