#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "linksense/config.hpp"
#include "linksense/metrics.hpp"
#include "linksense/mobility.hpp"
#include "linksense/simulation.hpp"
#include "linksense/types.hpp"

namespace linksense {

/// Runs one experiment cell: chain scenario at the given speed, the given
/// adjacency algorithm, one seed. Deterministic: identical inputs yield a
/// bit-identical RunResult.
inline RunResult run_once(const ExperimentConfig& cfg, double speed_kmh, Algorithm algorithm,
                          std::uint64_t seed, SimObserver observer = {}) {
    if (!(speed_kmh > 0)) throw ConfigError("scenario.speed_kmh", "must be > 0");
    ChainScenarioParams chain = cfg.scenario;
    chain.speed_kmh = speed_kmh;
    Scenario scenario = build_chain_scenario(chain, cfg.radio, cfg.timing, cfg.traffic);
    AdjacencyConfig adj = cfg.adjacency;
    adj.algorithm = algorithm;
    Simulation sim(std::move(scenario), adj, seed, std::move(observer));
    RunResult r = sim.run();
    r.speed_kmh = speed_kmh;
    return r;
}

struct AggregateRow {
    double speed_kmh = 0.0;
    Algorithm algorithm = Algorithm::Loss;
    AggregateStat pdr_stat;
    double mean_control_tx = 0.0;
};

struct SweepOutput {
    std::vector<RunResult> runs;          // sorted by (speed, algorithm, seed)
    std::vector<AggregateRow> aggregates; // sorted by (speed, algorithm)
};

/// Full experiment grid: every speed x {loss, signal} x every seed. Cells
/// are independent and run concurrently; output ordering is deterministic
/// regardless of completion order. A failing cell aborts the sweep with
/// the cell identified.
inline SweepOutput sweep(const ExperimentConfig& cfg, unsigned max_threads = 0) {
    struct Cell {
        double speed;
        Algorithm algo;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double speed : cfg.sweep.speeds_kmh) {
        for (Algorithm algo : {Algorithm::Loss, Algorithm::Signal}) {
            for (std::uint64_t seed : cfg.sweep.seeds) {
                cells.push_back({speed, algo, seed});
            }
        }
    }

    std::vector<RunResult> results(cells.size());
    std::vector<std::string> errors(cells.size());
    std::atomic<std::size_t> next{0};
    unsigned n_threads = max_threads ? max_threads : std::thread::hardware_concurrency();
    n_threads = std::max(1u, std::min<unsigned>(n_threads, cells.size()));

    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            const Cell& c = cells[i];
            try {
                results[i] = run_once(cfg, c.speed, c.algo, c.seed);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i + 1 < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!errors[i].empty()) {
            std::ostringstream msg;
            msg << "sweep cell (speed=" << cells[i].speed << ", algorithm="
                << to_string(cells[i].algo) << ", seed=" << cells[i].seed
                << ") failed: " << errors[i];
            throw std::runtime_error(msg.str());
        }
    }

    SweepOutput out;
    out.runs = std::move(results);
    std::sort(out.runs.begin(), out.runs.end(), [](const RunResult& a, const RunResult& b) {
        return std::tie(a.speed_kmh, a.algorithm, a.run_seed) <
               std::tie(b.speed_kmh, b.algorithm, b.run_seed);
    });

    std::map<std::pair<double, Algorithm>, std::vector<const RunResult*>> groups;
    for (const RunResult& r : out.runs) {
        groups[{r.speed_kmh, r.algorithm}].push_back(&r);
    }
    for (const auto& [key, rs] : groups) {
        AggregateRow row;
        row.speed_kmh = key.first;
        row.algorithm = key.second;
        std::vector<double> pdrs;
        double control_sum = 0.0;
        for (const RunResult* r : rs) {
            pdrs.push_back(pdr(*r));
            control_sum += static_cast<double>(r->control_transmissions);
        }
        row.mean_control_tx = control_sum / rs.size();
        if (pdrs.size() >= 2) {
            row.pdr_stat = mean_ci95(pdrs);
        } else {
            row.pdr_stat = {pdrs.front(), 0.0, 1};  // single sample: no interval
        }
        out.aggregates.push_back(row);
    }
    return out;
}

// ---- CSV ------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "kind,speed_kmh,algorithm,seed,data_sent,data_received,pdr,control_tx,"
    "mean_pdr,ci95,mean_control_tx";

/// One parsed CSV row; inapplicable columns are absent.
struct CsvRecord {
    std::string kind;
    double speed_kmh = 0.0;
    std::string algorithm;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> data_sent;
    std::optional<std::uint64_t> data_received;
    std::optional<double> pdr;
    std::optional<std::uint64_t> control_tx;
    std::optional<double> mean_pdr;
    std::optional<double> ci95;
    std::optional<double> mean_control_tx;
};

inline std::string format_csv(const SweepOutput& out) {
    using detail::format_value;
    std::ostringstream csv;
    csv << kCsvHeader << "\n";
    for (const RunResult& r : out.runs) {
        csv << "raw," << format_value(r.speed_kmh) << ',' << to_string(r.algorithm) << ','
            << r.run_seed << ',' << r.data_sent << ',' << r.data_received << ','
            << format_value(pdr(r)) << ',' << r.control_transmissions << ",,,\n";
    }
    for (const AggregateRow& a : out.aggregates) {
        csv << "aggregate," << format_value(a.speed_kmh) << ',' << to_string(a.algorithm)
            << ",,,,,," << format_value(a.pdr_stat.mean) << ','
            << format_value(a.pdr_stat.ci95_halfwidth) << ',' << format_value(a.mean_control_tx)
            << "\n";
    }
    return csv.str();
}

/// Gnuplot-friendly series for the PDR figure: one block of
/// (speed, mean_pdr, ci95) per algorithm.
inline std::string format_plot_data(const SweepOutput& out) {
    using detail::format_value;
    std::ostringstream plot;
    plot << "algorithm,speed_kmh,mean_pdr,ci95_halfwidth\n";
    for (Algorithm algo : {Algorithm::Loss, Algorithm::Signal}) {
        for (const AggregateRow& a : out.aggregates) {
            if (a.algorithm != algo) continue;
            plot << to_string(algo) << ',' << format_value(a.speed_kmh) << ','
                 << format_value(a.pdr_stat.mean) << ','
                 << format_value(a.pdr_stat.ci95_halfwidth) << "\n";
        }
    }
    return plot.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace detail

/// Reads back a CSV produced by format_csv.
inline std::vector<CsvRecord> parse_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("parse_csv: bad or missing header");
    }
    std::vector<CsvRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 11) {
            throw std::runtime_error("parse_csv: expected 11 columns at line " +
                                     std::to_string(line_no));
        }
        CsvRecord rec;
        rec.kind = fields[0];
        rec.speed_kmh = std::strtod(fields[1].c_str(), nullptr);
        rec.algorithm = fields[2];
        auto opt_u64 = [](const std::string& s) -> std::optional<std::uint64_t> {
            if (s.empty()) return std::nullopt;
            return std::stoull(s);
        };
        auto opt_dbl = [](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return std::strtod(s.c_str(), nullptr);
        };
        rec.seed = opt_u64(fields[3]);
        rec.data_sent = opt_u64(fields[4]);
        rec.data_received = opt_u64(fields[5]);
        rec.pdr = opt_dbl(fields[6]);
        rec.control_tx = opt_u64(fields[7]);
        rec.mean_pdr = opt_dbl(fields[8]);
        rec.ci95 = opt_dbl(fields[9]);
        rec.mean_control_tx = opt_dbl(fields[10]);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace linksense
