#pragma once

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "linksense/adjacency.hpp"
#include "linksense/mobility.hpp"
#include "linksense/radio.hpp"
#include "linksense/routing.hpp"
#include "linksense/simulation.hpp"
#include "linksense/types.hpp"

namespace linksense {

struct SweepSpec {
    std::vector<double> speeds_kmh{20, 40, 60, 80, 100};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
};

/// Fully resolved experiment configuration. An empty config file yields
/// the defaults of the chain experiment: 10 static nodes 100 m apart, a
/// 250 m deterministic radio range, 2 x 512 B packets per second, speeds
/// 20..100 km/h and 8 seeds per point.
struct ExperimentConfig {
    ChainScenarioParams scenario;
    PropagationParams radio;
    double target_range_m = 250.0;
    TimingParams timing;
    AdjacencyConfig adjacency;
    TrafficSpec traffic;
    SweepSpec sweep;
    std::string output_path = "results.csv";
};

namespace detail {

inline std::string format_value(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);  // shortest round-trip form
    return std::string(buf, end);
}

inline double parse_double(const std::string& field, const std::string& text, int line) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end != begin + text.size() || text.empty() || errno == ERANGE) {
        throw ConfigError(field, "not a number: '" + text + "'", line);
    }
    return v;
}

inline std::uint64_t parse_uint(const std::string& field, const std::string& text, int line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size()) {
        throw ConfigError(field, "not a non-negative integer: '" + text + "'", line);
    }
    return v;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        out.push_back(a == std::string::npos ? "" : item.substr(a, b - a + 1));
    }
    return out;
}

struct RawConfig {
    // section -> key -> (value, line)
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>> values;

    std::optional<std::string> take(const std::string& section, const std::string& key,
                                    int* line_out = nullptr) {
        auto sit = values.find(section);
        if (sit == values.end()) return std::nullopt;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return std::nullopt;
        std::string v = kit->second.first;
        if (line_out) *line_out = kit->second.second;
        sit->second.erase(kit);
        return v;
    }
};

inline RawConfig tokenize_config(std::string_view text) {
    RawConfig raw;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        const auto b = line.find_last_not_of(" \t\r");
        std::string body = line.substr(a, b - a + 1);
        if (body.front() == '[') {
            if (body.back() != ']' || body.size() < 3) {
                throw ConfigError("<syntax>", "malformed section header '" + body + "'", line_no);
            }
            section = body.substr(1, body.size() - 2);
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("<syntax>", "expected 'key = value', got '" + body + "'", line_no);
        }
        auto trim = [](std::string s) {
            const auto x = s.find_first_not_of(" \t");
            const auto y = s.find_last_not_of(" \t");
            return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
        };
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError("<syntax>", "empty key", line_no);
        if (section.empty()) {
            throw ConfigError(key, "key outside of any [section]", line_no);
        }
        auto [it, inserted] =
            raw.values[section].emplace(key, std::make_pair(value, line_no));
        if (!inserted) {
            throw ConfigError(section + "." + key, "duplicate key", line_no);
        }
    }
    return raw;
}

}  // namespace detail

inline void validate_config(const ExperimentConfig& c) {
    const auto& s = c.scenario;
    if (s.n_static < 2) throw ConfigError("scenario.n_static", "must be >= 2");
    if (!(s.spacing_m > 0)) throw ConfigError("scenario.spacing_m", "must be > 0");
    if (!(s.speed_kmh > 0)) throw ConfigError("scenario.speed_kmh", "must be > 0");
    if (!(s.mobile_start_offset_m >= 0))
        throw ConfigError("scenario.mobile_start_offset_m", "must be >= 0");
    if (!(s.sim_padding_s >= 0)) throw ConfigError("scenario.sim_padding_s", "must be >= 0");
    if (!std::isfinite(s.lateral_offset_m))
        throw ConfigError("scenario.lateral_offset_m", "must be finite");

    const auto& r = c.radio;
    if (!std::isfinite(r.tx_power.value)) throw ConfigError("radio.tx_power_dbm", "must be finite");
    if (!(r.frequency_hz > 0)) throw ConfigError("radio.frequency_hz", "must be > 0");
    if (!(r.antenna_gain_tx > 0)) throw ConfigError("radio.antenna_gain_tx", "must be > 0");
    if (!(r.antenna_gain_rx > 0)) throw ConfigError("radio.antenna_gain_rx", "must be > 0");
    if (!(r.antenna_height_tx_m > 0)) throw ConfigError("radio.antenna_height_tx_m", "must be > 0");
    if (!(r.antenna_height_rx_m > 0)) throw ConfigError("radio.antenna_height_rx_m", "must be > 0");
    if (!(r.system_loss >= 1)) throw ConfigError("radio.system_loss", "must be >= 1");
    if (!std::isfinite(r.rx_threshold.value))
        throw ConfigError("radio.rx_threshold_dbm", "must be finite");
    if (!(r.shadowing_sigma_db >= 0)) throw ConfigError("radio.shadowing_sigma_db", "must be >= 0");
    if (!(r.bernoulli_loss_prob >= 0 && r.bernoulli_loss_prob <= 1))
        throw ConfigError("radio.bernoulli_loss_prob", "must be in [0, 1]");
    if (!(c.target_range_m > 0)) throw ConfigError("radio.target_range_m", "must be > 0");

    const auto& t = c.timing;
    if (!(t.hello_interval_s > 0)) throw ConfigError("timing.hello_interval_s", "must be > 0");
    if (!(t.hello_jitter_max_s >= 0))
        throw ConfigError("timing.hello_jitter_max_s", "must be >= 0");
    if (!(t.hello_jitter_max_s < t.hello_interval_s))
        throw ConfigError("timing.hello_jitter_max_s", "must be < hello_interval_s");
    if (!(t.tc_interval_s > 0)) throw ConfigError("timing.tc_interval_s", "must be > 0");
    if (!(t.neighbor_hold_time_s > 0))
        throw ConfigError("timing.neighbor_hold_time_s", "must be > 0");

    const auto& lp = c.adjacency.loss;
    if (!(lp.hyst_threshold_high > 0 && lp.hyst_threshold_high <= 1))
        throw ConfigError("adjacency.loss.hyst_threshold_high", "must be in (0, 1]");
    if (!(lp.hyst_threshold_low >= 0 && lp.hyst_threshold_low < 1))
        throw ConfigError("adjacency.loss.hyst_threshold_low", "must be in [0, 1)");
    if (!(lp.hyst_threshold_low < lp.hyst_threshold_high))
        throw ConfigError("adjacency.loss.hyst_threshold_low", "must be < hyst_threshold_high");
    if (!(lp.hyst_scaling > 0 && lp.hyst_scaling < 1))
        throw ConfigError("adjacency.loss.hyst_scaling", "must be in (0, 1)");
    if (!(lp.initial_quality >= 0 && lp.initial_quality <= 1))
        throw ConfigError("adjacency.loss.initial_quality", "must be in [0, 1]");

    const auto& sp = c.adjacency.signal;
    if (!std::isfinite(sp.ss_threshold_low.value))
        throw ConfigError("adjacency.signal.ss_threshold_low_dbm", "must be finite");
    if (!std::isfinite(sp.ss_threshold_high.value))
        throw ConfigError("adjacency.signal.ss_threshold_high_dbm", "must be finite");
    if (!(sp.ss_threshold_low.value < sp.ss_threshold_high.value))
        throw ConfigError("adjacency.signal.ss_threshold_low_dbm",
                          "must be < ss_threshold_high_dbm");
    if (!(sp.hyst_ss_scaling > 0 && sp.hyst_ss_scaling < 1))
        throw ConfigError("adjacency.signal.hyst_ss_scaling", "must be in (0, 1)");
    if (!(sp.delta_db > 0)) throw ConfigError("adjacency.signal.delta_db", "must be > 0");
    if (!(sp.hyst_threshold_high > 0 && sp.hyst_threshold_high <= 1))
        throw ConfigError("adjacency.signal.hyst_threshold_high", "must be in (0, 1]");
    if (!(sp.hyst_threshold_low >= 0 && sp.hyst_threshold_low < 1))
        throw ConfigError("adjacency.signal.hyst_threshold_low", "must be in [0, 1)");
    if (!(sp.hyst_threshold_low < sp.hyst_threshold_high))
        throw ConfigError("adjacency.signal.hyst_threshold_low", "must be < hyst_threshold_high");
    if (!(sp.initial_quality >= 0 && sp.initial_quality <= 1))
        throw ConfigError("adjacency.signal.initial_quality", "must be in [0, 1]");

    const auto& tr = c.traffic;
    if (!(tr.packets_per_second > 0)) throw ConfigError("traffic.packets_per_second", "must be > 0");
    if (tr.payload_bytes == 0) throw ConfigError("traffic.payload_bytes", "must be > 0");
    if (!(tr.start_time >= 0)) throw ConfigError("traffic.start_time_s", "must be >= 0");

    if (c.sweep.speeds_kmh.empty()) throw ConfigError("sweep.speeds_kmh", "must not be empty");
    for (double v : c.sweep.speeds_kmh) {
        if (!(v > 0)) throw ConfigError("sweep.speeds_kmh", "speeds must be > 0");
    }
    if (c.sweep.seeds.empty()) throw ConfigError("sweep.seeds", "must not be empty");
    if (c.output_path.empty()) throw ConfigError("output.path", "must not be empty");
}

/// Parses the INI-style config text ('#' starts a comment, sections in
/// brackets, 'key = value' lines). Unknown sections or keys are errors.
/// Unset radio/signal thresholds are derived from the radio profile:
/// rx_threshold from target_range_m, and the two ss thresholds from the
/// deterministic range (power at 0.8x range and at the range itself).
inline ExperimentConfig parse_config(std::string_view text) {
    using namespace detail;
    ExperimentConfig cfg;
    RawConfig raw = tokenize_config(text);

    auto num = [&raw](const std::string& section, const std::string& key, double& out) {
        int line = 0;
        if (auto v = raw.take(section, key, &line)) {
            out = parse_double(section + "." + key, *v, line);
        }
    };
    auto power = [&raw](const std::string& section, const std::string& key,
                        std::optional<PowerDbm>& out) {
        int line = 0;
        if (auto v = raw.take(section, key, &line)) {
            out = PowerDbm{parse_double(section + "." + key, *v, line)};
        }
    };

    double n_static = cfg.scenario.n_static;
    num("scenario", "n_static", n_static);
    if (n_static < 0 || n_static != std::floor(n_static)) {
        throw ConfigError("scenario.n_static", "must be a non-negative integer");
    }
    cfg.scenario.n_static = static_cast<std::uint32_t>(n_static);
    num("scenario", "spacing_m", cfg.scenario.spacing_m);
    num("scenario", "mobile_start_offset_m", cfg.scenario.mobile_start_offset_m);
    num("scenario", "lateral_offset_m", cfg.scenario.lateral_offset_m);
    num("scenario", "speed_kmh", cfg.scenario.speed_kmh);
    num("scenario", "sim_padding_s", cfg.scenario.sim_padding_s);

    num("radio", "tx_power_dbm", cfg.radio.tx_power.value);
    num("radio", "frequency_hz", cfg.radio.frequency_hz);
    num("radio", "antenna_gain_tx", cfg.radio.antenna_gain_tx);
    num("radio", "antenna_gain_rx", cfg.radio.antenna_gain_rx);
    num("radio", "antenna_height_tx_m", cfg.radio.antenna_height_tx_m);
    num("radio", "antenna_height_rx_m", cfg.radio.antenna_height_rx_m);
    num("radio", "system_loss", cfg.radio.system_loss);
    num("radio", "target_range_m", cfg.target_range_m);
    num("radio", "shadowing_sigma_db", cfg.radio.shadowing_sigma_db);
    num("radio", "bernoulli_loss_prob", cfg.radio.bernoulli_loss_prob);
    std::optional<PowerDbm> rx_threshold;
    power("radio", "rx_threshold_dbm", rx_threshold);

    num("timing", "hello_interval_s", cfg.timing.hello_interval_s);
    num("timing", "hello_jitter_max_s", cfg.timing.hello_jitter_max_s);
    num("timing", "tc_interval_s", cfg.timing.tc_interval_s);
    num("timing", "neighbor_hold_time_s", cfg.timing.neighbor_hold_time_s);

    if (auto v = raw.take("adjacency", "algorithm")) {
        cfg.adjacency.algorithm = algorithm_from_string(*v);
    }
    num("adjacency.loss", "hyst_threshold_high", cfg.adjacency.loss.hyst_threshold_high);
    num("adjacency.loss", "hyst_threshold_low", cfg.adjacency.loss.hyst_threshold_low);
    num("adjacency.loss", "hyst_scaling", cfg.adjacency.loss.hyst_scaling);
    num("adjacency.loss", "initial_quality", cfg.adjacency.loss.initial_quality);

    std::optional<PowerDbm> ss_high, ss_low;
    power("adjacency.signal", "ss_threshold_high_dbm", ss_high);
    power("adjacency.signal", "ss_threshold_low_dbm", ss_low);
    num("adjacency.signal", "hyst_ss_scaling", cfg.adjacency.signal.hyst_ss_scaling);
    num("adjacency.signal", "delta_db", cfg.adjacency.signal.delta_db);
    num("adjacency.signal", "hyst_threshold_high", cfg.adjacency.signal.hyst_threshold_high);
    num("adjacency.signal", "hyst_threshold_low", cfg.adjacency.signal.hyst_threshold_low);
    num("adjacency.signal", "initial_quality", cfg.adjacency.signal.initial_quality);

    num("traffic", "packets_per_second", cfg.traffic.packets_per_second);
    double payload = cfg.traffic.payload_bytes;
    num("traffic", "payload_bytes", payload);
    if (payload < 0 || payload != std::floor(payload)) {
        throw ConfigError("traffic.payload_bytes", "must be a non-negative integer");
    }
    cfg.traffic.payload_bytes = static_cast<std::uint32_t>(payload);
    num("traffic", "start_time_s", cfg.traffic.start_time);

    {
        int line = 0;
        if (auto v = raw.take("sweep", "speeds_kmh", &line)) {
            cfg.sweep.speeds_kmh.clear();
            for (const auto& item : detail::split_list(*v)) {
                cfg.sweep.speeds_kmh.push_back(parse_double("sweep.speeds_kmh", item, line));
            }
        }
        auto seeds = raw.take("sweep", "seeds", &line);
        int count_line = 0;
        auto seed_count = raw.take("sweep", "seed_count", &count_line);
        if (seeds && seed_count) {
            throw ConfigError("sweep.seed_count", "set either seeds or seed_count, not both",
                              count_line);
        }
        if (seeds) {
            cfg.sweep.seeds.clear();
            for (const auto& item : detail::split_list(*seeds)) {
                cfg.sweep.seeds.push_back(parse_uint("sweep.seeds", item, line));
            }
        } else if (seed_count) {
            const std::uint64_t n = parse_uint("sweep.seed_count", *seed_count, count_line);
            if (n == 0) throw ConfigError("sweep.seed_count", "must be >= 1", count_line);
            cfg.sweep.seeds.clear();
            for (std::uint64_t i = 1; i <= n; ++i) cfg.sweep.seeds.push_back(i);
        }
    }

    if (auto v = raw.take("output", "path")) cfg.output_path = *v;

    // Anything left over is unknown.
    static const std::set<std::string> known_sections{
        "scenario",       "radio",   "timing", "adjacency", "adjacency.loss",
        "adjacency.signal", "traffic", "sweep",  "output"};
    for (const auto& [section, keys] : raw.values) {
        for (const auto& [key, value] : keys) {
            const char* what = known_sections.count(section) ? "unknown key" : "unknown section";
            throw ConfigError(section + "." + key, what, value.second);
        }
    }

    // Resolve derived thresholds against the radio profile.
    if (rx_threshold) {
        cfg.radio.rx_threshold = *rx_threshold;
    } else {
        cfg.radio.rx_threshold = solve_rx_threshold(cfg.radio, cfg.target_range_m);
    }
    const double range = deterministic_range(cfg.radio);
    if (!ss_high) ss_high = two_ray_rx_power(cfg.radio, 0.8 * range);
    if (!ss_low) ss_low = two_ray_rx_power(cfg.radio, range);
    cfg.adjacency.signal.ss_threshold_high = *ss_high;
    cfg.adjacency.signal.ss_threshold_low = *ss_low;

    validate_config(cfg);
    return cfg;
}

/// Canonical dump of the effective configuration; parse_config on the
/// output reproduces the same configuration exactly.
inline std::string print_config(const ExperimentConfig& c) {
    using detail::format_value;
    std::ostringstream out;
    out << "[scenario]\n";
    out << "n_static = " << c.scenario.n_static << "\n";
    out << "spacing_m = " << format_value(c.scenario.spacing_m) << "\n";
    out << "mobile_start_offset_m = " << format_value(c.scenario.mobile_start_offset_m) << "\n";
    out << "lateral_offset_m = " << format_value(c.scenario.lateral_offset_m) << "\n";
    out << "speed_kmh = " << format_value(c.scenario.speed_kmh) << "\n";
    out << "sim_padding_s = " << format_value(c.scenario.sim_padding_s) << "\n";
    out << "\n[radio]\n";
    out << "tx_power_dbm = " << format_value(c.radio.tx_power.value) << "\n";
    out << "frequency_hz = " << format_value(c.radio.frequency_hz) << "\n";
    out << "antenna_gain_tx = " << format_value(c.radio.antenna_gain_tx) << "\n";
    out << "antenna_gain_rx = " << format_value(c.radio.antenna_gain_rx) << "\n";
    out << "antenna_height_tx_m = " << format_value(c.radio.antenna_height_tx_m) << "\n";
    out << "antenna_height_rx_m = " << format_value(c.radio.antenna_height_rx_m) << "\n";
    out << "system_loss = " << format_value(c.radio.system_loss) << "\n";
    out << "rx_threshold_dbm = " << format_value(c.radio.rx_threshold.value) << "\n";
    out << "target_range_m = " << format_value(c.target_range_m) << "\n";
    out << "shadowing_sigma_db = " << format_value(c.radio.shadowing_sigma_db) << "\n";
    out << "bernoulli_loss_prob = " << format_value(c.radio.bernoulli_loss_prob) << "\n";
    out << "\n[timing]\n";
    out << "hello_interval_s = " << format_value(c.timing.hello_interval_s) << "\n";
    out << "hello_jitter_max_s = " << format_value(c.timing.hello_jitter_max_s) << "\n";
    out << "tc_interval_s = " << format_value(c.timing.tc_interval_s) << "\n";
    out << "neighbor_hold_time_s = " << format_value(c.timing.neighbor_hold_time_s) << "\n";
    out << "\n[adjacency]\n";
    out << "algorithm = " << to_string(c.adjacency.algorithm) << "\n";
    out << "\n[adjacency.loss]\n";
    out << "hyst_threshold_high = " << format_value(c.adjacency.loss.hyst_threshold_high) << "\n";
    out << "hyst_threshold_low = " << format_value(c.adjacency.loss.hyst_threshold_low) << "\n";
    out << "hyst_scaling = " << format_value(c.adjacency.loss.hyst_scaling) << "\n";
    out << "initial_quality = " << format_value(c.adjacency.loss.initial_quality) << "\n";
    out << "\n[adjacency.signal]\n";
    out << "ss_threshold_high_dbm = " << format_value(c.adjacency.signal.ss_threshold_high.value)
        << "\n";
    out << "ss_threshold_low_dbm = " << format_value(c.adjacency.signal.ss_threshold_low.value)
        << "\n";
    out << "hyst_ss_scaling = " << format_value(c.adjacency.signal.hyst_ss_scaling) << "\n";
    out << "delta_db = " << format_value(c.adjacency.signal.delta_db) << "\n";
    out << "hyst_threshold_high = " << format_value(c.adjacency.signal.hyst_threshold_high)
        << "\n";
    out << "hyst_threshold_low = " << format_value(c.adjacency.signal.hyst_threshold_low) << "\n";
    out << "initial_quality = " << format_value(c.adjacency.signal.initial_quality) << "\n";
    out << "\n[traffic]\n";
    out << "packets_per_second = " << format_value(c.traffic.packets_per_second) << "\n";
    out << "payload_bytes = " << c.traffic.payload_bytes << "\n";
    out << "start_time_s = " << format_value(c.traffic.start_time) << "\n";
    out << "\n[sweep]\n";
    out << "speeds_kmh = ";
    for (std::size_t i = 0; i < c.sweep.speeds_kmh.size(); ++i) {
        if (i) out << ",";
        out << format_value(c.sweep.speeds_kmh[i]);
    }
    out << "\n";
    out << "seeds = ";
    for (std::size_t i = 0; i < c.sweep.seeds.size(); ++i) {
        if (i) out << ",";
        out << c.sweep.seeds[i];
    }
    out << "\n";
    out << "\n[output]\n";
    out << "path = " << c.output_path << "\n";
    return out.str();
}

}  // namespace linksense
