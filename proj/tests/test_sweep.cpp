#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "linksense/sweep.hpp"

using namespace linksense;
using Catch::Approx;

TEST_CASE("golden run: 20 km/h, signal algorithm, seed 1") {
    // Frozen from the first verified run: 338 packets generated between
    // t=5 and t=173.8 (cross-checked by hand against the traffic rate and
    // the scenario end time); only the cold-start packet at t=5.0 is lost.
    ExperimentConfig cfg = parse_config("");
    RunResult r = run_once(cfg, 20.0, Algorithm::Signal, 1);
    REQUIRE(r.data_sent == 338);
    REQUIRE(r.data_received == 337);
    REQUIRE(r.control_transmissions == 5201);
    REQUIRE(r.control_bytes == 137664);
    REQUIRE(r.trace_hash == 358065516435745285ULL);
    REQUIRE(pdr(r) == Approx(337.0 / 338.0).margin(1e-12));
}

TEST_CASE("run_once is deterministic and validates its speed") {
    ExperimentConfig cfg = parse_config("");
    RunResult a = run_once(cfg, 20.0, Algorithm::Loss, 2);
    RunResult b = run_once(cfg, 20.0, Algorithm::Loss, 2);
    REQUIRE(a.trace_hash == b.trace_hash);
    REQUIRE(a.speed_kmh == 20.0);
    REQUIRE(a.algorithm == Algorithm::Loss);
    REQUIRE(a.run_seed == 2);
    REQUIRE_THROWS_AS(run_once(cfg, 0.0, Algorithm::Loss, 1), ConfigError);
}

TEST_CASE("a small sweep produces sorted raw rows and per-cell aggregates") {
    ExperimentConfig cfg = parse_config(
        "[sweep]\nspeeds_kmh = 40\nseeds = 2,1\n"
        "[scenario]\nn_static = 4\n");
    SweepOutput out = sweep(cfg);
    REQUIRE(out.runs.size() == 4);        // 2 algorithms x 2 seeds
    REQUIRE(out.aggregates.size() == 2);  // per (speed, algorithm)
    // sorted by (speed, algorithm, seed); loss sorts before signal
    REQUIRE(out.runs[0].algorithm == Algorithm::Loss);
    REQUIRE(out.runs[0].run_seed == 1);
    REQUIRE(out.runs[1].run_seed == 2);
    REQUIRE(out.runs[2].algorithm == Algorithm::Signal);
    REQUIRE(out.aggregates[0].pdr_stat.n == 2);
}

TEST_CASE("a single-cell sweep still aggregates (with a zero-width interval)") {
    ExperimentConfig cfg = parse_config(
        "[sweep]\nspeeds_kmh = 60\nseeds = 1\n"
        "[scenario]\nn_static = 3\n");
    SweepOutput out = sweep(cfg);
    REQUIRE(out.runs.size() == 2);
    REQUIRE(out.aggregates.size() == 2);
    REQUIRE(out.aggregates[0].pdr_stat.n == 1);
    REQUIRE(out.aggregates[0].pdr_stat.ci95_halfwidth == 0.0);
}

TEST_CASE("csv output round-trips through the reader") {
    ExperimentConfig cfg = parse_config(
        "[sweep]\nspeeds_kmh = 40\nseeds = 1,2\n"
        "[scenario]\nn_static = 3\n");
    SweepOutput out = sweep(cfg);
    const std::string csv = format_csv(out);

    REQUIRE(csv.rfind("kind,speed_kmh,algorithm,seed,data_sent,data_received,pdr,control_tx,"
                      "mean_pdr,ci95,mean_control_tx\n", 0) == 0);

    auto records = parse_csv(csv);
    REQUIRE(records.size() == out.runs.size() + out.aggregates.size());
    for (std::size_t i = 0; i < out.runs.size(); ++i) {
        const auto& rec = records[i];
        const auto& run = out.runs[i];
        REQUIRE(rec.kind == "raw");
        REQUIRE(rec.speed_kmh == run.speed_kmh);
        REQUIRE(rec.algorithm == to_string(run.algorithm));
        REQUIRE(rec.seed.value() == run.run_seed);
        REQUIRE(rec.data_sent.value() == run.data_sent);
        REQUIRE(rec.data_received.value() == run.data_received);
        REQUIRE(rec.pdr.value() == Approx(pdr(run)).margin(1e-12));
        REQUIRE(rec.control_tx.value() == run.control_transmissions);
        REQUIRE_FALSE(rec.mean_pdr.has_value());
    }
    for (std::size_t i = 0; i < out.aggregates.size(); ++i) {
        const auto& rec = records[out.runs.size() + i];
        const auto& agg = out.aggregates[i];
        REQUIRE(rec.kind == "aggregate");
        REQUIRE_FALSE(rec.seed.has_value());
        REQUIRE(rec.mean_pdr.value() == Approx(agg.pdr_stat.mean).margin(1e-12));
        REQUIRE(rec.ci95.value() == Approx(agg.pdr_stat.ci95_halfwidth).margin(1e-12));
        REQUIRE(rec.mean_control_tx.value() == Approx(agg.mean_control_tx).margin(1e-12));
    }
}

TEST_CASE("plot data lists one series per algorithm") {
    ExperimentConfig cfg = parse_config(
        "[sweep]\nspeeds_kmh = 40,60\nseeds = 1\n"
        "[scenario]\nn_static = 3\n");
    SweepOutput out = sweep(cfg);
    const std::string plot = format_plot_data(out);
    REQUIRE(plot.rfind("algorithm,speed_kmh,mean_pdr,ci95_halfwidth\n", 0) == 0);
    REQUIRE(plot.find("loss,40,") != std::string::npos);
    REQUIRE(plot.find("loss,60,") != std::string::npos);
    REQUIRE(plot.find("signal,40,") != std::string::npos);
    REQUIRE(plot.find("signal,60,") != std::string::npos);
}

TEST_CASE("a failing cell aborts the sweep and names the cell") {
    ExperimentConfig cfg = parse_config("");
    cfg.sweep.speeds_kmh = {0.0};  // bypasses parse-time validation
    cfg.sweep.seeds = {1};
    try {
        sweep(cfg);
        FAIL("expected a sweep failure");
    } catch (const std::runtime_error& e) {
        REQUIRE(std::string(e.what()).find("speed=0") != std::string::npos);
    }
}
