#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>

#include "linksense/engine.hpp"

namespace linksense {

/// Signal power in dBm (10*log10 of milliwatts).
struct PowerDbm {
    double value = 0.0;
    auto operator<=>(const PowerDbm&) const = default;
};

inline double dbm_to_mw(PowerDbm p) { return std::pow(10.0, p.value / 10.0); }
inline PowerDbm mw_to_dbm(double mw) { return {10.0 * std::log10(mw)}; }

constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Physical-layer parameters. Defaults follow the common 914 MHz
/// outdoor profile with 1.5 m antennas; rx_threshold is the two-ray
/// received power at 250 m for these defaults, giving a deterministic
/// radio range of 250 m (see solve_rx_threshold / deterministic_range).
struct PropagationParams {
    PowerDbm tx_power{24.5};
    double frequency_hz = 914e6;
    double antenna_gain_tx = 1.0;
    double antenna_gain_rx = 1.0;
    double antenna_height_tx_m = 1.5;
    double antenna_height_rx_m = 1.5;
    double system_loss = 1.0;
    PowerDbm rx_threshold{-64.37394998465425};
    double shadowing_sigma_db = 0.0;
    double bernoulli_loss_prob = 0.0;
};

inline double wavelength_m(const PropagationParams& p) {
    return kSpeedOfLight / p.frequency_hz;
}

/// Free-space received power: Pt*Gt*Gr*lambda^2 / ((4*pi)^2 * d^2 * L).
inline PowerDbm friis_rx_power(const PropagationParams& p, double distance_m) {
    if (!(distance_m > 0.0)) throw std::domain_error("friis_rx_power: distance must be > 0");
    const double lambda = wavelength_m(p);
    const double four_pi_d = 4.0 * M_PI * distance_m;
    const double gain = p.antenna_gain_tx * p.antenna_gain_rx * lambda * lambda /
                        (four_pi_d * four_pi_d * p.system_loss);
    return {p.tx_power.value + 10.0 * std::log10(gain)};
}

/// Distance where the ground-reflection path overtakes free space:
/// 4*pi*ht*hr / lambda.
inline double crossover_distance(const PropagationParams& p) {
    return 4.0 * M_PI * p.antenna_height_tx_m * p.antenna_height_rx_m / wavelength_m(p);
}

/// Two-ray ground model: Friis below the crossover distance, and
/// Pt*Gt*Gr*ht^2*hr^2 / (d^4 * L) at or beyond it. The two branches
/// agree exactly at the crossover.
inline PowerDbm two_ray_rx_power(const PropagationParams& p, double distance_m) {
    if (!(distance_m > 0.0)) throw std::domain_error("two_ray_rx_power: distance must be > 0");
    if (distance_m < crossover_distance(p)) return friis_rx_power(p, distance_m);
    const double ht = p.antenna_height_tx_m;
    const double hr = p.antenna_height_rx_m;
    const double d2 = distance_m * distance_m;
    const double gain = p.antenna_gain_tx * p.antenna_gain_rx * ht * ht * hr * hr /
                        (d2 * d2 * p.system_loss);
    return {p.tx_power.value + 10.0 * std::log10(gain)};
}

enum class ReceptionOutcome {
    Received,
    BelowThreshold,
    RandomLoss,
};

struct ReceptionDecision {
    ReceptionOutcome outcome;
    PowerDbm effective_power;
    bool received() const { return outcome == ReceptionOutcome::Received; }
};

/// Applies log-normal shadowing (if enabled) and the reception threshold,
/// then an independent Bernoulli loss. A frame exactly at the threshold
/// counts as received. Draws are consumed only for enabled noise sources,
/// so a deterministic channel consumes none.
inline ReceptionDecision reception_decision(const PropagationParams& p, PowerDbm rx_power,
                                            RngStream& rng) {
    PowerDbm effective = rx_power;
    if (p.shadowing_sigma_db > 0.0) {
        effective.value += rng.normal(0.0, p.shadowing_sigma_db);
    }
    if (effective.value < p.rx_threshold.value) {
        return {ReceptionOutcome::BelowThreshold, effective};
    }
    if (p.bernoulli_loss_prob > 0.0 && rng.bernoulli(p.bernoulli_loss_prob)) {
        return {ReceptionOutcome::RandomLoss, effective};
    }
    return {ReceptionOutcome::Received, effective};
}

/// Reception threshold that yields exactly `range_m` of deterministic range.
inline PowerDbm solve_rx_threshold(const PropagationParams& p, double range_m) {
    return two_ray_rx_power(p, range_m);
}

/// Largest distance at which a frame is received with noise disabled.
/// Two-ray power is non-increasing in distance, so bisection applies.
inline double deterministic_range(const PropagationParams& p) {
    double lo = 1e-3;
    if (two_ray_rx_power(p, lo).value < p.rx_threshold.value) return 0.0;
    double hi = lo;
    while (two_ray_rx_power(p, hi).value >= p.rx_threshold.value) {
        hi *= 2.0;
        if (hi > 1e9) return hi;  // threshold unreachably low
    }
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (two_ray_rx_power(p, mid).value >= p.rx_threshold.value) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

}  // namespace linksense
