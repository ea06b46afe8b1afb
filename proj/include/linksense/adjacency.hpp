#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "linksense/engine.hpp"
#include "linksense/radio.hpp"
#include "linksense/types.hpp"

namespace linksense {

enum class Algorithm {
    Loss,    ///< classic hysteresis on received/lost Hellos
    Signal,  ///< hysteresis on signal-strength trend
};

inline std::string_view to_string(Algorithm a) {
    return a == Algorithm::Loss ? "loss" : "signal";
}

inline Algorithm algorithm_from_string(std::string_view s) {
    if (s == "loss") return Algorithm::Loss;
    if (s == "signal") return Algorithm::Signal;
    throw ConfigError("adjacency.algorithm", "must be 'loss' or 'signal'");
}

/// Tunables of the loss-driven hysteresis. With the defaults a validated
/// link needs two consecutive missed Hellos to drop below the low
/// threshold (1.0 -> 0.5 -> 0.25).
struct LossHysteresisParams {
    double hyst_threshold_high = 0.8;
    double hyst_threshold_low = 0.3;
    double hyst_scaling = 0.5;
    double initial_quality = 0.5;
};

/// Tunables of the signal-strength hysteresis. The ss thresholds default
/// to the two-ray received power at 0.8x and 1.0x of the deterministic
/// radio range (derived at config load). delta_db is the cumulative
/// signal variation that triggers a quality punish/reward; the low
/// quality threshold sits at 0.5 so one trend-triggered punish drops a
/// validated link, which is what lets the link die before the node
/// leaves radio range.
struct SignalHysteresisParams {
    PowerDbm ss_threshold_low{-64.37394998465425};   // power at range
    PowerDbm ss_threshold_high{-60.497549464331996}; // power at 0.8x range
    double hyst_ss_scaling = 0.5;
    double delta_db = 2.0;
    double hyst_threshold_high = 0.8;
    double hyst_threshold_low = 0.5;
    double initial_quality = 0.5;
};

enum class LinkStatus {
    Pending,  ///< heard but never validated; unusable for routing
    Valid,
    Invalid,
};

inline std::string_view to_string(LinkStatus s) {
    switch (s) {
        case LinkStatus::Pending: return "pending";
        case LinkStatus::Valid: return "valid";
        default: return "invalid";
    }
}

enum class LinkChange {
    NoChange,
    Validated,
    Invalidated,
};

/// Per-neighbor adjacency state.
struct LinkEntry {
    NodeId neighbor = 0;
    double link_quality = 0.0;
    bool pending = true;
    double sum_sig_var = 0.0;            // accumulated signal variation, dB
    std::optional<PowerDbm> last_ss;     // absent before the first Hello
    SimTime last_hello_time = 0.0;
    bool symmetric = false;
    LinkStatus status = LinkStatus::Pending;
};

inline LinkEntry make_entry(NodeId neighbor, double initial_quality, SimTime now) {
    LinkEntry e;
    e.neighbor = neighbor;
    e.link_quality = initial_quality;
    e.pending = true;
    e.sum_sig_var = 0.0;
    e.last_ss = std::nullopt;
    e.last_hello_time = now;
    e.symmetric = false;
    e.status = LinkStatus::Pending;
    return e;
}

/// Threshold-crossing step shared by both algorithms: quality at or above
/// the high threshold validates, at or below the low threshold (from
/// Valid) invalidates. Both boundaries are closed; any status change
/// clears the variation accumulator and re-synchronizes the pending flag.
inline LinkChange status_update(LinkEntry& e, double threshold_high, double threshold_low) {
    if (e.link_quality >= threshold_high && e.status != LinkStatus::Valid) {
        e.status = LinkStatus::Valid;
        e.pending = false;
        e.sum_sig_var = 0.0;
        return LinkChange::Validated;
    }
    if (e.link_quality <= threshold_low && e.status == LinkStatus::Valid) {
        e.status = LinkStatus::Invalid;
        e.pending = true;
        e.sum_sig_var = 0.0;
        return LinkChange::Invalidated;
    }
    return LinkChange::NoChange;
}

/// Loss algorithm, Hello received: quality <- (1-s)*quality + s.
inline LinkChange loss_on_hello(LinkEntry& e, const LossHysteresisParams& p) {
    e.link_quality = (1.0 - p.hyst_scaling) * e.link_quality + p.hyst_scaling;
    return status_update(e, p.hyst_threshold_high, p.hyst_threshold_low);
}

/// Loss algorithm, Hello missed: quality <- (1-s)*quality.
inline LinkChange loss_on_miss(LinkEntry& e, const LossHysteresisParams& p) {
    e.link_quality = (1.0 - p.hyst_scaling) * e.link_quality;
    return status_update(e, p.hyst_threshold_high, p.hyst_threshold_low);
}

/// Signal algorithm, Hello received with strength `ss`:
///   - above ss_threshold_high: reward unconditionally;
///   - otherwise accumulate the signal variation (deterioration while the
///     link is established, improvement while pending) and punish/reward
///     once the accumulated trend reaches delta_db; the pending-side
///     reward is capped at the high quality threshold.
/// The first Hello after entry creation only establishes the baseline
/// (no variation can be accumulated without a previous sample).
/// last_ss is updated on every received Hello, whatever the branch.
inline LinkChange signal_on_hello(LinkEntry& e, PowerDbm ss, const SignalHysteresisParams& p) {
    if (!std::isfinite(ss.value)) {
        throw std::invalid_argument("signal_on_hello: signal strength must be finite");
    }
    if (ss.value > p.ss_threshold_high.value) {
        e.link_quality = (1.0 - p.hyst_ss_scaling) * e.link_quality + p.hyst_ss_scaling;
    } else if (e.last_ss.has_value()) {
        if (!e.pending) {
            e.sum_sig_var += e.last_ss->value - ss.value;
            if (e.sum_sig_var >= p.delta_db) {
                e.link_quality = p.hyst_ss_scaling * e.link_quality;
                e.sum_sig_var = 0.0;
            }
        } else {
            e.sum_sig_var += ss.value - e.last_ss->value;
            if (e.sum_sig_var >= p.delta_db) {
                e.link_quality = std::min(
                    p.hyst_threshold_high,
                    (1.0 - p.hyst_ss_scaling) * e.link_quality + p.hyst_ss_scaling);
                e.sum_sig_var = 0.0;
            }
        }
    }
    e.last_ss = ss;
    return status_update(e, p.hyst_threshold_high, p.hyst_threshold_low);
}

/// Signal algorithm, Hello missed. The trend rule alone never drops a
/// neighbor that goes silent abruptly, so misses punish the quality the
/// same way the loss algorithm does.
inline LinkChange signal_on_miss(LinkEntry& e, const SignalHysteresisParams& p) {
    e.link_quality = (1.0 - p.hyst_ss_scaling) * e.link_quality;
    return status_update(e, p.hyst_threshold_high, p.hyst_threshold_low);
}

/// True when the entry heard nothing for longer than hold_time and should
/// be garbage-collected.
inline bool entry_expired(const LinkEntry& e, SimTime now, double hold_time_s) {
    return now - e.last_hello_time > hold_time_s;
}

/// Neighbor table: per-neighbor link entries keyed (and iterated) by id.
class NeighborTable {
public:
    LinkEntry& create(NodeId neighbor, double initial_quality, SimTime now) {
        auto [it, inserted] = entries_.emplace(neighbor, make_entry(neighbor, initial_quality, now));
        if (!inserted) {
            throw std::logic_error("NeighborTable: duplicate entry for neighbor " +
                                   std::to_string(neighbor));
        }
        return it->second;
    }

    LinkEntry* find(NodeId neighbor) {
        auto it = entries_.find(neighbor);
        return it == entries_.end() ? nullptr : &it->second;
    }
    const LinkEntry* find(NodeId neighbor) const {
        auto it = entries_.find(neighbor);
        return it == entries_.end() ? nullptr : &it->second;
    }

    void erase(NodeId neighbor) { entries_.erase(neighbor); }
    std::size_t size() const { return entries_.size(); }

    /// Neighbors usable for routing: validated and confirmed bidirectional.
    std::vector<NodeId> valid_symmetric() const {
        std::vector<NodeId> out;
        for (const auto& [id, e] : entries_) {
            if (e.status == LinkStatus::Valid && e.symmetric) out.push_back(id);
        }
        return out;
    }

    /// Every neighbor we currently hold an entry for (any status).
    std::vector<NodeId> heard() const {
        std::vector<NodeId> out;
        out.reserve(entries_.size());
        for (const auto& [id, e] : entries_) out.push_back(id);
        return out;
    }

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::map<NodeId, LinkEntry> entries_;
};

}  // namespace linksense
