#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "linksense/adjacency.hpp"
#include "linksense/engine.hpp"
#include "linksense/metrics.hpp"
#include "linksense/mobility.hpp"
#include "linksense/radio.hpp"
#include "linksense/routing.hpp"
#include "linksense/types.hpp"

namespace linksense {

struct AdjacencyConfig {
    Algorithm algorithm = Algorithm::Signal;
    LossHysteresisParams loss;
    SignalHysteresisParams signal;
};

struct DataPacket {
    NodeId source = 0;
    NodeId destination = 0;
    std::uint32_t seq = 0;
    std::uint32_t ttl = kDefaultTtl;
    std::uint32_t payload_bytes = 0;
};

struct LinkEventRecord {
    SimTime t = 0.0;
    NodeId node = 0;      // the observer whose table changed
    NodeId neighbor = 0;
    LinkChange change = LinkChange::NoChange;
};

/// Optional per-run hooks. The trace stream, when set, receives one line
/// per event: "t,node,event_kind,details".
struct SimObserver {
    std::function<void(const LinkEventRecord&)> on_link_event;
    std::ostream* trace_out = nullptr;
};

/// One deterministic simulation run: periodic jittered Hellos feed the
/// selected adjacency algorithm, validated-symmetric links are flooded in
/// periodic TCs, shortest-hop routes forward the data stream hop by hop
/// with a radio reception check at each hop. Identical (scenario,
/// adjacency, seed) inputs produce identical event traces.
class Simulation {
    struct HelloEmit { NodeId node; };
    struct TcEmit { NodeId node; };
    struct Delivery { NodeId sender; std::variant<HelloMsg, TcMsg, DataPacket> body; NodeId receiver; };
    struct HelloMissCheck { NodeId node; NodeId neighbor; };
    struct TrafficGen { NodeId node; };
    struct MetricsSnapshot {};
    using SimEvent =
        std::variant<HelloEmit, TcEmit, Delivery, HelloMissCheck, TrafficGen, MetricsSnapshot>;
    using Queue = EventQueue<SimEvent>;

    static constexpr double kFrameDelay = 1e-6;      // keeps delivery strictly after emission
    static constexpr double kMinDistance = 1e-3;     // nodes may drive exactly through each other

    struct NodeState {
        NeighborTable links;
        std::map<NodeId, Queue::Handle> miss_timers;
        std::map<NodeId, TcMsg> tc_cache;                      // freshest TC per originator
        std::set<std::pair<NodeId, std::uint32_t>> tc_seen;
        RoutingTable routes;
        std::uint32_t hello_seq = 0;
        std::uint32_t tc_seq = 0;
        RngStream jitter;
        RngStream noise_ctl;   // control-frame reception noise
        RngStream noise_data;  // data-frame reception noise, separate so data
                               // routing differences cannot desync the control
                               // channel draws
    };

public:
    Simulation(Scenario scenario, AdjacencyConfig adjacency, std::uint64_t seed,
               SimObserver observer = {})
        : scenario_(std::move(scenario)), adj_(adjacency), observer_(std::move(observer)) {
        RngStream root(seed);
        for (std::size_t i = 0; i < scenario_.nodes.size(); ++i) {
            if (scenario_.nodes[i].id != static_cast<NodeId>(i)) {
                throw std::invalid_argument("Simulation: node ids must be 0..n-1 in order");
            }
            nodes_.push_back(NodeState{
                {}, {}, {}, {}, {},
                0, 0,
                root.substream("hello-jitter", i),
                root.substream("reception-noise-control", i),
                root.substream("reception-noise-data", i),
            });
        }
        result_.run_seed = seed;
        result_.algorithm = adj_.algorithm;
    }

    RunResult run() {
        for (const NodeSpec& n : scenario_.nodes) {
            schedule_hello(n.id);
            queue_.schedule(scenario_.timing.tc_interval_s, TcEmit{n.id});
        }
        queue_.schedule(scenario_.traffic.start_time, TrafficGen{scenario_.traffic.source});
        queue_.schedule(scenario_.end_time, MetricsSnapshot{});

        queue_.run_until(scenario_.end_time,
                         [this](SimTime t, SimEvent&& ev) { dispatch(t, std::move(ev)); });

        result_.trace_hash = hasher_.value();
        return result_;
    }

    // Post-run inspection hooks for tests.
    const NeighborTable& node_links(NodeId n) const { return nodes_.at(n).links; }
    const RoutingTable& node_routes(NodeId n) const { return nodes_.at(n).routes; }

private:
    bool active(NodeId n, SimTime t) const {
        const auto& off = scenario_.nodes[n].tx_off_time;
        return !off || t < *off;
    }

    Vec2 position(NodeId n, SimTime t) const {
        return position_at(scenario_.nodes[n].trajectory, t);
    }

    const LossHysteresisParams& loss_params() const { return adj_.loss; }
    const SignalHysteresisParams& signal_params() const { return adj_.signal; }

    double initial_quality() const {
        return adj_.algorithm == Algorithm::Loss ? adj_.loss.initial_quality
                                                 : adj_.signal.initial_quality;
    }

    void dispatch(SimTime t, SimEvent&& ev) {
        std::visit([this, t](auto&& e) { handle(t, e); }, std::move(ev));
    }

    // ---- Hello emission / processing -------------------------------------

    void schedule_hello(NodeId n) {
        const auto& tp = scenario_.timing;
        const double jitter =
            tp.hello_jitter_max_s > 0.0 ? nodes_[n].jitter.uniform(0.0, tp.hello_jitter_max_s)
                                        : 0.0;
        queue_.schedule(queue_.now() + tp.hello_interval_s - jitter, HelloEmit{n});
    }

    void handle(SimTime t, const HelloEmit& ev) {
        if (!active(ev.node, t)) return;  // silenced node: stop emitting entirely
        NodeState& ns = nodes_[ev.node];
        HelloMsg msg;
        msg.originator = ev.node;
        msg.seq = ++ns.hello_seq;
        msg.heard_neighbors = ns.links.heard();
        msg.size_bytes = hello_size_bytes(msg.heard_neighbors.size());
        ++result_.control_transmissions;
        result_.control_bytes += msg.size_bytes;
        trace(t, ev.node, "hello_emit", "seq=" + std::to_string(msg.seq));
        broadcast(t, ev.node, msg);
        schedule_hello(ev.node);
    }

    void process_hello(SimTime t, NodeId receiver, const HelloMsg& msg, PowerDbm effective) {
        NodeState& ns = nodes_[receiver];
        const bool heard_back = std::find(msg.heard_neighbors.begin(), msg.heard_neighbors.end(),
                                          receiver) != msg.heard_neighbors.end();
        LinkEntry* e = ns.links.find(msg.originator);
        LinkChange change = LinkChange::NoChange;
        if (e == nullptr) {
            // First Hello only creates the entry and records the baseline
            // signal strength; quality transitions start with the next one.
            e = &ns.links.create(msg.originator, initial_quality(), t);
            e->last_ss = effective;
            trace(t, receiver, "neighbor_new", "nbr=" + std::to_string(msg.originator));
        } else {
            e->last_hello_time = t;
            change = adj_.algorithm == Algorithm::Loss
                         ? loss_on_hello(*e, loss_params())
                         : signal_on_hello(*e, effective, signal_params());
        }
        e->symmetric = heard_back;
        arm_miss_timer(t, receiver, msg.originator);
        if (change != LinkChange::NoChange) on_link_change(t, receiver, msg.originator, change);
    }

    void arm_miss_timer(SimTime t, NodeId node, NodeId neighbor) {
        NodeState& ns = nodes_[node];
        auto it = ns.miss_timers.find(neighbor);
        if (it != ns.miss_timers.end()) queue_.cancel(it->second);
        ns.miss_timers[neighbor] = queue_.schedule(
            t + 1.5 * scenario_.timing.hello_interval_s, HelloMissCheck{node, neighbor});
    }

    void handle(SimTime t, const HelloMissCheck& ev) {
        NodeState& ns = nodes_[ev.node];
        LinkEntry* e = ns.links.find(ev.neighbor);
        if (e == nullptr) return;
        const LinkChange change = adj_.algorithm == Algorithm::Loss
                                      ? loss_on_miss(*e, loss_params())
                                      : signal_on_miss(*e, signal_params());
        trace(t, ev.node, "hello_miss",
              "nbr=" + std::to_string(ev.neighbor) + " q=" + format_double(e->link_quality));
        if (change != LinkChange::NoChange) on_link_change(t, ev.node, ev.neighbor, change);
        if (entry_expired(*e, t, scenario_.timing.neighbor_hold_time_s)) {
            const bool was_usable = e->status == LinkStatus::Valid && e->symmetric;
            ns.links.erase(ev.neighbor);
            ns.miss_timers.erase(ev.neighbor);
            trace(t, ev.node, "neighbor_expired", "nbr=" + std::to_string(ev.neighbor));
            if (was_usable) recompute_routes(t, ev.node);
        } else {
            // one punish per missed Hello while the neighbor stays silent
            ns.miss_timers[ev.neighbor] = queue_.schedule(
                t + scenario_.timing.hello_interval_s, HelloMissCheck{ev.node, ev.neighbor});
        }
    }

    void on_link_change(SimTime t, NodeId node, NodeId neighbor, LinkChange change) {
        trace(t, node, change == LinkChange::Validated ? "link_validated" : "link_invalidated",
              "nbr=" + std::to_string(neighbor));
        if (observer_.on_link_event) observer_.on_link_event({t, node, neighbor, change});
        recompute_routes(t, node);
    }

    // ---- TC flooding ------------------------------------------------------

    void handle(SimTime t, const TcEmit& ev) {
        queue_.schedule(t + scenario_.timing.tc_interval_s, TcEmit{ev.node});
        if (!active(ev.node, t)) return;
        NodeState& ns = nodes_[ev.node];
        // Gate on having heard anyone at all, not on link validity: entry
        // lifecycles depend only on frame receptions, so TC emission counts
        // stay identical across adjacency algorithms under the same seed.
        // An isolated node emits nothing.
        if (ns.links.size() == 0) return;
        TcMsg msg;
        msg.originator = ev.node;
        msg.seq = ++ns.tc_seq;
        msg.advertised_links = ns.links.valid_symmetric();
        msg.size_bytes = tc_size_bytes(msg.advertised_links.size());
        ns.tc_seen.emplace(msg.originator, msg.seq);
        ++result_.control_transmissions;
        result_.control_bytes += msg.size_bytes;
        trace(t, ev.node, "tc_emit", "seq=" + std::to_string(msg.seq));
        broadcast(t, ev.node, msg);
    }

    void process_tc(SimTime t, NodeId receiver, const TcMsg& msg) {
        if (msg.originator == receiver) return;
        NodeState& ns = nodes_[receiver];
        if (!ns.tc_seen.emplace(msg.originator, msg.seq).second) return;  // already relayed
        auto cached = ns.tc_cache.find(msg.originator);
        if (cached == ns.tc_cache.end() || msg.seq >= cached->second.seq) {
            ns.tc_cache[msg.originator] = msg;
            recompute_routes(t, receiver);
        }
        if (!active(receiver, t)) return;
        ++result_.control_transmissions;
        result_.control_bytes += msg.size_bytes;
        trace(t, receiver, "tc_relay",
              "origin=" + std::to_string(msg.originator) + " seq=" + std::to_string(msg.seq));
        broadcast(t, receiver, msg);
    }

    // ---- Frame transport ----------------------------------------------------

    template <typename Body>
    void broadcast(SimTime t, NodeId sender, const Body& body) {
        for (const NodeSpec& n : scenario_.nodes) {
            if (n.id == sender) continue;
            queue_.schedule(t + kFrameDelay, Delivery{sender, body, n.id});
        }
    }

    void unicast(SimTime t, NodeId sender, NodeId receiver, const DataPacket& pkt) {
        queue_.schedule(t + kFrameDelay, Delivery{sender, pkt, receiver});
    }

    void handle(SimTime t, const Delivery& ev) {
        NodeState& ns = nodes_[ev.receiver];
        const double d = std::max(
            kMinDistance, distance(position(ev.sender, t), position(ev.receiver, t)));
        const PowerDbm rx = two_ray_rx_power(scenario_.radio, d);
        const bool is_data = std::holds_alternative<DataPacket>(ev.body);
        RngStream& noise = is_data ? ns.noise_data : ns.noise_ctl;
        const ReceptionDecision decision = reception_decision(scenario_.radio, rx, noise);
        if (!decision.received()) {
            trace(t, ev.receiver, "frame_dropped",
                  std::string("from=") + std::to_string(ev.sender) + " reason=" +
                      (decision.outcome == ReceptionOutcome::BelowThreshold ? "below_threshold"
                                                                            : "random_loss") +
                      (is_data ? " kind=data" : " kind=control"));
            return;
        }
        std::visit(
            [&](const auto& body) { receive(t, ev.receiver, body, decision.effective_power); },
            ev.body);
    }

    void receive(SimTime t, NodeId receiver, const HelloMsg& msg, PowerDbm effective) {
        trace(t, receiver, "hello_recv",
              "from=" + std::to_string(msg.originator) + " ss=" + format_double(effective.value));
        process_hello(t, receiver, msg, effective);
    }

    void receive(SimTime t, NodeId receiver, const TcMsg& msg, PowerDbm) {
        process_tc(t, receiver, msg);
    }

    void receive(SimTime t, NodeId receiver, const DataPacket& pkt, PowerDbm) {
        if (pkt.destination == receiver) {
            ++result_.data_received;
            trace(t, receiver, "data_recv", "seq=" + std::to_string(pkt.seq));
            return;
        }
        forward_data(t, receiver, pkt);
    }

    // ---- Data plane -----------------------------------------------------

    void handle(SimTime t, const TrafficGen& ev) {
        queue_.schedule(t + 1.0 / scenario_.traffic.packets_per_second, TrafficGen{ev.node});
        if (!active(ev.node, t)) return;
        DataPacket pkt;
        pkt.source = ev.node;
        pkt.destination = scenario_.traffic.sink;
        pkt.seq = ++data_seq_;
        pkt.ttl = kDefaultTtl;
        pkt.payload_bytes = scenario_.traffic.payload_bytes;
        ++result_.data_sent;
        trace(t, ev.node, "data_gen", "seq=" + std::to_string(pkt.seq));
        forward_data(t, ev.node, pkt);
    }

    void forward_data(SimTime t, NodeId node, DataPacket pkt) {
        if (!active(node, t)) return;
        const NodeState& ns = nodes_[node];
        auto route = ns.routes.find(pkt.destination);
        if (route == ns.routes.end()) {
            trace(t, node, "data_drop", "seq=" + std::to_string(pkt.seq) + " reason=no_route");
            return;
        }
        if (pkt.ttl == 0) {
            trace(t, node, "data_drop", "seq=" + std::to_string(pkt.seq) + " reason=ttl_expired");
            return;
        }
        --pkt.ttl;
        trace(t, node, "data_fwd",
              "seq=" + std::to_string(pkt.seq) + " next=" + std::to_string(route->second.next_hop));
        unicast(t, node, route->second.next_hop, pkt);
    }

    // ---- Routing ----------------------------------------------------------

    void recompute_routes(SimTime t, NodeId node) {
        NodeState& ns = nodes_[node];
        std::map<NodeId, std::vector<NodeId>> advertised;
        for (const auto& [origin, msg] : ns.tc_cache) {
            advertised[origin] = msg.advertised_links;
        }
        ns.routes = compute_routes(node, ns.links.valid_symmetric(), advertised);
        trace(t, node, "routes", "entries=" + std::to_string(ns.routes.size()));
    }

    void handle(SimTime t, const MetricsSnapshot&) {
        trace(t, 0, "metrics_snapshot",
              "sent=" + std::to_string(result_.data_sent) +
                  " recv=" + std::to_string(result_.data_received) +
                  " control_tx=" + std::to_string(result_.control_transmissions));
    }

    // ---- Trace ------------------------------------------------------------

    static std::string format_double(double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9f", v);
        return buf;
    }

    void trace(SimTime t, NodeId node, std::string_view kind, const std::string& details) {
        std::string line = format_double(t);
        line += ',';
        line += std::to_string(node);
        line += ',';
        line += kind;
        line += ',';
        line += details;
        hasher_.add(line);
        if (observer_.trace_out) *observer_.trace_out << line << '\n';
    }

    Scenario scenario_;
    AdjacencyConfig adj_;
    SimObserver observer_;
    Queue queue_;
    std::vector<NodeState> nodes_;
    RunResult result_;
    TraceHasher hasher_;
    std::uint32_t data_seq_ = 0;
};

}  // namespace linksense
