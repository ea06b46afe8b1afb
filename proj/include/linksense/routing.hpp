#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <tuple>
#include <vector>

#include "linksense/types.hpp"

namespace linksense {

/// Protocol timing. The 2 s Hello interval is what makes a two-miss
/// invalidation take about four seconds.
struct TimingParams {
    double hello_interval_s = 2.0;
    double hello_jitter_max_s = 0.5;
    double tc_interval_s = 5.0;
    double neighbor_hold_time_s = 6.0;  // 3x hello interval
};

constexpr std::uint32_t kMsgHeaderBytes = 16;
constexpr std::uint32_t kAddressBytes = 4;
constexpr std::uint32_t kDefaultTtl = 32;

/// Periodic local broadcast; heard_neighbors lets receivers confirm
/// bidirectionality.
struct HelloMsg {
    NodeId originator = 0;
    std::uint32_t seq = 0;
    std::vector<NodeId> heard_neighbors;
    std::uint32_t size_bytes = 0;
};

/// Topology broadcast, flooded network-wide; advertises the originator's
/// valid symmetric links.
struct TcMsg {
    NodeId originator = 0;
    std::uint32_t seq = 0;
    std::vector<NodeId> advertised_links;
    std::uint32_t size_bytes = 0;
};

inline std::uint32_t hello_size_bytes(std::size_t heard_count) {
    return kMsgHeaderBytes + kAddressBytes * static_cast<std::uint32_t>(heard_count);
}

inline std::uint32_t tc_size_bytes(std::size_t link_count) {
    return kMsgHeaderBytes + kAddressBytes * static_cast<std::uint32_t>(link_count);
}

struct RouteEntry {
    NodeId next_hop = 0;
    std::uint32_t hop_count = 0;
};

/// destination -> (next hop, hop count); unreachable destinations absent.
using RoutingTable = std::map<NodeId, RouteEntry>;

/// Shortest-hop-count routes over the union of the node's own valid
/// symmetric links and links advertised in the freshest TC per originator.
/// Ties between equal-length paths resolve to the smallest next-hop id,
/// so tables are deterministic for a given topology snapshot.
inline RoutingTable compute_routes(NodeId self, const std::vector<NodeId>& own_links,
                                   const std::map<NodeId, std::vector<NodeId>>& advertised) {
    std::map<NodeId, std::set<NodeId>> edges;
    edges[self].insert(own_links.begin(), own_links.end());
    for (const auto& [origin, links] : advertised) {
        if (origin == self) continue;  // own links are authoritative
        edges[origin].insert(links.begin(), links.end());
    }

    // Dijkstra over the key (hop_count, next_hop, node): the first time a
    // node is settled it carries the fewest hops, smallest next hop.
    struct Candidate {
        std::uint32_t hops;
        NodeId next_hop;
        NodeId node;
        bool operator>(const Candidate& o) const {
            return std::tie(hops, next_hop, node) > std::tie(o.hops, o.next_hop, o.node);
        }
    };
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> frontier;
    for (NodeId nb : edges[self]) {
        frontier.push({1, nb, nb});
    }

    RoutingTable table;
    std::set<NodeId> settled{self};
    while (!frontier.empty()) {
        Candidate c = frontier.top();
        frontier.pop();
        if (settled.count(c.node)) continue;
        settled.insert(c.node);
        table[c.node] = {c.next_hop, c.hops};
        auto it = edges.find(c.node);
        if (it == edges.end()) continue;
        for (NodeId nb : it->second) {
            if (!settled.count(nb)) frontier.push({c.hops + 1, c.next_hop, nb});
        }
    }
    return table;
}

}  // namespace linksense
