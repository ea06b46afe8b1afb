#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <vector>

#include "linksense/engine.hpp"
#include "linksense/routing.hpp"

using namespace linksense;

TEST_CASE("three-node line: far end is two hops via the middle") {
    // A(0) - B(1) - C(2)
    std::map<NodeId, std::vector<NodeId>> adv{{1, {0, 2}}, {2, {1}}};
    RoutingTable t = compute_routes(0, {1}, adv);
    REQUIRE(t.at(1).next_hop == 1);
    REQUIRE(t.at(1).hop_count == 1);
    REQUIRE(t.at(2).next_hop == 1);
    REQUIRE(t.at(2).hop_count == 2);
}

TEST_CASE("fully connected triangle: every route is one hop") {
    std::map<NodeId, std::vector<NodeId>> adv{{1, {0, 2}}, {2, {0, 1}}};
    RoutingTable t = compute_routes(0, {1, 2}, adv);
    REQUIRE(t.at(1).hop_count == 1);
    REQUIRE(t.at(2).hop_count == 1);
    REQUIRE(t.at(2).next_hop == 2);
}

TEST_CASE("severed chain: node 0 unreachable once link (0,1) is gone") {
    // chain 0-1-...-9 with the (0,1) edge removed
    std::map<NodeId, std::vector<NodeId>> adv;
    for (NodeId n = 1; n < 10; ++n) {
        std::vector<NodeId> links;
        if (n > 1) links.push_back(n - 1);
        if (n < 9) links.push_back(n + 1);
        adv[n] = links;
    }
    for (NodeId self = 1; self < 10; ++self) {
        std::vector<NodeId> own = adv[self];
        RoutingTable t = compute_routes(self, own, adv);
        REQUIRE(t.find(0) == t.end());
        // everyone else on the chain is reachable
        for (NodeId dst = 1; dst < 10; ++dst) {
            if (dst != self) REQUIRE(t.count(dst) == 1);
        }
    }
}

TEST_CASE("equal-length paths tie-break to the smallest next hop") {
    // 0 -> {1, 2}, both reach 3 in two hops
    std::map<NodeId, std::vector<NodeId>> adv{{1, {3}}, {2, {3}}};
    RoutingTable t = compute_routes(0, {2, 1}, adv);
    REQUIRE(t.at(3).next_hop == 1);
    REQUIRE(t.at(3).hop_count == 2);
}

TEST_CASE("unreachable destinations are omitted") {
    std::map<NodeId, std::vector<NodeId>> adv{{5, {6}}};  // disconnected island
    RoutingTable t = compute_routes(0, {1}, adv);
    REQUIRE(t.count(5) == 0);
    REQUIRE(t.count(6) == 0);
    REQUIRE(t.size() == 1);
}

TEST_CASE("message size grows with the address count") {
    REQUIRE(hello_size_bytes(0) == kMsgHeaderBytes);
    REQUIRE(hello_size_bytes(3) == kMsgHeaderBytes + 3 * kAddressBytes);
    REQUIRE(tc_size_bytes(2) == kMsgHeaderBytes + 2 * kAddressBytes);
}

TEST_CASE("property: tables computed from a shared topology are loop-free") {
    RngStream rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const NodeId n = 8;
        // random undirected graph, all nodes advertise their links
        std::map<NodeId, std::set<NodeId>> undirected;
        for (NodeId a = 0; a < n; ++a) {
            for (NodeId b = a + 1; b < n; ++b) {
                if (rng.bernoulli(0.35)) {
                    undirected[a].insert(b);
                    undirected[b].insert(a);
                }
            }
        }
        std::map<NodeId, std::vector<NodeId>> adv;
        for (const auto& [node, links] : undirected) {
            adv[node] = std::vector<NodeId>(links.begin(), links.end());
        }
        std::vector<RoutingTable> tables(n);
        for (NodeId self = 0; self < n; ++self) {
            std::vector<NodeId> own;
            if (auto it = undirected.find(self); it != undirected.end()) {
                own.assign(it->second.begin(), it->second.end());
            }
            tables[self] = compute_routes(self, own, adv);
        }
        // Following next hops toward any destination strictly decreases the
        // hop count, so forwarding can never loop.
        for (NodeId src = 0; src < n; ++src) {
            for (const auto& [dst, entry] : tables[src]) {
                NodeId at = src;
                std::uint32_t prev_hops = entry.hop_count + 1;
                while (at != dst) {
                    auto route = tables[at].find(dst);
                    REQUIRE(route != tables[at].end());
                    REQUIRE(route->second.hop_count < prev_hops);
                    prev_hops = route->second.hop_count;
                    at = route->second.next_hop;
                }
            }
        }
    }
}
