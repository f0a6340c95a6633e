#pragma once

// Directed networks. Node indices are 0-based in code; files and the CLI use 1-based ids.
//
// Edge (i, j) means node i RECEIVES from node j. Information flows j -> i.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dsc/dst.hpp"

namespace dsc {

using Edge = std::pair<int, int>;

class DirectedGraph {
public:
    explicit DirectedGraph(int n = 0);

    /// Each unordered pair becomes the two edges (i, j) and (j, i).
    static DirectedGraph from_mutual_pairs(int n, std::span<const Edge> pairs);

    int size() const { return static_cast<int>(in_.size()); }

    /// Adds edge i <- j. Self-loops are rejected, duplicates ignored.
    void add_edge(int i, int j);
    void add_mutual(int i, int j) {
        add_edge(i, j);
        add_edge(j, i);
    }

    bool has_edge(int i, int j) const;
    std::size_t edge_count() const;

    /// Sources node i receives from, ascending.
    const std::vector<int>& neighbors(int i) const;

    /// All directed edges (i, j), sorted.
    std::vector<Edge> edges() const;
    /// Unordered pairs {i, j}, i < j, joined by at least one directed edge.
    std::vector<Edge> undirected_pairs() const;

    void check_node(int i) const;

private:
    std::vector<std::vector<int>> in_;
};

/// Edges of a base graph that survive bounded-confidence pruning at one step.
class PrunedView {
public:
    PrunedView() = default;
    PrunedView(std::vector<std::vector<int>> retained, std::vector<Edge> removed)
        : retained_(std::move(retained)), removed_(std::move(removed)) {}

    int size() const { return static_cast<int>(retained_.size()); }
    const std::vector<int>& neighbors(int i) const { return retained_.at(static_cast<std::size_t>(i)); }
    std::vector<Edge> retained_edges() const;
    /// Base edges (i, j) dropped because the distance exceeded epsilon_i.
    const std::vector<Edge>& removed_edges() const { return removed_; }

private:
    std::vector<std::vector<int>> retained_;
    std::vector<Edge> removed_;
};

/// Keeps edge (i, j) iff distance(i, j) <= eps[i].
PrunedView prune(const DirectedGraph& g, const std::function<double(int, int)>& distance,
                 std::span<const double> eps);

/// Pruning against Jousselme distances between opinions. Throws FrameMismatch.
PrunedView prune(const DirectedGraph& g, std::span<const BodyOfEvidence> opinions, std::span<const double> eps);

/// Nodes reachable from i along information flow, including i.
std::vector<int> out_component(const DirectedGraph& g, int i);
/// Nodes from which i is reachable, including i.
std::vector<int> in_component(const DirectedGraph& g, int i);

/// Weak connectivity.
bool is_connected(const DirectedGraph& g);

/// G(n, p) with mutual links. Deterministic for a given seed.
DirectedGraph erdos_renyi(int n, double p, std::uint64_t seed);

struct ConnectedGraph {
    DirectedGraph graph;
    std::uint64_t seed_used;
    int attempts;
};

/// Draws erdos_renyi(n, p, seed), seed + 1, ... until connected. Throws Error after `max_attempts`.
ConnectedGraph erdos_renyi_connected(int n, double p, std::uint64_t seed, int max_attempts = 1000);

}  // namespace dsc
