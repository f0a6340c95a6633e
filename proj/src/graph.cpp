#include "dsc/graph.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace dsc {

DirectedGraph::DirectedGraph(int n) {
    if (n < 0) throw std::invalid_argument("negative node count");
    in_.resize(static_cast<std::size_t>(n));
}

DirectedGraph DirectedGraph::from_mutual_pairs(int n, std::span<const Edge> pairs) {
    DirectedGraph g(n);
    for (auto [i, j] : pairs) g.add_mutual(i, j);
    return g;
}

void DirectedGraph::check_node(int i) const {
    if (i < 0 || i >= size()) {
        throw NodeOutOfRange("node " + std::to_string(i + 1) + " outside graph of " + std::to_string(size()) +
                             " nodes");
    }
}

void DirectedGraph::add_edge(int i, int j) {
    check_node(i);
    check_node(j);
    if (i == j) throw std::invalid_argument("self-loop on node " + std::to_string(i + 1));
    auto& row = in_[static_cast<std::size_t>(i)];
    auto pos = std::lower_bound(row.begin(), row.end(), j);
    if (pos == row.end() || *pos != j) row.insert(pos, j);
}

bool DirectedGraph::has_edge(int i, int j) const {
    check_node(i);
    check_node(j);
    const auto& row = in_[static_cast<std::size_t>(i)];
    return std::binary_search(row.begin(), row.end(), j);
}

std::size_t DirectedGraph::edge_count() const {
    std::size_t total = 0;
    for (const auto& row : in_) total += row.size();
    return total;
}

const std::vector<int>& DirectedGraph::neighbors(int i) const {
    check_node(i);
    return in_[static_cast<std::size_t>(i)];
}

std::vector<Edge> DirectedGraph::edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < size(); ++i)
        for (int j : in_[static_cast<std::size_t>(i)]) out.emplace_back(i, j);
    return out;
}

std::vector<Edge> DirectedGraph::undirected_pairs() const {
    std::vector<Edge> out;
    for (auto [i, j] : edges()) out.emplace_back(std::min(i, j), std::max(i, j));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Edge> PrunedView::retained_edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < size(); ++i)
        for (int j : retained_[static_cast<std::size_t>(i)]) out.emplace_back(i, j);
    return out;
}

PrunedView prune(const DirectedGraph& g, const std::function<double(int, int)>& distance,
                 std::span<const double> eps) {
    if (static_cast<int>(eps.size()) != g.size()) throw SizeMismatch("epsilon vector length != node count");
    std::vector<std::vector<int>> kept(static_cast<std::size_t>(g.size()));
    std::vector<Edge> removed;
    for (int i = 0; i < g.size(); ++i) {
        kept[static_cast<std::size_t>(i)].reserve(g.neighbors(i).size());
        for (int j : g.neighbors(i)) {
            if (distance(i, j) <= eps[static_cast<std::size_t>(i)])
                kept[static_cast<std::size_t>(i)].push_back(j);
            else
                removed.emplace_back(i, j);
        }
    }
    return {std::move(kept), std::move(removed)};
}

PrunedView prune(const DirectedGraph& g, std::span<const BodyOfEvidence> opinions, std::span<const double> eps) {
    if (static_cast<int>(opinions.size()) != g.size()) throw SizeMismatch("opinion count != node count");
    for (const auto& e : opinions) {
        if (!(e.frame() == opinions.front().frame())) throw FrameMismatch("opinions on different frames");
    }
    return prune(
        g,
        [&](int i, int j) {
            return jousselme_distance(opinions[static_cast<std::size_t>(i)], opinions[static_cast<std::size_t>(j)]);
        },
        eps);
}

namespace {

// Breadth-first search; `forward` follows information flow j -> i.
std::vector<int> reach(const DirectedGraph& g, int start, bool forward) {
    g.check_node(start);
    std::vector<std::vector<int>> out_adj;
    if (forward) {
        out_adj.resize(static_cast<std::size_t>(g.size()));
        for (auto [i, j] : g.edges()) out_adj[static_cast<std::size_t>(j)].push_back(i);
    }
    std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
    std::vector<int> queue{start};
    seen[static_cast<std::size_t>(start)] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        const auto& next = forward ? out_adj[static_cast<std::size_t>(v)] : g.neighbors(v);
        for (int w : next) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                queue.push_back(w);
            }
        }
    }
    std::sort(queue.begin(), queue.end());
    return queue;
}

}  // namespace

std::vector<int> out_component(const DirectedGraph& g, int i) { return reach(g, i, true); }

std::vector<int> in_component(const DirectedGraph& g, int i) { return reach(g, i, false); }

bool is_connected(const DirectedGraph& g) {
    if (g.size() <= 1) return true;
    DirectedGraph undirected(g.size());
    for (auto [i, j] : g.undirected_pairs()) undirected.add_mutual(i, j);
    return static_cast<int>(in_component(undirected, 0).size()) == g.size();
}

DirectedGraph erdos_renyi(int n, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must lie in [0, 1]");
    DirectedGraph g(n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (unit(rng) < p) g.add_mutual(i, j);
    return g;
}

ConnectedGraph erdos_renyi_connected(int n, double p, std::uint64_t seed, int max_attempts) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        auto g = erdos_renyi(n, p, seed + static_cast<std::uint64_t>(attempt));
        if (is_connected(g)) return {std::move(g), seed + static_cast<std::uint64_t>(attempt), attempt + 1};
    }
    throw Error("no connected G(" + std::to_string(n) + ", " + std::to_string(p) + ") within " +
                std::to_string(max_attempts) + " attempts");
}

}  // namespace dsc
