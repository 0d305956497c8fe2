#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "netcsd/graph.hpp"
#include "netcsd/linalg.hpp"

namespace netcsd::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Random tree on n nodes: node i attaches to a random earlier node.
inline Graph random_tree(int n, Rng& rng, double w_lo = 0.5, double w_hi = 2.0) {
    std::vector<Edge> edges;
    for (int i = 1; i < n; ++i) {
        const int parent = uniform_int(rng, 0, i - 1);
        // Randomize the stored orientation.
        if (uniform(rng, 0.0, 1.0) < 0.5)
            edges.push_back(Edge{parent, i, uniform(rng, w_lo, w_hi)});
        else
            edges.push_back(Edge{i, parent, uniform(rng, w_lo, w_hi)});
    }
    return Graph(n, std::move(edges));
}

/// Random connected graph: a tree plus up to `extra` chords.
inline Graph random_connected_graph(int n, int extra, Rng& rng) {
    Graph tree = random_tree(n, rng);
    std::vector<Edge> edges = tree.edges();
    int attempts = 0;
    while (extra > 0 && attempts < 50) {
        ++attempts;
        const int u = uniform_int(rng, 0, n - 1);
        const int v = uniform_int(rng, 0, n - 1);
        if (u == v) continue;
        bool duplicate = false;
        for (const Edge& e : edges) {
            if ((e.head == u && e.tail == v) || (e.head == v && e.tail == u)) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        edges.push_back(Edge{u, v, uniform(rng, 0.5, 2.0)});
        --extra;
    }
    return Graph(n, std::move(edges));
}

/// Node side of a tree edge: the component containing edge.head after the
/// edge is removed (a 2-cutset of the tree by construction).
inline std::vector<int> tree_cut_side(const Graph& tree, int edge_index) {
    std::vector<std::vector<std::pair<int, int>>> adj(
        static_cast<std::size_t>(tree.node_count()));
    for (int e = 0; e < tree.edge_count(); ++e) {
        adj[static_cast<std::size_t>(tree.edge(e).head)].push_back({tree.edge(e).tail, e});
        adj[static_cast<std::size_t>(tree.edge(e).tail)].push_back({tree.edge(e).head, e});
    }
    std::vector<int> side;
    std::vector<bool> seen(static_cast<std::size_t>(tree.node_count()), false);
    std::vector<int> stack{tree.edge(edge_index).head};
    seen[static_cast<std::size_t>(tree.edge(edge_index).head)] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        side.push_back(u);
        for (auto [v, e] : adj[static_cast<std::size_t>(u)]) {
            if (e == edge_index || seen[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = true;
            stack.push_back(v);
        }
    }
    return side;
}

inline Vec random_vec(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (double& x : v) x = uniform(rng, lo, hi);
    return v;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

}  // namespace netcsd::testing
