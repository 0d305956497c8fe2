#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netcsd/linalg.hpp"

namespace netcsd {

/// Oriented weighted edge. Node indices are 0-based internally; the JSON
/// interface uses 1-based "u" (head) and "v" (tail).
struct Edge {
    int head;
    int tail;
    double weight;
};

/// Undirected weighted graph with a fixed per-edge orientation.
class Graph {
public:
    Graph(int node_count, std::vector<Edge> edges);

    int node_count() const noexcept { return n_; }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }

    Vec weights() const;
    Graph with_weights(const Vec& w) const;

    bool is_connected() const;
    /// Connected with m = n - 1.
    bool is_tree() const;

    /// Connected components after deleting the given edge indices.
    int component_count(std::span<const int> removed_edges = {}) const;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
};

/// Eigenvalues sorted ascending; eigenvector columns orthonormal, column i
/// paired with eigenvalue i, signs fixed so the first component above 1e-10
/// in magnitude is positive.
struct SpectralDecomposition {
    Vec eigenvalues;
    Matrix eigenvectors;

    Vec eigenvector(std::size_t i) const;
};

struct CutSet {
    std::vector<int> nodes;            // S, sorted ascending
    std::vector<int> boundary_edges;   // indices into Graph::edges()
    Vec indicator;                     // +1 on S, -1 elsewhere
    std::vector<int> undetermined;     // |r_j| <= tol, excluded from S
    bool two_cut = false;              // removal splits into exactly 2 components

    bool contains(int node) const;
};

Matrix build_incidence(const Graph& g);
Matrix laplacian(const Graph& g);

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix whose kernel is
/// span{1}. Eigenvalues at or below 1e-9 * lambda_max are treated as zero.
Matrix pseudoinverse(const Matrix& L);

SpectralDecomposition spectral_decomp(const Matrix& M);

std::pair<double, Vec> fiedler_pair(const Matrix& L);

/// Algorithm-1 cut recovery: S = {j : r_j > tol}.
CutSet cut_from_signs(const Graph& g, const Vec& r, double tol);

/// Cut set induced by an explicit node subset (0-based indices).
CutSet cutset_from_nodes(const Graph& g, std::vector<int> nodes);

/// (n-1) x n matrix with Q Q^T = I and Q^T Q = I - (1/n) 11^T, built from
/// Helmert contrast rows.
Matrix projection_matrix(int n);

/// Per-edge minimum of the weight family over the grid; same topology.
Graph lower_bound_graph(const Graph& topology,
                        const std::function<Vec(double)>& weights_at,
                        std::span<const double> alpha_grid);

}  // namespace netcsd
