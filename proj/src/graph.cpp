#include "netcsd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "netcsd/errors.hpp"

namespace netcsd {

namespace {

constexpr double kSignConventionTol = 1e-10;
constexpr double kPinvClampRel = 1e-9;
constexpr double kFiedlerDegeneracyTol = 1e-9;

std::string edge_label(const Edge& e) {
    std::ostringstream os;
    os << "(" << e.head + 1 << "," << e.tail + 1 << ")";
    return os.str();
}

}  // namespace

Graph::Graph(int node_count, std::vector<Edge> edges) : n_(node_count), edges_(std::move(edges)) {
    if (n_ < 1) throw ValidationError("graph needs at least one node");
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.head < 0 || e.head >= n_ || e.tail < 0 || e.tail >= n_) {
            throw ValidationError("edge " + std::to_string(i + 1) + " references a node outside 1.." +
                                  std::to_string(n_));
        }
        if (e.head == e.tail)
            throw ValidationError("edge " + std::to_string(i + 1) + " is a self-loop");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw ValidationError("edge " + edge_label(e) + " must have a positive finite weight");
        auto key = std::minmax(e.head, e.tail);
        if (!seen.insert(key).second)
            throw ValidationError("duplicate edge between nodes " + std::to_string(key.first + 1) +
                                  " and " + std::to_string(key.second + 1));
    }
}

Vec Graph::weights() const {
    Vec w(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) w[e] = edges_[e].weight;
    return w;
}

Graph Graph::with_weights(const Vec& w) const {
    if (static_cast<int>(w.size()) != edge_count())
        throw ValidationError("weight vector length does not match edge count");
    std::vector<Edge> edges = edges_;
    for (std::size_t e = 0; e < edges.size(); ++e) edges[e].weight = w[e];
    return Graph(n_, std::move(edges));
}

bool Graph::is_connected() const { return component_count() == 1; }

bool Graph::is_tree() const { return edge_count() == n_ - 1 && is_connected(); }

int Graph::component_count(std::span<const int> removed_edges) const {
    std::vector<bool> removed(edges_.size(), false);
    for (int e : removed_edges)
        if (e >= 0 && e < edge_count()) removed[static_cast<std::size_t>(e)] = true;

    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_));
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (removed[e]) continue;
        adj[static_cast<std::size_t>(edges_[e].head)].push_back(edges_[e].tail);
        adj[static_cast<std::size_t>(edges_[e].tail)].push_back(edges_[e].head);
    }

    std::vector<bool> visited(static_cast<std::size_t>(n_), false);
    int components = 0;
    std::vector<int> stack;
    for (int start = 0; start < n_; ++start) {
        if (visited[static_cast<std::size_t>(start)]) continue;
        ++components;
        stack.push_back(start);
        visited[static_cast<std::size_t>(start)] = true;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (!visited[static_cast<std::size_t>(v)]) {
                    visited[static_cast<std::size_t>(v)] = true;
                    stack.push_back(v);
                }
            }
        }
    }
    return components;
}

Vec SpectralDecomposition::eigenvector(std::size_t i) const {
    Vec v(eigenvectors.rows());
    for (std::size_t r = 0; r < eigenvectors.rows(); ++r) v[r] = eigenvectors(r, i);
    return v;
}

bool CutSet::contains(int node) const {
    return std::binary_search(nodes.begin(), nodes.end(), node);
}

Matrix build_incidence(const Graph& g) {
    Matrix b(static_cast<std::size_t>(g.node_count()), static_cast<std::size_t>(g.edge_count()));
    for (int e = 0; e < g.edge_count(); ++e) {
        b(static_cast<std::size_t>(g.edge(e).head), static_cast<std::size_t>(e)) = 1.0;
        b(static_cast<std::size_t>(g.edge(e).tail), static_cast<std::size_t>(e)) = -1.0;
    }
    return b;
}

Matrix laplacian(const Graph& g) {
    const auto n = static_cast<std::size_t>(g.node_count());
    Matrix l(n, n);
    for (const Edge& e : g.edges()) {
        const auto h = static_cast<std::size_t>(e.head);
        const auto t = static_cast<std::size_t>(e.tail);
        l(h, h) += e.weight;
        l(t, t) += e.weight;
        l(h, t) -= e.weight;
        l(t, h) -= e.weight;
    }
    return l;
}

namespace {

/// Cyclic Jacobi rotations. Converged when the off-diagonal Frobenius norm
/// drops below 1e-12 * ||M||_F.
void jacobi_eigen(Matrix a, Vec& eigenvalues, Matrix& eigenvectors) {
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);
    const double scale = a.frobenius_norm();
    const double target = 1e-12 * scale;

    auto off_norm = [&]() {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) acc += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(acc);
    };

    const int max_sweeps = 100;
    int sweep = 0;
    if (scale > 0.0) {
        for (; sweep < max_sweeps; ++sweep) {
            if (off_norm() <= target) break;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    const double apq = a(p, q);
                    if (std::abs(apq) <= target / static_cast<double>(n * n)) continue;
                    const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
                    double t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                    const double c = 1.0 / std::sqrt(1.0 + t * t);
                    const double s = t * c;

                    for (std::size_t k = 0; k < n; ++k) {
                        const double akp = a(k, p);
                        const double akq = a(k, q);
                        a(k, p) = c * akp - s * akq;
                        a(k, q) = s * akp + c * akq;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        const double apk = a(p, k);
                        const double aqk = a(q, k);
                        a(p, k) = c * apk - s * aqk;
                        a(q, k) = s * apk + c * aqk;
                    }
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = v(k, p);
                        const double vkq = v(k, q);
                        v(k, p) = c * vkp - s * vkq;
                        v(k, q) = s * vkp + c * vkq;
                    }
                }
            }
        }
        if (off_norm() > target) {
            throw NoConvergence("Jacobi eigensolver did not converge after " +
                                std::to_string(sweep) + " sweeps");
        }
    }

    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a(i, i);
    eigenvectors = std::move(v);
}

void apply_sign_convention(Matrix& v) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
        double lead = 0.0;
        for (std::size_t i = 0; i < v.rows(); ++i) {
            if (std::abs(v(i, j)) > kSignConventionTol) {
                lead = v(i, j);
                break;
            }
        }
        if (lead < 0.0)
            for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
    }
}

}  // namespace

SpectralDecomposition spectral_decomp(const Matrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("spectral_decomp requires a square matrix");
    const double scale = m.frobenius_norm();
    if (m.max_asymmetry() > 1e-12 * std::max(1.0, scale))
        throw ValidationError("spectral_decomp input is not symmetric");

    Matrix sym = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) sym(i, j) = 0.5 * (m(i, j) + m(j, i));

    SpectralDecomposition out;
    Matrix vectors;
    jacobi_eigen(std::move(sym), out.eigenvalues, vectors);

    std::vector<std::size_t> order(out.eigenvalues.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.eigenvalues[a] < out.eigenvalues[b];
    });

    Vec sorted(out.eigenvalues.size());
    Matrix perm(vectors.rows(), vectors.cols());
    for (std::size_t j = 0; j < order.size(); ++j) {
        sorted[j] = out.eigenvalues[order[j]];
        for (std::size_t i = 0; i < vectors.rows(); ++i) perm(i, j) = vectors(i, order[j]);
    }
    out.eigenvalues = std::move(sorted);
    apply_sign_convention(perm);
    out.eigenvectors = std::move(perm);
    return out;
}

Matrix pseudoinverse(const Matrix& l) {
    SpectralDecomposition d = spectral_decomp(l);
    const std::size_t n = d.eigenvalues.size();
    double lambda_max = 0.0;
    for (double x : d.eigenvalues) lambda_max = std::max(lambda_max, std::abs(x));
    const double clamp = kPinvClampRel * lambda_max;

    std::size_t kernel_dim = 0;
    for (double x : d.eigenvalues)
        if (std::abs(x) <= clamp) ++kernel_dim;
    if (kernel_dim > 1) {
        throw DisconnectedGraph("Laplacian kernel has dimension " + std::to_string(kernel_dim) +
                                "; the graph is not connected");
    }

    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(d.eigenvalues[k]) <= clamp) continue;
        const double inv = 1.0 / d.eigenvalues[k];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += inv * d.eigenvectors(i, k) * d.eigenvectors(j, k);
    }
    return out;
}

std::pair<double, Vec> fiedler_pair(const Matrix& l) {
    if (l.rows() < 2) throw ValidationError("fiedler_pair needs at least two nodes");
    SpectralDecomposition d = spectral_decomp(l);
    double lambda_max = std::abs(d.eigenvalues.back());
    if (d.eigenvalues[1] <= kPinvClampRel * lambda_max)
        throw DisconnectedGraph("lambda_2 is numerically zero; the graph is not connected");
    if (d.eigenvalues.size() >= 3 &&
        d.eigenvalues[2] - d.eigenvalues[1] <= kFiedlerDegeneracyTol) {
        std::ostringstream os;
        os << "lambda_2 = " << d.eigenvalues[1] << " and lambda_3 = " << d.eigenvalues[2]
           << " coincide; Fiedler direction is ill-defined";
        throw DegenerateFiedler(os.str());
    }
    return {d.eigenvalues[1], d.eigenvector(1)};
}

namespace {

CutSet finalize_cut(const Graph& g, std::vector<int> nodes, std::vector<int> undetermined) {
    std::sort(nodes.begin(), nodes.end());
    CutSet cut;
    cut.nodes = std::move(nodes);
    cut.undetermined = std::move(undetermined);
    cut.indicator.assign(static_cast<std::size_t>(g.node_count()), -1.0);
    for (int i : cut.nodes) cut.indicator[static_cast<std::size_t>(i)] = 1.0;
    for (int e = 0; e < g.edge_count(); ++e) {
        const bool head_in = cut.contains(g.edge(e).head);
        const bool tail_in = cut.contains(g.edge(e).tail);
        if (head_in != tail_in) cut.boundary_edges.push_back(e);
    }
    cut.two_cut = g.component_count(cut.boundary_edges) == 2;
    return cut;
}

}  // namespace

CutSet cut_from_signs(const Graph& g, const Vec& r, double tol) {
    if (static_cast<int>(r.size()) != g.node_count())
        throw ValidationError("residual length does not match node count");
    if (tol < 0.0) throw ValidationError("sign tolerance must be nonnegative");

    std::vector<int> positive;
    std::vector<int> negative;
    std::vector<int> undetermined;
    for (int i = 0; i < g.node_count(); ++i) {
        const double ri = r[static_cast<std::size_t>(i)];
        if (ri > tol)
            positive.push_back(i);
        else if (ri < -tol)
            negative.push_back(i);
        else
            undetermined.push_back(i);
    }
    if (positive.empty() || negative.empty())
        throw EmptyCut("residual signs place every determined node on one side");
    return finalize_cut(g, std::move(positive), std::move(undetermined));
}

CutSet cutset_from_nodes(const Graph& g, std::vector<int> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (int i : nodes)
        if (i < 0 || i >= g.node_count())
            throw ValidationError("cut set node " + std::to_string(i + 1) + " out of range");
    if (nodes.empty() || static_cast<int>(nodes.size()) == g.node_count())
        throw EmptyCut("cut set must be a proper nonempty node subset");
    return finalize_cut(g, std::move(nodes), {});
}

Matrix projection_matrix(int n) {
    if (n < 2) throw ValidationError("projection_matrix needs n >= 2");
    const auto un = static_cast<std::size_t>(n);
    Matrix q(un - 1, un);
    for (std::size_t k = 1; k < un; ++k) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(k) * static_cast<double>(k + 1));
        for (std::size_t j = 0; j < k; ++j) q(k - 1, j) = scale;
        q(k - 1, k) = -static_cast<double>(k) * scale;
    }
    return q;
}

Graph lower_bound_graph(const Graph& topology, const std::function<Vec(double)>& weights_at,
                        std::span<const double> alpha_grid) {
    if (alpha_grid.empty()) throw ValidationError("lower_bound_graph needs a nonempty alpha grid");
    const auto m = static_cast<std::size_t>(topology.edge_count());
    Vec lower(m, std::numeric_limits<double>::infinity());
    for (double alpha : alpha_grid) {
        Vec w = weights_at(alpha);
        if (w.size() != m)
            throw ValidationError("weight family returned wrong edge count at alpha = " +
                                  std::to_string(alpha));
        for (std::size_t e = 0; e < m; ++e) lower[e] = std::min(lower[e], w[e]);
    }
    for (std::size_t e = 0; e < m; ++e) {
        if (!(lower[e] > 0.0)) {
            throw NonpositiveWeight("lower-bound weight of edge " +
                                    edge_label(topology.edge(static_cast<int>(e))) +
                                    " is " + std::to_string(lower[e]));
        }
    }
    return topology.with_weights(lower);
}

}  // namespace netcsd
