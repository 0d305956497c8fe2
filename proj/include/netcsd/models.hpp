#pragma once

#include <optional>
#include <string>

#include "netcsd/graph.hpp"
#include "netcsd/linalg.hpp"

namespace netcsd {

/// Affine parameter schedule: value(alpha) = base + alpha * direction.
struct ParamSchedule {
    Vec base;
    Vec direction;

    Vec at(double alpha) const;
    std::size_t size() const { return base.size(); }
};

enum class ModelVariant { CoupledOscillators, AttractionRepulsion };

std::string variant_name(ModelVariant v);

/// One of the two parameterized network vector fields, with its graph and
/// alpha-schedules.
class ModelSpec {
public:
    static ModelSpec coupled_oscillators(Graph graph, Vec coupling, ParamSchedule omega);
    static ModelSpec attraction_repulsion(Graph graph, ParamSchedule attraction, Vec repulsion,
                                          double range_c);

    ModelVariant variant() const noexcept { return variant_; }
    const Graph& graph() const noexcept { return graph_; }
    int node_count() const noexcept { return graph_.node_count(); }
    int edge_count() const noexcept { return graph_.edge_count(); }

    // Coupled-oscillator accessors.
    const Vec& coupling() const;
    Vec omega(double alpha) const;
    const ParamSchedule& omega_schedule() const;
    /// Graph reweighted by the coupling entries; its Laplacian drives the
    /// normalized-flow and equilibrium formulas.
    Graph coupling_graph() const;

    // Attraction-repulsion accessors.
    Vec attraction(double alpha) const;
    const ParamSchedule& attraction_schedule() const;
    const Vec& repulsion() const;
    double range_c() const;

private:
    ModelSpec(ModelVariant v, Graph g) : variant_(v), graph_(std::move(g)) {}

    ModelVariant variant_;
    Graph graph_;
    Vec coupling_;
    ParamSchedule omega_;
    ParamSchedule attraction_;
    Vec repulsion_;
    double range_c_ = 0.0;
};

Vec kuramoto_field(const Vec& theta, double alpha, const ModelSpec& spec);
Vec attraction_repulsion_field(const Vec& x, double alpha, const ModelSpec& spec);

/// Dispatch on the model variant.
Vec model_field(const Vec& state, double alpha, const ModelSpec& spec);

double reduced_kuramoto_field(double phi, double omega_bar, double k);
double reduced_ar_field(double phi, double w_a, double w_r, double c);

/// Edge weights of the perturbation-dynamics Laplacian at a stable
/// equilibrium: a_e cos((B^T theta)_e) for oscillators, w_a^e(alpha) - w_r^e
/// at consensus for attraction-repulsion.
Vec effective_edge_weights(double alpha, const ModelSpec& spec, const Vec& equilibrium);

}  // namespace netcsd
