#include "netcsd/models.hpp"

#include <cmath>

#include "netcsd/errors.hpp"

namespace netcsd {

namespace {

constexpr double kEquilibriumTol = 1e-6;

/// exp with underflow guard: arguments below -700 return 0 (agents far
/// outside the repulsion range feel none).
double guarded_exp(double arg) { return arg < -700.0 ? 0.0 : std::exp(arg); }

void require_finite(const Vec& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw ValidationError(std::string(what) + " is not finite");
}

}  // namespace

Vec ParamSchedule::at(double alpha) const {
    if (base.size() != direction.size())
        throw ValidationError("schedule base and direction lengths differ");
    Vec out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + alpha * direction[i];
    return out;
}

std::string variant_name(ModelVariant v) {
    return v == ModelVariant::CoupledOscillators ? "coupled_oscillators" : "attraction_repulsion";
}

ModelSpec ModelSpec::coupled_oscillators(Graph graph, Vec coupling, ParamSchedule omega) {
    if (static_cast<int>(coupling.size()) != graph.edge_count())
        throw ValidationError("coupling vector length must equal the edge count");
    for (double a : coupling)
        if (!(a > 0.0)) throw ValidationError("coupling entries must be strictly positive");
    if (static_cast<int>(omega.size()) != graph.node_count())
        throw ValidationError("omega schedule length must equal the node count");
    ModelSpec spec(ModelVariant::CoupledOscillators, std::move(graph));
    spec.coupling_ = std::move(coupling);
    spec.omega_ = std::move(omega);
    return spec;
}

ModelSpec ModelSpec::attraction_repulsion(Graph graph, ParamSchedule attraction, Vec repulsion,
                                          double range_c) {
    if (static_cast<int>(attraction.size()) != graph.edge_count())
        throw ValidationError("attraction schedule length must equal the edge count");
    if (static_cast<int>(repulsion.size()) != graph.edge_count())
        throw ValidationError("repulsion vector length must equal the edge count");
    for (double w : repulsion)
        if (!(w > 0.0)) throw ValidationError("repulsion entries must be strictly positive");
    if (!(range_c > 0.0)) throw ValidationError("repulsion range c must be strictly positive");
    ModelSpec spec(ModelVariant::AttractionRepulsion, std::move(graph));
    spec.attraction_ = std::move(attraction);
    spec.repulsion_ = std::move(repulsion);
    spec.range_c_ = range_c;
    return spec;
}

const Vec& ModelSpec::coupling() const {
    if (variant_ != ModelVariant::CoupledOscillators)
        throw ValidationError("coupling is only defined for the coupled-oscillator variant");
    return coupling_;
}

Vec ModelSpec::omega(double alpha) const {
    if (variant_ != ModelVariant::CoupledOscillators)
        throw ValidationError("omega is only defined for the coupled-oscillator variant");
    Vec w = omega_.at(alpha);
    require_finite(w, "omega(alpha)");
    return w;
}

const ParamSchedule& ModelSpec::omega_schedule() const {
    if (variant_ != ModelVariant::CoupledOscillators)
        throw ValidationError("omega schedule is only defined for the coupled-oscillator variant");
    return omega_;
}

Graph ModelSpec::coupling_graph() const { return graph_.with_weights(coupling()); }

Vec ModelSpec::attraction(double alpha) const {
    if (variant_ != ModelVariant::AttractionRepulsion)
        throw ValidationError("attraction is only defined for the attraction-repulsion variant");
    Vec w = attraction_.at(alpha);
    require_finite(w, "attraction(alpha)");
    return w;
}

const ParamSchedule& ModelSpec::attraction_schedule() const {
    if (variant_ != ModelVariant::AttractionRepulsion)
        throw ValidationError(
            "attraction schedule is only defined for the attraction-repulsion variant");
    return attraction_;
}

const Vec& ModelSpec::repulsion() const {
    if (variant_ != ModelVariant::AttractionRepulsion)
        throw ValidationError("repulsion is only defined for the attraction-repulsion variant");
    return repulsion_;
}

double ModelSpec::range_c() const {
    if (variant_ != ModelVariant::AttractionRepulsion)
        throw ValidationError("range c is only defined for the attraction-repulsion variant");
    return range_c_;
}

Vec kuramoto_field(const Vec& theta, double alpha, const ModelSpec& spec) {
    if (spec.variant() != ModelVariant::CoupledOscillators)
        throw ValidationError("kuramoto_field requires the coupled-oscillator variant");
    if (static_cast<int>(theta.size()) != spec.node_count())
        throw ValidationError("state length does not match node count");

    // omega(alpha) - B A sin(B^T theta), accumulated edge by edge.
    Vec field = spec.omega(alpha);
    const Vec& a = spec.coupling();
    for (int e = 0; e < spec.edge_count(); ++e) {
        const Edge& edge = spec.graph().edge(e);
        const double flow = a[static_cast<std::size_t>(e)] *
                            std::sin(theta[static_cast<std::size_t>(edge.head)] -
                                     theta[static_cast<std::size_t>(edge.tail)]);
        field[static_cast<std::size_t>(edge.head)] -= flow;
        field[static_cast<std::size_t>(edge.tail)] += flow;
    }
    return field;
}

Vec attraction_repulsion_field(const Vec& x, double alpha, const ModelSpec& spec) {
    if (spec.variant() != ModelVariant::AttractionRepulsion)
        throw ValidationError("attraction_repulsion_field requires the attraction-repulsion variant");
    if (static_cast<int>(x.size()) != spec.node_count())
        throw ValidationError("state length does not match node count");

    // -B Abar(x, alpha) B^T x with Abar_ee = w_a^e(alpha) - w_r^e exp(-(x_i-x_j)^2/c).
    const Vec wa = spec.attraction(alpha);
    const Vec& wr = spec.repulsion();
    const double c = spec.range_c();
    Vec field(x.size(), 0.0);
    for (int e = 0; e < spec.edge_count(); ++e) {
        const Edge& edge = spec.graph().edge(e);
        const double diff = x[static_cast<std::size_t>(edge.head)] -
                            x[static_cast<std::size_t>(edge.tail)];
        const double weight = wa[static_cast<std::size_t>(e)] -
                              wr[static_cast<std::size_t>(e)] * guarded_exp(-diff * diff / c);
        field[static_cast<std::size_t>(edge.head)] -= weight * diff;
        field[static_cast<std::size_t>(edge.tail)] += weight * diff;
    }
    return field;
}

Vec model_field(const Vec& state, double alpha, const ModelSpec& spec) {
    return spec.variant() == ModelVariant::CoupledOscillators
               ? kuramoto_field(state, alpha, spec)
               : attraction_repulsion_field(state, alpha, spec);
}

double reduced_kuramoto_field(double phi, double omega_bar, double k) {
    if (!(k > 0.0)) throw ValidationError("coupling k must be strictly positive");
    return omega_bar - k * std::sin(phi);
}

double reduced_ar_field(double phi, double w_a, double w_r, double c) {
    if (!(w_a > 0.0) || !(w_r > 0.0) || !(c > 0.0))
        throw ValidationError("w_a, w_r and c must be strictly positive");
    return -2.0 * phi * (w_a - w_r * guarded_exp(-phi * phi / c));
}

Vec effective_edge_weights(double alpha, const ModelSpec& spec, const Vec& equilibrium) {
    const Vec residual = model_field(equilibrium, alpha, spec);
    if (norm_inf(residual) > kEquilibriumTol)
        throw NotAnEquilibrium("field residual " + std::to_string(norm_inf(residual)) +
                               " exceeds " + std::to_string(kEquilibriumTol));

    Vec weights(static_cast<std::size_t>(spec.edge_count()));
    if (spec.variant() == ModelVariant::CoupledOscillators) {
        const Vec& a = spec.coupling();
        for (int e = 0; e < spec.edge_count(); ++e) {
            const Edge& edge = spec.graph().edge(e);
            const double gap = equilibrium[static_cast<std::size_t>(edge.head)] -
                               equilibrium[static_cast<std::size_t>(edge.tail)];
            weights[static_cast<std::size_t>(e)] = a[static_cast<std::size_t>(e)] * std::cos(gap);
        }
    } else {
        // The linearization weights are taken at consensus, where the
        // repulsion exponential equals one.
        double spread = 0.0;
        for (double x : equilibrium) spread = std::max(spread, std::abs(x - equilibrium.front()));
        if (spread > 1e-8 * std::max(1.0, norm_inf(equilibrium)))
            throw NotAnEquilibrium("attraction-repulsion weights are defined at consensus states");
        const Vec wa = spec.attraction(alpha);
        const Vec& wr = spec.repulsion();
        for (std::size_t e = 0; e < weights.size(); ++e) weights[e] = wa[e] - wr[e];
    }
    return weights;
}

}  // namespace netcsd
