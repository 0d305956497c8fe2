#include "netcsd/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "netcsd/errors.hpp"

namespace netcsd {

namespace {

constexpr double kCrossingTol = 1e-8;
constexpr double kBisectionWidth = 1e-10;
constexpr double kRatioEqualTol = 1e-12;

void require_variant(const ModelSpec& spec, ModelVariant v, const char* op) {
    if (spec.variant() != v)
        throw ValidationError(std::string(op) + " requires the " + variant_name(v) + " variant");
}

/// Signed crossing predicate: negative before alpha*, positive after.
double crossing_predicate(const ModelSpec& spec, const CutSet& cutset, double alpha) {
    if (spec.variant() == ModelVariant::CoupledOscillators) {
        const Vec flow = normalized_flow(alpha, spec);
        double worst = -std::numeric_limits<double>::infinity();
        for (int e : cutset.boundary_edges)
            worst = std::max(worst, std::abs(flow[static_cast<std::size_t>(e)]));
        return worst - 1.0;
    }
    const Vec wa = spec.attraction(alpha);
    const Vec& wr = spec.repulsion();
    double worst = -std::numeric_limits<double>::infinity();
    for (int e : cutset.boundary_edges) {
        const auto ue = static_cast<std::size_t>(e);
        worst = std::max(worst, wr[ue] - wa[ue]);
    }
    return worst;
}

std::optional<double> locate_alpha_star(const ModelSpec& spec, const CutSet& cutset,
                                        std::span<const double> grid) {
    double prev_alpha = grid.front();
    const double g_front = crossing_predicate(spec, cutset, prev_alpha);
    if (g_front == 0.0) return prev_alpha;
    if (g_front > 0.0) return std::nullopt;  // already past the crossing when the grid starts
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (crossing_predicate(spec, cutset, grid[i]) >= 0.0)
            return find_alpha_star(spec, {prev_alpha, grid[i]}, cutset);
        prev_alpha = grid[i];
    }
    return std::nullopt;
}

AssumptionReport check_assumption(const ModelSpec& spec, std::span<const double> grid,
                                  const CutSet& cutset) {
    if (grid.empty()) throw ValidationError("assumption check needs a nonempty alpha grid");
    if (!cutset.two_cut) throw ValidationError("the supplied cut set is not a 2-cutset");

    const bool co = spec.variant() == ModelVariant::CoupledOscillators;
    std::vector<bool> on_cut(static_cast<std::size_t>(spec.edge_count()), false);
    for (int e : cutset.boundary_edges) on_cut[static_cast<std::size_t>(e)] = true;

    // Per-edge margin: negative before its own crossing, positive after.
    auto edge_margin = [&](double alpha, Vec& scratch) {
        if (co) {
            scratch = normalized_flow(alpha, spec);
            for (double& f : scratch) f = std::abs(f) - 1.0;
        } else {
            scratch = spec.attraction(alpha);
            const Vec& wr = spec.repulsion();
            for (std::size_t e = 0; e < scratch.size(); ++e) scratch[e] = wr[e] - scratch[e];
        }
    };

    AssumptionReport report;
    report.cutset = cutset;
    report.alpha_star = locate_alpha_star(spec, cutset, grid);
    if (!report.alpha_star.has_value()) {
        report.holds = false;
        return report;
    }
    const double alpha_star = *report.alpha_star;

    Vec margin;
    // Clause 2: every cut edge sits exactly at its threshold at alpha*.
    edge_margin(alpha_star, margin);
    for (int e : cutset.boundary_edges) {
        const double m = margin[static_cast<std::size_t>(e)];
        if (std::abs(m) > kCrossingTol)
            report.violations.push_back({alpha_star, e, m, 2});
    }

    for (double alpha : grid) {
        edge_margin(alpha, margin);
        if (alpha < alpha_star) {
            // Clause 1: strictly inside the threshold everywhere.
            for (std::size_t e = 0; e < margin.size(); ++e)
                if (margin[e] >= 0.0)
                    report.violations.push_back({alpha, static_cast<int>(e), margin[e], 1});
        } else if (alpha > alpha_star) {
            // Clause 3: past the threshold on the cut, inside it elsewhere.
            for (std::size_t e = 0; e < margin.size(); ++e) {
                const bool past = margin[e] > 0.0;
                if (on_cut[e] != past)
                    report.violations.push_back({alpha, static_cast<int>(e), margin[e], 3});
            }
        }
    }

    report.holds = report.violations.empty();
    return report;
}

double bisect(const std::function<double(double)>& g, double lo, double hi) {
    double g_lo = g(lo);
    double g_hi = g(hi);
    if (g_lo == 0.0) return lo;
    if (g_hi == 0.0) return hi;
    if ((g_lo < 0.0) == (g_hi < 0.0))
        throw NoBracket("crossing predicate does not change sign over the bracket");
    while (hi - lo > kBisectionWidth) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = g(mid);
        if (g_mid == 0.0) return mid;
        if ((g_mid < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Vec normalized_flow(double alpha, const ModelSpec& spec) {
    require_variant(spec, ModelVariant::CoupledOscillators, "normalized_flow");
    const Graph weighted = spec.coupling_graph();
    if (!weighted.is_connected()) throw DisconnectedGraph("normalized flow needs a connected graph");
    const Matrix ldag = pseudoinverse(laplacian(weighted));
    const Vec potential = ldag.apply(spec.omega(alpha));
    Vec flow(static_cast<std::size_t>(spec.edge_count()));
    for (int e = 0; e < spec.edge_count(); ++e) {
        const Edge& edge = spec.graph().edge(e);
        flow[static_cast<std::size_t>(e)] = potential[static_cast<std::size_t>(edge.head)] -
                                            potential[static_cast<std::size_t>(edge.tail)];
    }
    return flow;
}

AssumptionReport check_assumption_co(const ModelSpec& spec, std::span<const double> alpha_grid,
                                     const CutSet& cutset) {
    require_variant(spec, ModelVariant::CoupledOscillators, "check_assumption_co");
    return check_assumption(spec, alpha_grid, cutset);
}

AssumptionReport check_assumption_ar(const ModelSpec& spec, std::span<const double> alpha_grid,
                                     const CutSet& cutset) {
    require_variant(spec, ModelVariant::AttractionRepulsion, "check_assumption_ar");
    return check_assumption(spec, alpha_grid, cutset);
}

double find_alpha_star(const ModelSpec& spec, std::pair<double, double> bracket,
                       const CutSet& cutset) {
    if (!(bracket.first < bracket.second))
        throw ValidationError("alpha bracket must satisfy lo < hi");
    return bisect([&](double a) { return crossing_predicate(spec, cutset, a); }, bracket.first,
                  bracket.second);
}

namespace {

struct KuramotoPieces {
    Matrix ldag;
    Vec flow;
};

KuramotoPieces kuramoto_setup(double alpha, const ModelSpec& spec) {
    require_variant(spec, ModelVariant::CoupledOscillators, "kuramoto equilibria");
    if (!spec.graph().is_tree())
        throw CyclicGraph("closed-form equilibria require a connected acyclic graph");
    const Graph weighted = spec.coupling_graph();
    KuramotoPieces pieces{pseudoinverse(laplacian(weighted)), {}};
    const Vec potential = pieces.ldag.apply(spec.omega(alpha));
    pieces.flow.resize(static_cast<std::size_t>(spec.edge_count()));
    for (int e = 0; e < spec.edge_count(); ++e) {
        const Edge& edge = spec.graph().edge(e);
        pieces.flow[static_cast<std::size_t>(e)] =
            potential[static_cast<std::size_t>(edge.head)] -
            potential[static_cast<std::size_t>(edge.tail)];
    }
    if (norm_inf(pieces.flow) >= 1.0)
        throw NoEquilibrium("normalized flow reaches magnitude " +
                            std::to_string(norm_inf(pieces.flow)) +
                            "; no equilibrium manifold exists");
    return pieces;
}

/// L-dagger B A v for a per-edge vector v.
Vec ldag_incidence_apply(const ModelSpec& spec, const Matrix& ldag, const Vec& per_edge) {
    Vec acc(static_cast<std::size_t>(spec.node_count()), 0.0);
    const Vec& a = spec.coupling();
    for (int e = 0; e < spec.edge_count(); ++e) {
        const Edge& edge = spec.graph().edge(e);
        const double val = a[static_cast<std::size_t>(e)] * per_edge[static_cast<std::size_t>(e)];
        acc[static_cast<std::size_t>(edge.head)] += val;
        acc[static_cast<std::size_t>(edge.tail)] -= val;
    }
    return ldag.apply(acc);
}

}  // namespace

Vec kuramoto_stable_equilibrium(double alpha, const ModelSpec& spec) {
    const KuramotoPieces pieces = kuramoto_setup(alpha, spec);
    Vec asin_flow(pieces.flow.size());
    for (std::size_t e = 0; e < pieces.flow.size(); ++e) asin_flow[e] = std::asin(pieces.flow[e]);
    return ldag_incidence_apply(spec, pieces.ldag, asin_flow);
}

EquilibriumResult kuramoto_equilibria(double alpha, const ModelSpec& spec, int critical_edge) {
    if (critical_edge < 0 || critical_edge >= spec.edge_count())
        throw ValidationError("critical edge index out of range");
    const KuramotoPieces pieces = kuramoto_setup(alpha, spec);

    Vec asin_flow(pieces.flow.size());
    for (std::size_t e = 0; e < pieces.flow.size(); ++e) asin_flow[e] = std::asin(pieces.flow[e]);

    EquilibriumResult result;
    result.stable = ldag_incidence_apply(spec, pieces.ldag, asin_flow);

    Vec flipped = asin_flow;
    flipped[static_cast<std::size_t>(critical_edge)] =
        M_PI - asin_flow[static_cast<std::size_t>(critical_edge)];
    result.unstable = ldag_incidence_apply(spec, pieces.ldag, flipped);

    result.field_residual = norm_inf(kuramoto_field(result.stable, alpha, spec));
    Matrix psd = linearized_jacobian(alpha, spec, result.stable);
    psd *= -1.0;
    result.jacobian_spectrum = spectral_decomp(psd);
    return result;
}

Matrix linearized_jacobian(double alpha, const ModelSpec& spec, const Vec& equilibrium) {
    const Vec weights = effective_edge_weights(alpha, spec, equilibrium);
    const auto n = static_cast<std::size_t>(spec.node_count());
    Matrix jac(n, n);
    for (int e = 0; e < spec.edge_count(); ++e) {
        const Edge& edge = spec.graph().edge(e);
        const double w = weights[static_cast<std::size_t>(e)];
        const auto h = static_cast<std::size_t>(edge.head);
        const auto t = static_cast<std::size_t>(edge.tail);
        jac(h, h) -= w;
        jac(t, t) -= w;
        jac(h, t) += w;
        jac(t, h) += w;
    }
    return jac;
}

ReducedSummary reduced_co_summary(double omega_bar, double k) {
    if (!(k > 0.0)) throw ValidationError("coupling k must be strictly positive");
    const double ratio = omega_bar / k;
    ReducedSummary summary;
    if (std::abs(std::abs(ratio) - 1.0) <= kRatioEqualTol) {
        const double phi = std::copysign(M_PI / 2.0, ratio);
        summary.equilibria.push_back({phi, Stability::SemiStable});
        summary.type = BifurcationType::SaddleNode;
        summary.linear_rate = 0.0;
    } else if (std::abs(ratio) < 1.0) {
        const double phi_s = std::asin(ratio);
        summary.equilibria.push_back({phi_s, Stability::Stable});
        summary.equilibria.push_back({M_PI - phi_s, Stability::Unstable});
        summary.type = BifurcationType::None;
        summary.linear_rate = -std::cos(phi_s);
    } else {
        summary.type = BifurcationType::None;  // no equilibria past the fold
    }
    return summary;
}

ReducedSummary reduced_ar_summary(double w_a, double w_r, double c) {
    if (!(w_a > 0.0) || !(w_r > 0.0) || !(c > 0.0))
        throw ValidationError("w_a, w_r and c must be strictly positive");
    const double ratio = w_r / w_a;
    ReducedSummary summary;
    summary.linear_rate = 2.0 * (w_r - w_a);
    summary.invariant_radius = ratio * std::sqrt(c / 2.0) * std::exp(-0.5);
    if (ratio <= 1.0 + kRatioEqualTol) {
        summary.equilibria.push_back({0.0, Stability::Stable});
        summary.type = std::abs(ratio - 1.0) <= kRatioEqualTol ? BifurcationType::Pitchfork
                                                               : BifurcationType::None;
    } else {
        const double phi_e = std::sqrt(c * std::log(ratio));
        summary.equilibria.push_back({0.0, Stability::Unstable});
        summary.equilibria.push_back({-phi_e, Stability::Stable});
        summary.equilibria.push_back({phi_e, Stability::Stable});
        summary.type = BifurcationType::Pitchfork;
    }
    return summary;
}

}  // namespace netcsd
