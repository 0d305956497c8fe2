#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "netcsd/graph.hpp"
#include "netcsd/models.hpp"

namespace netcsd {

struct AssumptionViolation {
    double alpha;
    int edge;      // -1 when no specific edge applies
    double value;  // offending flow magnitude or attraction gap
    int clause;    // 1, 2 or 3
};

struct AssumptionReport {
    bool holds = false;
    std::optional<CutSet> cutset;
    std::optional<double> alpha_star;
    std::vector<AssumptionViolation> violations;
};

struct EquilibriumResult {
    Vec stable;
    std::optional<Vec> unstable;
    double field_residual = 0.0;
    /// Decomposition of -df/dx at the stable equilibrium (PSD Laplacian).
    SpectralDecomposition jacobian_spectrum;
};

/// B^T L-dagger omega(alpha) on the coupling-weighted graph; the per-edge
/// normalized flow whose saturation at magnitude 1 marks the bifurcation.
Vec normalized_flow(double alpha, const ModelSpec& spec);

AssumptionReport check_assumption_co(const ModelSpec& spec, std::span<const double> alpha_grid,
                                     const CutSet& cutset);
AssumptionReport check_assumption_ar(const ModelSpec& spec, std::span<const double> alpha_grid,
                                     const CutSet& cutset);

/// Bisection on the cut-edge crossing predicate; bracket width shrinks to
/// 1e-10 and the midpoint is returned.
double find_alpha_star(const ModelSpec& spec, std::pair<double, double> bracket,
                       const CutSet& cutset);

/// Stable branch only; valid on connected acyclic graphs with flow < 1.
Vec kuramoto_stable_equilibrium(double alpha, const ModelSpec& spec);

/// Stable and unstable closed-form equilibria plus the Jacobian spectrum.
EquilibriumResult kuramoto_equilibria(double alpha, const ModelSpec& spec, int critical_edge);

/// -B diag(effective weights) B^T at the given equilibrium.
Matrix linearized_jacobian(double alpha, const ModelSpec& spec, const Vec& equilibrium);

enum class BifurcationType { SaddleNode, Pitchfork, None };
enum class Stability { Stable, Unstable, SemiStable };

struct ReducedEquilibrium {
    double value;
    Stability stability;
};

struct ReducedSummary {
    std::vector<ReducedEquilibrium> equilibria;
    BifurcationType type = BifurcationType::None;
    std::optional<double> linear_rate;
    std::optional<double> invariant_radius;
};

ReducedSummary reduced_co_summary(double omega_bar, double k);
ReducedSummary reduced_ar_summary(double w_a, double w_r, double c);

}  // namespace netcsd
