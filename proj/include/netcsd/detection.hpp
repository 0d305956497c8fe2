#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "netcsd/graph.hpp"
#include "netcsd/models.hpp"
#include "netcsd/simulation.hpp"

namespace netcsd {

struct DetectionConfig {
    double zeta = 0.1;                     // detection time-scale, in (0, 1)
    double delta = 1e-3;                   // residual 2-norm threshold
    std::optional<double> sign_tol;        // default: 1e-2 * ||r||_inf at read time
    std::optional<double> lambda3_lb;      // lambda_3 of the lower-bound graph
    bool windowed_norm = false;            // average the residual over a window
    double window_seconds = 1.0;           // window length when windowed_norm is set
};

struct DetectionReport {
    bool bifurcating = false;
    double t_star = 0.0;
    double read_time = 0.0;
    std::size_t read_index = 0;
    double residual_norm_at_read = 0.0;
    double sign_tol_used = 0.0;
    std::optional<std::vector<int>> S;               // 0-based nodes
    std::optional<std::vector<int>> boundary_edges;  // edge indices
    std::vector<int> undetermined_nodes;
    DetectionConfig config;
};

struct CovarianceReport {
    std::vector<std::pair<double, double>> empirical_trace_series;  // (t, trace)
    std::vector<Vec> per_node_variance_series;  // growing-window variance per node
    std::optional<double> theoretical_trace;  // nullopt encodes +infinity
    bool theoretical_trace_infinite = false;
    Vec gamma_hat;            // per-node lag-1 autocorrelation
    Vec per_node_variance;    // variance of consensus-removed deviations
    std::vector<bool> alarms;
    double final_trace = 0.0;
};

/// r(t) = eps(t) - mean(eps(0)) * 1, per sample.
std::vector<std::pair<double, Vec>> residual_series(const Trajectory& eps_traj, const Vec& eps0);

/// Residual detection and cut localization on a perturbation-decay segment.
DetectionReport detect_and_localize(const Trajectory& eps_traj, const Vec& eps0,
                                    const DetectionConfig& cfg, const Graph& graph);

struct MovingStats {
    Vec index;     // last sample index of each window
    Vec mean;
    Vec variance;  // unbiased
};

MovingStats moving_statistics(std::span<const double> series, std::size_t window);

/// Least-squares slope of e_{t+1} on e_t after mean removal.
double ar1_autocorrelation(std::span<const double> series);

/// Gamma = exp(J dt) via the Jacobian's spectral decomposition, and its
/// consensus-orthogonal compression Gamma_bar = Q Gamma Q^T.
std::pair<Matrix, Matrix> gamma_matrices(double alpha, const ModelSpec& spec, double delta_t);

/// Sum of sigma^2 / (1 - mu_i^2) over Gamma_bar's eigenvalues; nullopt when
/// any |mu_i| reaches 1 (the divergent regime).
std::optional<double> theoretical_covariance_trace(const Matrix& gamma_bar, double sigma);

struct AlarmConfig {
    std::size_t window = 0;  // 0 selects max(10, samples/10)
    double kappa = 10.0;     // sliding/baseline variance ratio that trips an alarm
};

CovarianceReport empirical_covariance_trace(const Trajectory& traj, const Vec& equilibrium,
                                            const Matrix& q, const AlarmConfig& alarm = {});

}  // namespace netcsd
