#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "netcsd/graph.hpp"
#include "netcsd/models.hpp"

namespace netcsd {

struct TrajectoryMeta {
    double dt = 0.0;
    std::string variant;
    std::optional<std::uint64_t> seed;
};

/// Uniformly sampled state history: row i of states is the state at times[i].
struct Trajectory {
    Vec times;
    Matrix states;
    double alpha = 0.0;
    TrajectoryMeta meta;

    std::size_t sample_count() const { return times.size(); }
    Vec state_at(std::size_t i) const;
    Vec component(std::size_t j) const;
};

struct PerturbationSpec {
    Vec signal;    // exogenous amplitude per node
    double t_on;   // seconds
    double t_off;  // seconds
};

struct NoiseSpec {
    double sigma = 0.0;      // per-component standard deviation
    double delta_t = 1.0;    // injection period, an integer multiple of dt
    std::uint64_t seed = 0;
    double horizon = 0.0;    // total simulated time
};

using FieldFn = std::function<Vec(const Vec&)>;

/// Classical fixed-step RK4.
Trajectory integrate(const FieldFn& field, const Vec& x0, double horizon, double dt,
                     double t0 = 0.0);

/// Analytic stable equilibrium where available (oscillators on trees,
/// attraction-repulsion consensus at the origin); otherwise a 20-time-unit
/// relaxation burn-in from the zero state.
Vec stable_equilibrium(const ModelSpec& spec, double alpha, double dt = 1e-3);

Trajectory run_perturbation_experiment(const ModelSpec& spec, double alpha,
                                       const PerturbationSpec& pert, double dt, double horizon);
Trajectory run_perturbation_experiment(const FieldFn& field, const Vec& equilibrium,
                                       const PerturbationSpec& pert, double dt, double horizon);

Trajectory run_noise_experiment(const ModelSpec& spec, double alpha, const NoiseSpec& noise,
                                double dt);
/// Generic form; records the state at injection instants only.
Trajectory run_noise_experiment(const FieldFn& field, const Vec& equilibrium,
                                const NoiseSpec& noise, double dt);

/// Spectral solution sum_i e^{-lambda_i t} v_i v_i^T eps0 of the linear
/// perturbation dynamics; spectrum comes from the negated Jacobian.
Vec closed_form_perturbation(const Vec& eps0, const SpectralDecomposition& spectrum, double t);

/// Slice of a trajectory from t_from onward, re-based so times start at zero
/// and states are offsets from the given equilibrium.
Trajectory decay_segment(const Trajectory& traj, double t_from, const Vec& equilibrium);

}  // namespace netcsd
