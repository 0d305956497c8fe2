#include "netcsd/simulation.hpp"

#include <cmath>
#include <cstdlib>

#include "netcsd/bifurcation.hpp"
#include "netcsd/errors.hpp"
#include "netcsd/rng.hpp"

namespace netcsd {

double NoiseRng::next_normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

Vec Trajectory::state_at(std::size_t i) const {
    Vec out(states.cols());
    for (std::size_t j = 0; j < states.cols(); ++j) out[j] = states(i, j);
    return out;
}

Vec Trajectory::component(std::size_t j) const {
    Vec out(states.rows());
    for (std::size_t i = 0; i < states.rows(); ++i) out[i] = states(i, j);
    return out;
}

namespace {

long long step_count(double span, double dt, const char* what) {
    if (!(dt > 0.0)) throw ValidationError("dt must be strictly positive");
    const double raw = span / dt;
    const long long steps = std::llround(raw);
    if (steps < 0 || std::abs(raw - static_cast<double>(steps)) > 1e-6)
        throw ValidationError(std::string(what) + " must be a nonnegative integer multiple of dt");
    return steps;
}

void check_finite(const Vec& x, double t) {
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!std::isfinite(x[j]))
            throw NonFiniteState("state component " + std::to_string(j + 1) +
                                 " became non-finite at t = " + std::to_string(t));
    }
}

Vec rk4_step(const FieldFn& field, const Vec& x, double dt) {
    const Vec k1 = field(x);
    const Vec k2 = field(x + (0.5 * dt) * Vec(k1));
    const Vec k3 = field(x + (0.5 * dt) * Vec(k2));
    const Vec k4 = field(x + dt * Vec(k3));
    Vec next = x;
    for (std::size_t j = 0; j < x.size(); ++j)
        next[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    return next;
}

}  // namespace

Trajectory integrate(const FieldFn& field, const Vec& x0, double horizon, double dt, double t0) {
    const long long steps = step_count(horizon, dt, "horizon");
    Trajectory traj;
    traj.meta.dt = dt;
    traj.times.resize(static_cast<std::size_t>(steps) + 1);
    traj.states = Matrix(static_cast<std::size_t>(steps) + 1, x0.size());

    Vec x = x0;
    check_finite(x, t0);
    for (long long i = 0; i <= steps; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        traj.times[static_cast<std::size_t>(i)] = t;
        for (std::size_t j = 0; j < x.size(); ++j)
            traj.states(static_cast<std::size_t>(i), j) = x[j];
        if (i < steps) {
            x = rk4_step(field, x, dt);
            check_finite(x, t + dt);
        }
    }
    return traj;
}

Vec stable_equilibrium(const ModelSpec& spec, double alpha, double dt) {
    if (spec.variant() == ModelVariant::AttractionRepulsion)
        return Vec(static_cast<std::size_t>(spec.node_count()), 0.0);
    if (spec.graph().is_tree()) return kuramoto_stable_equilibrium(alpha, spec);
    // No closed form on cyclic graphs; relax from zero for 20 time units.
    FieldFn field = [&](const Vec& x) { return model_field(x, alpha, spec); };
    Trajectory relax = integrate(field, Vec(static_cast<std::size_t>(spec.node_count()), 0.0),
                                 20.0, dt);
    return relax.state_at(relax.sample_count() - 1);
}

Trajectory run_perturbation_experiment(const FieldFn& field, const Vec& equilibrium,
                                       const PerturbationSpec& pert, double dt, double horizon) {
    if (pert.signal.size() != equilibrium.size())
        throw ValidationError("perturbation signal length does not match state dimension");
    if (!(0.0 <= pert.t_on && pert.t_on < pert.t_off && pert.t_off <= horizon))
        throw ValidationError("perturbation window must satisfy 0 <= t_on < t_off <= horizon");

    FieldFn forced = [&](const Vec& x) {
        Vec f = field(x);
        for (std::size_t j = 0; j < f.size(); ++j) f[j] += pert.signal[j];
        return f;
    };

    // Piecewise integration keeps the window edges on exact grid points.
    Trajectory quiet = integrate(field, equilibrium, pert.t_on, dt);
    Trajectory pushed = integrate(forced, quiet.state_at(quiet.sample_count() - 1),
                                  pert.t_off - pert.t_on, dt, pert.t_on);
    Trajectory decay = integrate(field, pushed.state_at(pushed.sample_count() - 1),
                                 horizon - pert.t_off, dt, pert.t_off);

    Trajectory traj;
    traj.meta.dt = dt;
    const std::size_t total =
        quiet.sample_count() + pushed.sample_count() + decay.sample_count() - 2;
    traj.times.resize(total);
    traj.states = Matrix(total, equilibrium.size());
    std::size_t row = 0;
    auto append = [&](const Trajectory& part, std::size_t from) {
        for (std::size_t i = from; i < part.sample_count(); ++i, ++row) {
            traj.times[row] = part.times[i];
            for (std::size_t j = 0; j < equilibrium.size(); ++j)
                traj.states(row, j) = part.states(i, j);
        }
    };
    append(quiet, 0);
    append(pushed, 1);
    append(decay, 1);
    return traj;
}

Trajectory run_perturbation_experiment(const ModelSpec& spec, double alpha,
                                       const PerturbationSpec& pert, double dt, double horizon) {
    FieldFn field = [&](const Vec& x) { return model_field(x, alpha, spec); };
    Trajectory traj =
        run_perturbation_experiment(field, stable_equilibrium(spec, alpha, dt), pert, dt, horizon);
    traj.alpha = alpha;
    traj.meta.variant = variant_name(spec.variant());
    return traj;
}

Trajectory run_noise_experiment(const FieldFn& field, const Vec& equilibrium,
                                const NoiseSpec& noise, double dt) {
    if (noise.sigma < 0.0) throw ValidationError("noise sigma must be nonnegative");
    const long long steps_per_injection = step_count(noise.delta_t, dt, "delta_t");
    if (steps_per_injection < 1)
        throw ValidationError("delta_t must be at least one integrator step");
    const long long injections = step_count(noise.horizon, noise.delta_t, "horizon");

    Trajectory traj;
    traj.meta.dt = dt;
    traj.meta.seed = noise.seed;
    traj.times.resize(static_cast<std::size_t>(injections) + 1);
    traj.states = Matrix(static_cast<std::size_t>(injections) + 1, equilibrium.size());

    NoiseRng rng(noise.seed);
    Vec x = equilibrium;
    for (long long k = 0; k <= injections; ++k) {
        const double t = static_cast<double>(k) * noise.delta_t;
        traj.times[static_cast<std::size_t>(k)] = t;
        for (std::size_t j = 0; j < x.size(); ++j)
            traj.states(static_cast<std::size_t>(k), j) = x[j];
        if (k == injections) break;
        for (long long s = 0; s < steps_per_injection; ++s) x = rk4_step(field, x, dt);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += noise.sigma * rng.next_normal();
        check_finite(x, t + noise.delta_t);
    }
    return traj;
}

Trajectory run_noise_experiment(const ModelSpec& spec, double alpha, const NoiseSpec& noise,
                                double dt) {
    FieldFn field = [&](const Vec& x) { return model_field(x, alpha, spec); };
    Trajectory traj = run_noise_experiment(field, stable_equilibrium(spec, alpha, dt), noise, dt);
    traj.alpha = alpha;
    traj.meta.variant = variant_name(spec.variant());
    return traj;
}

Vec closed_form_perturbation(const Vec& eps0, const SpectralDecomposition& spectrum, double t) {
    if (eps0.size() != spectrum.eigenvalues.size())
        throw ValidationError("eps0 length does not match the spectral dimension");
    Vec out(eps0.size(), 0.0);
    for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
        double projection = 0.0;
        for (std::size_t r = 0; r < eps0.size(); ++r)
            projection += spectrum.eigenvectors(r, i) * eps0[r];
        const double amp = std::exp(-spectrum.eigenvalues[i] * t) * projection;
        for (std::size_t r = 0; r < eps0.size(); ++r)
            out[r] += amp * spectrum.eigenvectors(r, i);
    }
    return out;
}

Trajectory decay_segment(const Trajectory& traj, double t_from, const Vec& equilibrium) {
    if (equilibrium.size() != traj.states.cols())
        throw ValidationError("equilibrium length does not match trajectory dimension");
    std::size_t start = traj.sample_count();
    for (std::size_t i = 0; i < traj.sample_count(); ++i) {
        if (traj.times[i] >= t_from - 1e-12) {
            start = i;
            break;
        }
    }
    if (start == traj.sample_count())
        throw InsufficientHorizon("trajectory ends before t = " + std::to_string(t_from));

    Trajectory out;
    out.alpha = traj.alpha;
    out.meta = traj.meta;
    const std::size_t count = traj.sample_count() - start;
    out.times.resize(count);
    out.states = Matrix(count, traj.states.cols());
    const double t0 = traj.times[start];
    for (std::size_t i = 0; i < count; ++i) {
        out.times[i] = traj.times[start + i] - t0;
        for (std::size_t j = 0; j < traj.states.cols(); ++j)
            out.states(i, j) = traj.states(start + i, j) - equilibrium[j];
    }
    return out;
}

}  // namespace netcsd
