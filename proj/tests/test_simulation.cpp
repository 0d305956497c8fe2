#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "netcsd/bifurcation.hpp"
#include "netcsd/errors.hpp"
#include "netcsd/rng.hpp"
#include "netcsd/simulation.hpp"
#include "test_support.hpp"

using namespace netcsd;
using namespace netcsd::testing;

namespace {

double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = f(mid);
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ModelSpec uniform_ar(Graph g, double w_a, double w_r, double c) {
    const auto m = static_cast<std::size_t>(g.edge_count());
    return ModelSpec::attraction_repulsion(std::move(g), ParamSchedule{Vec(m, w_a), Vec(m, 0.0)},
                                           Vec(m, w_r), c);
}

}  // namespace

TEST_CASE("rk4 integrates the scalar exponential") {
    FieldFn decay = [](const Vec& x) { return Vec{-x[0]}; };
    const Trajectory traj = integrate(decay, {1.0}, 1.0, 1e-3);
    CHECK(traj.sample_count() == 1001);
    CHECK(traj.times.back() == doctest::Approx(1.0));
    CHECK(std::abs(traj.states(1000, 0) - std::exp(-1.0)) <= 1e-8);

    // Halving the step shrinks the error roughly sixteenfold.
    auto err_at = [&](double dt) {
        const Trajectory t = integrate(decay, {1.0}, 1.0, dt);
        return std::abs(t.states(t.sample_count() - 1, 0) - std::exp(-1.0));
    };
    const double ratio = err_at(0.1) / err_at(0.05);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("rk4 error paths") {
    FieldFn blowup = [](const Vec& x) { return Vec{x[0] * x[0]}; };
    CHECK_THROWS_AS(integrate(blowup, {1.0}, 2.0, 1e-3), NonFiniteState);
    CHECK_THROWS_AS(integrate([](const Vec& x) { return x; }, {1.0}, 1.0, 0.0), ValidationError);
}

TEST_CASE("reduced oscillator relaxes to the bisection root") {
    const double k = 2.0;
    const double omega_bar = 1.0;  // ratio 0.5
    FieldFn field = [&](const Vec& x) { return Vec{reduced_kuramoto_field(x[0], omega_bar, k)}; };
    const Trajectory traj = integrate(field, {0.0}, 30.0, 1e-3);

    const double root = bisect_root(
        [&](double phi) { return reduced_kuramoto_field(phi, omega_bar, k); }, -M_PI / 2.0,
        M_PI / 2.0);
    CHECK(std::abs(traj.states(traj.sample_count() - 1, 0) - root) <= 1e-6);
    CHECK(root == doctest::Approx(std::asin(0.5)));
}

TEST_CASE("consensus initial states are preserved") {
    Graph p3(3, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}});
    const ModelSpec ar = uniform_ar(p3, 2.0, 1.0, 1.0);
    FieldFn field = [&](const Vec& x) { return attraction_repulsion_field(x, 0.0, ar); };
    const Trajectory traj = integrate(field, Vec(3, 1.7), 5.0, 1e-2);
    for (std::size_t i = 0; i < traj.sample_count(); ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(traj.states(i, j) == 1.7);
}

TEST_CASE("perturbation experiment windows") {
    // A zero-amplitude signal leaves the equilibrium untouched.
    Graph p3(3, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}});
    const ModelSpec ar = uniform_ar(p3, 2.0, 1.0, 1.0);
    const PerturbationSpec quiet{Vec(3, 0.0), 1.0, 2.0};
    const Trajectory still = run_perturbation_experiment(ar, 0.0, quiet, 1e-2, 4.0);
    for (std::size_t i = 0; i < still.sample_count(); ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(still.states(i, j)) <= 1e-12);

    // Time stamps form one uniform grid across the three segments.
    for (std::size_t i = 1; i < still.sample_count(); ++i)
        CHECK(still.times[i] - still.times[i - 1] == doctest::Approx(1e-2).epsilon(1e-9));

    // A real push moves the state during the window and decays afterwards.
    const PerturbationSpec push{{0.5, 0.0, 0.0}, 1.0, 2.0};
    const Trajectory traj = run_perturbation_experiment(ar, 0.0, push, 1e-2, 20.0);
    const Trajectory eps = decay_segment(traj, 2.0, stable_equilibrium(ar, 0.0));
    CHECK(eps.times[0] == doctest::Approx(0.0));
    CHECK(norm2(eps.state_at(0)) > 0.1);
    // The decay limit is the consensus component of the offset.
    const Vec last = eps.state_at(eps.sample_count() - 1);
    const double consensus = mean(eps.state_at(0));
    for (double x : last) CHECK(std::abs(x - consensus) <= 1e-6);

    CHECK_THROWS_AS(run_perturbation_experiment(ar, 0.0, PerturbationSpec{Vec(3, 0.1), 3.0, 2.0},
                                                1e-2, 4.0),
                    ValidationError);
    CHECK_THROWS_AS(decay_segment(traj, 30.0, Vec(3, 0.0)), InsufficientHorizon);
}

TEST_CASE("reduced oscillator recovery slows near the fold") {
    const double k = 2.0;
    auto recovery_time = [&](double ratio) {
        const double omega_bar = ratio * k;
        FieldFn field = [&](const Vec& x) {
            return Vec{reduced_kuramoto_field(x[0], omega_bar, k)};
        };
        const Vec eq{std::asin(ratio)};
        const PerturbationSpec pert{{0.4}, 6.0, 8.0};
        const Trajectory traj = run_perturbation_experiment(field, eq, pert, 1e-3, 40.0);
        for (std::size_t i = 0; i < traj.sample_count(); ++i) {
            if (traj.times[i] < 8.0) continue;
            if (std::abs(traj.states(i, 0) - eq[0]) <= 1e-2) return traj.times[i] - 8.0;
        }
        return -1.0;
    };
    const double fast = recovery_time(0.2);
    const double slow = recovery_time(0.8);
    CHECK(fast > 0.0);
    CHECK(slow > fast);

    // At the fold the perturbation never re-enters the band.
    FieldFn at_fold = [&](const Vec& x) { return Vec{reduced_kuramoto_field(x[0], k, k)}; };
    const Trajectory traj =
        run_perturbation_experiment(at_fold, {M_PI / 2.0}, PerturbationSpec{{0.4}, 6.0, 8.0},
                                    1e-3, 58.0);
    for (std::size_t i = 0; i < traj.sample_count(); ++i) {
        if (traj.times[i] < 8.0) continue;
        CHECK(std::abs(traj.states(i, 0) - M_PI / 2.0) > 1e-2);
    }
}

TEST_CASE("noise experiment determinism and the zero-noise case") {
    Graph p3(3, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}});
    const ModelSpec ar = uniform_ar(p3, 2.0, 1.0, 1.0);

    const NoiseSpec silent{0.0, 1.0, 7, 50.0};
    const Trajectory still = run_noise_experiment(ar, 0.0, silent, 1e-2);
    CHECK(still.sample_count() == 51);
    for (std::size_t i = 0; i < still.sample_count(); ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(still.states(i, j) == 0.0);

    const NoiseSpec noisy{0.3, 1.0, 12345, 200.0};
    const Trajectory a = run_noise_experiment(ar, 0.0, noisy, 1e-2);
    const Trajectory b = run_noise_experiment(ar, 0.0, noisy, 1e-2);
    REQUIRE(a.sample_count() == b.sample_count());
    for (std::size_t i = 0; i < a.sample_count(); ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(a.states(i, j) == b.states(i, j));

    NoiseSpec other = noisy;
    other.seed = 54321;
    const Trajectory c = run_noise_experiment(ar, 0.0, other, 1e-2);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.sample_count(); ++i)
        for (std::size_t j = 0; j < 3; ++j) diff += std::abs(a.states(i, j) - c.states(i, j));
    CHECK(diff > 0.0);

    CHECK_THROWS_AS(run_noise_experiment(ar, 0.0, NoiseSpec{0.1, 0.0135, 1, 10.0}, 1e-2),
                    ValidationError);  // delta_t not a multiple of dt
}

TEST_CASE("seeded normals have the right first moments") {
    NoiseRng rng(99);
    const int count = 200000;
    double sum = 0.0;
    double sumsq = 0.0;
    for (int i = 0; i < count; ++i) {
        const double z = rng.next_normal();
        sum += z;
        sumsq += z * z;
    }
    const double mean_hat = sum / count;
    const double var_hat = sumsq / count - mean_hat * mean_hat;
    CHECK(std::abs(mean_hat) <= 0.01);
    CHECK(std::abs(var_hat - 1.0) <= 0.02);
}

TEST_CASE("closed-form perturbation matches the integrator") {
    Rng rng(41);
    const Graph g = random_connected_graph(5, 2, rng);
    const Matrix lap = laplacian(g);
    const SpectralDecomposition d = spectral_decomp(lap);
    const Vec eps0 = random_vec(5, rng, -1.0, 1.0);

    // t = 0 reproduces the initial condition (eigenbasis completeness).
    CHECK(max_abs_diff(closed_form_perturbation(eps0, d, 0.0), eps0) <= 1e-12);

    // Large t leaves only the consensus average.
    const Vec late = closed_form_perturbation(eps0, d, 200.0);
    const double avg = mean(eps0);
    for (double x : late) CHECK(std::abs(x - avg) <= 1e-10);

    // Against RK4 on the linear field over [0, 10].
    FieldFn field = [&](const Vec& x) {
        Vec out = lap.apply(x);
        for (double& v : out) v = -v;
        return out;
    };
    const Trajectory traj = integrate(field, eps0, 10.0, 1e-3);
    for (std::size_t i = 0; i < traj.sample_count(); i += 500) {
        const Vec expected = closed_form_perturbation(eps0, d, traj.times[i]);
        CHECK(max_abs_diff(traj.state_at(i), expected) <= 1e-6);
    }
}

TEST_CASE("small perturbations decay like the linearization") {
    // Oscillator tree near (but not at) the crossing; a small offset decays
    // within 1% of the closed-form linear solution.
    Graph tree(4, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}, Edge{2, 3, 1.0}});
    Vec direction(4, 0.0);
    direction[1] = 1.0;
    direction[2] = -1.0;  // unit flow on the middle edge
    const ModelSpec spec = ModelSpec::coupled_oscillators(
        tree, Vec(3, 1.0), ParamSchedule{Vec(4, 0.0), direction});
    const double alpha = 0.8;

    const Vec theta_bar = kuramoto_stable_equilibrium(alpha, spec);
    Matrix psd = linearized_jacobian(alpha, spec, theta_bar);
    psd *= -1.0;
    const SpectralDecomposition d = spectral_decomp(psd);

    Rng rng(42);
    const double scale = 1e-3;
    Vec eps0 = random_vec(4, rng, -scale, scale);
    Vec x0 = theta_bar;
    for (std::size_t j = 0; j < 4; ++j) x0[j] += eps0[j];

    FieldFn field = [&](const Vec& x) { return kuramoto_field(x, alpha, spec); };
    const Trajectory traj = integrate(field, x0, 8.0, 1e-3);
    for (std::size_t i = 0; i < traj.sample_count(); i += 400) {
        const Vec eps_num = traj.state_at(i) - theta_bar;
        const Vec eps_lin = closed_form_perturbation(eps0, d, traj.times[i]);
        CHECK(max_abs_diff(eps_num, eps_lin) <= 0.01 * norm2(eps0));
    }
}

TEST_CASE("stable equilibrium helper covers both variants") {
    Graph p3(3, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}});
    const ModelSpec ar = uniform_ar(p3, 2.0, 1.0, 1.0);
    CHECK(norm_inf(stable_equilibrium(ar, 0.3)) == 0.0);

    Vec direction(3, 0.0);
    direction[0] = 0.5;
    direction[1] = -0.5;
    const ModelSpec co = ModelSpec::coupled_oscillators(
        p3, Vec(2, 1.0), ParamSchedule{Vec(3, 0.0), direction});
    const Vec theta = stable_equilibrium(co, 1.0);
    CHECK(norm_inf(kuramoto_field(theta, 1.0, co)) <= 1e-10);

    // Cyclic oscillator graphs fall back to relaxation.
    Graph k3(3, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}, Edge{0, 2, 1.0}});
    const ModelSpec cyc = ModelSpec::coupled_oscillators(
        k3, Vec(3, 1.0), ParamSchedule{{0.1, -0.1, 0.0}, Vec(3, 0.0)});
    const Vec relaxed = stable_equilibrium(cyc, 0.0, 1e-2);
    CHECK(norm_inf(kuramoto_field(relaxed, 0.0, cyc)) <= 1e-6);
}
