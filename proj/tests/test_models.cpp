#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "netcsd/errors.hpp"
#include "netcsd/models.hpp"
#include "test_support.hpp"

using namespace netcsd;
using namespace netcsd::testing;

namespace {

ModelSpec co_spec(Graph g, Vec coupling, Vec omega_base, Vec omega_dir) {
    return ModelSpec::coupled_oscillators(std::move(g), std::move(coupling),
                                          ParamSchedule{std::move(omega_base), std::move(omega_dir)});
}

ModelSpec random_co(Rng& rng, int n) {
    Graph g = random_connected_graph(n, 2, rng);
    Vec coupling = random_vec(static_cast<std::size_t>(g.edge_count()), rng, 0.5, 2.0);
    Vec base = random_vec(static_cast<std::size_t>(n), rng, -1.0, 1.0);
    Vec dir = random_vec(static_cast<std::size_t>(n), rng, -1.0, 1.0);
    return co_spec(std::move(g), std::move(coupling), std::move(base), std::move(dir));
}

ModelSpec random_ar(Rng& rng, int n) {
    Graph g = random_connected_graph(n, 2, rng);
    const auto m = static_cast<std::size_t>(g.edge_count());
    ParamSchedule attraction{random_vec(m, rng, 1.5, 3.0), random_vec(m, rng, -0.2, 0.2)};
    Vec repulsion = random_vec(m, rng, 0.5, 1.0);
    return ModelSpec::attraction_repulsion(std::move(g), std::move(attraction),
                                           std::move(repulsion), uniform(rng, 0.5, 2.0));
}

/// Per-node neighbor-sum oracle, independent of the edge-accumulation path.
Vec kuramoto_node_oracle(const Vec& theta, double alpha, const ModelSpec& spec) {
    Vec field = spec.omega(alpha);
    for (int i = 0; i < spec.node_count(); ++i) {
        for (int e = 0; e < spec.edge_count(); ++e) {
            const Edge& edge = spec.graph().edge(e);
            int j = -1;
            if (edge.head == i) j = edge.tail;
            if (edge.tail == i) j = edge.head;
            if (j < 0) continue;
            field[static_cast<std::size_t>(i)] -=
                spec.coupling()[static_cast<std::size_t>(e)] *
                std::sin(theta[static_cast<std::size_t>(i)] - theta[static_cast<std::size_t>(j)]);
        }
    }
    return field;
}

Vec ar_node_oracle(const Vec& x, double alpha, const ModelSpec& spec) {
    const Vec wa = spec.attraction(alpha);
    Vec field(x.size(), 0.0);
    for (int i = 0; i < spec.node_count(); ++i) {
        for (int e = 0; e < spec.edge_count(); ++e) {
            const Edge& edge = spec.graph().edge(e);
            int j = -1;
            if (edge.head == i) j = edge.tail;
            if (edge.tail == i) j = edge.head;
            if (j < 0) continue;
            const double diff =
                x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
            field[static_cast<std::size_t>(i)] -=
                diff * (wa[static_cast<std::size_t>(e)] -
                        spec.repulsion()[static_cast<std::size_t>(e)] *
                            std::exp(-diff * diff / spec.range_c()));
        }
    }
    return field;
}

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

}  // namespace

TEST_CASE("kuramoto field matches the per-node oracle") {
    Rng rng(21);
    for (int trial = 0; trial < 120; ++trial) {
        const ModelSpec spec = random_co(rng, uniform_int(rng, 2, 9));
        const Vec theta = random_vec(static_cast<std::size_t>(spec.node_count()), rng, -3.0, 3.0);
        const double alpha = uniform(rng, 0.0, 2.0);
        CHECK(max_abs_diff(kuramoto_field(theta, alpha, spec),
                           kuramoto_node_oracle(theta, alpha, spec)) <= 1e-12);
    }
}

TEST_CASE("kuramoto field special values") {
    // Homogeneous consensus is a fixed point.
    const ModelSpec spec =
        co_spec(Graph(3, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}}), {1.0, 1.0}, Vec(3, 0.0), Vec(3, 0.0));
    CHECK(norm_inf(kuramoto_field(Vec(3, 0.0), 1.0, spec)) == 0.0);

    // Two nodes: the difference dynamics reduce to omega_bar - 2 k sin(phi).
    const double k = 2.0;
    const ModelSpec pair = co_spec(Graph(2, {Edge{0, 1, k}}), {k}, {0.7, -0.3}, {0.0, 0.0});
    const Vec theta{0.4, -0.1};
    const Vec f = kuramoto_field(theta, 0.0, pair);
    const double phi = theta[0] - theta[1];
    CHECK(f[0] - f[1] == doctest::Approx((0.7 - (-0.3)) - 2.0 * k * std::sin(phi)).epsilon(1e-12));

    // Shifting the state along consensus leaves the field unchanged.
    Rng rng(22);
    for (int trial = 0; trial < 40; ++trial) {
        const ModelSpec s = random_co(rng, uniform_int(rng, 2, 7));
        const Vec theta_r = random_vec(static_cast<std::size_t>(s.node_count()), rng, -2.0, 2.0);
        const double shift = uniform(rng, -5.0, 5.0);
        Vec shifted = theta_r;
        for (double& x : shifted) x += shift;
        CHECK(max_abs_diff(kuramoto_field(theta_r, 0.7, s), kuramoto_field(shifted, 0.7, s)) <=
              1e-12);
    }
}

TEST_CASE("attraction-repulsion field matches the per-node oracle") {
    Rng rng(23);
    for (int trial = 0; trial < 120; ++trial) {
        const ModelSpec spec = random_ar(rng, uniform_int(rng, 2, 9));
        const Vec x = random_vec(static_cast<std::size_t>(spec.node_count()), rng, -3.0, 3.0);
        const double alpha = uniform(rng, 0.0, 2.0);
        CHECK(max_abs_diff(attraction_repulsion_field(x, alpha, spec),
                           ar_node_oracle(x, alpha, spec)) <= 1e-12);
    }
}

TEST_CASE("attraction-repulsion field invariants") {
    Rng rng(24);
    for (int trial = 0; trial < 60; ++trial) {
        const ModelSpec spec = random_ar(rng, uniform_int(rng, 2, 8));
        const auto n = static_cast<std::size_t>(spec.node_count());

        // Consensus states are fixed points.
        const Vec consensus(n, uniform(rng, -4.0, 4.0));
        CHECK(norm_inf(attraction_repulsion_field(consensus, 0.5, spec)) == 0.0);

        // The field sums to zero: the state mean is conserved.
        const Vec x = random_vec(n, rng, -3.0, 3.0);
        const Vec f = attraction_repulsion_field(x, 0.5, spec);
        double total = 0.0;
        for (double v : f) total += v;
        CHECK(std::abs(total) <= 1e-12);
    }

    // Two agents: difference dynamics match the scalar reduction.
    const ModelSpec pair = ModelSpec::attraction_repulsion(
        Graph(2, {Edge{0, 1, 1.0}}), ParamSchedule{{1.5}, {0.0}}, {0.8}, 1.3);
    const Vec x{0.9, -0.2};
    const Vec f = attraction_repulsion_field(x, 0.0, pair);
    CHECK(f[0] - f[1] == doctest::Approx(reduced_ar_field(x[0] - x[1], 1.5, 0.8, 1.3)));
}

TEST_CASE("reduced kuramoto field") {
    // Stable root of the reduction.
    CHECK(reduced_kuramoto_field(std::asin(0.5), 1.0, 2.0) == doctest::Approx(0.0));

    // Past the fold the field stays at or above k - |omega's margin|.
    for (double phi : {-3.0, -1.0, 0.0, 0.5, 1.5708, 2.5}) {
        CHECK(reduced_kuramoto_field(phi, 4.0, 2.0) >= 2.0);
    }

    // At the fold: zero value and zero slope at pi/2 (finite differences).
    CHECK(reduced_kuramoto_field(M_PI / 2.0, 2.0, 2.0) == doctest::Approx(0.0));
    const double h = 1e-6;
    const double slope = (reduced_kuramoto_field(M_PI / 2.0 + h, 2.0, 2.0) -
                          reduced_kuramoto_field(M_PI / 2.0 - h, 2.0, 2.0)) /
                         (2.0 * h);
    CHECK(std::abs(slope) <= 1e-5);

    CHECK_THROWS_AS(reduced_kuramoto_field(0.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("reduced attraction-repulsion field") {
    CHECK(reduced_ar_field(0.0, 1.0, 3.0, 1.0) == 0.0);

    // Bisection oracle for the emerged equilibria at w_r/w_a = 3, c = 1.
    auto f = [](double phi) { return reduced_ar_field(phi, 1.0, 3.0, 1.0); };
    const double root = bisect_root(f, 0.5, 2.0);
    CHECK(root == doctest::Approx(std::sqrt(std::log(3.0))).epsilon(1e-10));
    CHECK(std::sqrt(std::log(3.0)) == doctest::Approx(1.0481).epsilon(1e-4));
    CHECK(f(-root) == doctest::Approx(0.0).epsilon(1e-12));

    // w_r <= w_a: the origin is the only zero (field is strictly
    // sign-definite away from it).
    for (double phi : {-2.0, -0.5, 0.3, 1.0, 4.0}) {
        const double v = reduced_ar_field(phi, 1.0, 0.8, 1.0);
        CHECK(v * phi < 0.0);
    }
}

TEST_CASE("effective edge weights") {
    // Zero frequencies: weights equal the couplings exactly.
    const ModelSpec spec = co_spec(Graph(3, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}}), {1.3, 0.7},
                                   Vec(3, 0.0), Vec(3, 0.0));
    const Vec w = effective_edge_weights(0.0, spec, Vec(3, 0.0));
    CHECK(w[0] == doctest::Approx(1.3));
    CHECK(w[1] == doctest::Approx(0.7));

    // Attraction-repulsion at consensus: w_a - w_r per edge.
    const ModelSpec ar = ModelSpec::attraction_repulsion(
        Graph(3, {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}}), ParamSchedule{{2.0, 2.0}, {0.0, 0.0}},
        {1.0, 1.0}, 1.0);
    const Vec war = effective_edge_weights(0.3, ar, Vec(3, 2.5));
    CHECK(war[0] == doctest::Approx(1.0));
    CHECK(war[1] == doctest::Approx(1.0));

    // Rejects states that are not equilibria.
    CHECK_THROWS_AS(effective_edge_weights(0.0, spec, Vec{1.0, 0.0, -1.0}), NotAnEquilibrium);
}
