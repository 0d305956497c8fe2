#include "netcsd/runner.hpp"

#include <cmath>
#include <cstdio>

#include "netcsd/bifurcation.hpp"
#include "netcsd/csv.hpp"
#include "netcsd/errors.hpp"

namespace netcsd {

namespace fs = std::filesystem;
using nlohmann::json;

Subcommand subcommand_from_name(const std::string& name) {
    if (name == "simulate") return Subcommand::Simulate;
    if (name == "analyze") return Subcommand::Analyze;
    if (name == "detect") return Subcommand::Detect;
    if (name == "sweep") return Subcommand::Sweep;
    throw ValidationError("unknown subcommand \"" + name + "\"");
}

namespace {

constexpr double kRatioEqualTol = 1e-12;

double scalar_alpha(const Scenario& s, const char* what) {
    if (!std::holds_alternative<double>(s.alpha))
        throw ValidationError(std::string(what) + " needs a scalar alpha; use sweep for grids");
    return std::get<double>(s.alpha);
}

struct RuntimeModel {
    FieldFn field;
    Vec equilibrium;
};

RuntimeModel instantiate(const ScenarioModel& model, double alpha, double dt) {
    RuntimeModel rt;
    switch (model.variant) {
        case ScenarioVariant::CoupledOscillators:
        case ScenarioVariant::AttractionRepulsion: {
            const ModelSpec& spec = *model.network;
            rt.field = [&spec, alpha](const Vec& x) { return model_field(x, alpha, spec); };
            rt.equilibrium = stable_equilibrium(spec, alpha, dt);
            break;
        }
        case ScenarioVariant::ReducedCO: {
            const ReducedCoParams p = *model.reduced_co;
            const double omega_bar = p.omega_bar_at(alpha);
            const double ratio = omega_bar / p.k;
            if (std::abs(ratio) > 1.0 + kRatioEqualTol)
                throw NoEquilibrium("reduced oscillator has no equilibrium at |omega_bar/k| = " +
                                    std::to_string(std::abs(ratio)));
            rt.field = [p, omega_bar](const Vec& x) {
                return Vec{reduced_kuramoto_field(x[0], omega_bar, p.k)};
            };
            rt.equilibrium = {std::abs(std::abs(ratio) - 1.0) <= kRatioEqualTol
                                  ? std::copysign(M_PI / 2.0, ratio)
                                  : std::asin(ratio)};
            break;
        }
        case ScenarioVariant::ReducedAR: {
            const ReducedArParams p = *model.reduced_ar;
            const double w_a = p.w_a_at(alpha);
            if (!(w_a > 0.0))
                throw ValidationError("attraction coefficient is nonpositive at alpha = " +
                                      std::to_string(alpha));
            rt.field = [p, w_a](const Vec& x) {
                return Vec{reduced_ar_field(x[0], w_a, p.w_r, p.c)};
            };
            rt.equilibrium = {0.0};
            break;
        }
    }
    return rt;
}

Trajectory run_experiment(const Scenario& s, double alpha) {
    const RuntimeModel rt = instantiate(s.model, alpha, s.dt);
    Trajectory traj;
    if (std::holds_alternative<PerturbationSpec>(s.experiment)) {
        traj = run_perturbation_experiment(rt.field, rt.equilibrium,
                                           std::get<PerturbationSpec>(s.experiment), s.dt,
                                           s.horizon);
    } else {
        traj = run_noise_experiment(rt.field, rt.equilibrium, std::get<NoiseSpec>(s.experiment),
                                    s.dt);
        traj.meta.seed = std::get<NoiseSpec>(s.experiment).seed;
    }
    traj.alpha = alpha;
    if (s.model.is_network()) traj.meta.variant = variant_name(s.model.network->variant());
    return traj;
}

void write_json_report(const json& j, const fs::path& path) {
    write_text_atomic(j.dump(2) + "\n", path);
}

void write_resolved_scenario(const Scenario& s, const fs::path& dir) {
    write_json_report(scenario_to_json(s), dir / "scenario.json");
}

json cut_edges_json(const Graph& g, const std::vector<int>& edges) {
    json out = json::array();
    for (int e : edges) {
        out.push_back(json{{"index", e + 1},
                           {"u", g.edge(e).head + 1},
                           {"v", g.edge(e).tail + 1}});
    }
    return out;
}

json nodes_json_one_based(const std::vector<int>& nodes) {
    json out = json::array();
    for (int v : nodes) out.push_back(v + 1);
    return out;
}

GridSpec lower_bound_grid(const Scenario& s, double alpha) {
    if (s.detection.alpha_grid) return *s.detection.alpha_grid;
    if (alpha <= 0.0) return GridSpec{0.0, 0.0, 1};
    return GridSpec{0.0, alpha, 33};
}

/// Linearization edge-weight family for the lower-bound graph.
Vec weight_family_at(const ModelSpec& spec, double alpha) {
    return effective_edge_weights(alpha, spec, stable_equilibrium(spec, alpha));
}

json assumption_to_json(const AssumptionReport& rep, const Graph& g) {
    json j;
    j["holds"] = rep.holds;
    if (rep.alpha_star)
        j["alpha_star"] = *rep.alpha_star;
    else
        j["alpha_star"] = nullptr;
    if (rep.cutset) {
        j["cutset"] = json{{"S", nodes_json_one_based(rep.cutset->nodes)},
                           {"boundary_edges", cut_edges_json(g, rep.cutset->boundary_edges)},
                           {"two_cut", rep.cutset->two_cut}};
    }
    json violations = json::array();
    for (const AssumptionViolation& v : rep.violations) {
        violations.push_back(json{{"alpha", v.alpha},
                                  {"edge", v.edge + 1},
                                  {"value", v.value},
                                  {"clause", v.clause}});
    }
    j["violations"] = std::move(violations);
    return j;
}

std::string trace_cell(const std::optional<double>& trace) {
    return trace ? format_double(*trace) : "inf";
}

/// Scalar AR(1) stationary variance for a linear recovery rate.
std::optional<double> scalar_trace(double rate, double delta_t, double sigma) {
    const double gamma = std::exp(rate * delta_t);
    if (std::abs(gamma) >= 1.0 - 1e-12) return std::nullopt;
    return sigma * sigma / (1.0 - gamma * gamma);
}

struct SummaryCell {
    std::optional<double> lambda2;
    std::optional<double> recovery_rate;
    std::optional<double> variance_trace;
    bool trace_infinite = false;
};

SummaryCell summarize_cell(const Scenario& s, double alpha) {
    double delta_t = 1.0;
    double sigma = 1.0;
    if (std::holds_alternative<NoiseSpec>(s.experiment)) {
        delta_t = std::get<NoiseSpec>(s.experiment).delta_t;
        sigma = std::get<NoiseSpec>(s.experiment).sigma;
    }

    SummaryCell cell;
    switch (s.model.variant) {
        case ScenarioVariant::CoupledOscillators:
        case ScenarioVariant::AttractionRepulsion: {
            const ModelSpec& spec = *s.model.network;
            auto [gamma, gamma_bar] = gamma_matrices(alpha, spec, delta_t);
            Matrix psd =
                linearized_jacobian(alpha, spec, stable_equilibrium(spec, alpha, s.dt));
            psd *= -1.0;
            const SpectralDecomposition d = spectral_decomp(psd);
            cell.lambda2 = d.eigenvalues[1];
            cell.recovery_rate = -d.eigenvalues[1];
            cell.variance_trace = theoretical_covariance_trace(gamma_bar, sigma);
            cell.trace_infinite = !cell.variance_trace.has_value();
            break;
        }
        case ScenarioVariant::ReducedCO: {
            const ReducedCoParams& p = *s.model.reduced_co;
            const ReducedSummary summary = reduced_co_summary(p.omega_bar_at(alpha), p.k);
            if (summary.linear_rate) {
                cell.recovery_rate = *summary.linear_rate;
                cell.lambda2 = -*summary.linear_rate;
                cell.variance_trace = scalar_trace(*summary.linear_rate, delta_t, sigma);
                cell.trace_infinite = !cell.variance_trace.has_value();
            }
            break;
        }
        case ScenarioVariant::ReducedAR: {
            const ReducedArParams& p = *s.model.reduced_ar;
            const ReducedSummary summary = reduced_ar_summary(p.w_a_at(alpha), p.w_r, p.c);
            cell.recovery_rate = *summary.linear_rate;
            cell.lambda2 = -*summary.linear_rate;
            cell.variance_trace = scalar_trace(*summary.linear_rate, delta_t, sigma);
            cell.trace_infinite = !cell.variance_trace.has_value();
            break;
        }
    }
    return cell;
}

void run_simulate(const Scenario& s) {
    const double alpha = scalar_alpha(s, "simulate");
    const Trajectory traj = run_experiment(s, alpha);
    write_resolved_scenario(s, s.output_dir);
    write_trajectory_csv(traj, s.output_dir / "trajectory.csv");
}

const char* stability_name(Stability st) {
    switch (st) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        default: return "semi_stable";
    }
}

const char* bifurcation_name(BifurcationType t) {
    switch (t) {
        case BifurcationType::SaddleNode: return "saddle_node";
        case BifurcationType::Pitchfork: return "pitchfork";
        default: return "none";
    }
}

ReducedSummary reduced_summary_at(const ScenarioModel& model, double alpha) {
    if (model.variant == ScenarioVariant::ReducedCO)
        return reduced_co_summary(model.reduced_co->omega_bar_at(alpha), model.reduced_co->k);
    return reduced_ar_summary(model.reduced_ar->w_a_at(alpha), model.reduced_ar->w_r,
                              model.reduced_ar->c);
}

json reduced_summary_json(const ReducedSummary& summary) {
    json eq = json::array();
    for (const ReducedEquilibrium& e : summary.equilibria)
        eq.push_back(json{{"value", e.value}, {"stability", stability_name(e.stability)}});
    json j{{"equilibria", std::move(eq)}, {"type", bifurcation_name(summary.type)}};
    j["linear_rate"] = summary.linear_rate ? json(*summary.linear_rate) : json(nullptr);
    j["invariant_radius"] =
        summary.invariant_radius ? json(*summary.invariant_radius) : json(nullptr);
    return j;
}

void run_analyze(const Scenario& s) {
    write_resolved_scenario(s, s.output_dir);
    json report;
    report["subcommand"] = "analyze";

    if (s.model.is_network()) {
        const double alpha = scalar_alpha(s, "analyze on a network model");
        const ModelSpec& spec = *s.model.network;
        report["alpha"] = alpha;
        report["variant"] = variant_name(spec.variant());

        std::optional<CutSet> cutset;
        if (!s.model.cutset_nodes.empty()) {
            cutset = cutset_from_nodes(spec.graph(), s.model.cutset_nodes);
            // The assumption grid must straddle the crossing, unlike the
            // lower-bound-graph grid which must stay below it.
            const GridSpec grid{0.0, 2.0 * std::max(alpha, 0.5), 81};
            const Vec grid_values = grid.values();
            const AssumptionReport assumption =
                spec.variant() == ModelVariant::CoupledOscillators
                    ? check_assumption_co(spec, grid_values, *cutset)
                    : check_assumption_ar(spec, grid_values, *cutset);
            report["assumption"] = assumption_to_json(assumption, spec.graph());
        }

        json eq;
        if (spec.variant() == ModelVariant::CoupledOscillators) {
            const int critical_edge =
                cutset && !cutset->boundary_edges.empty() ? cutset->boundary_edges.front() : 0;
            const EquilibriumResult result = kuramoto_equilibria(alpha, spec, critical_edge);
            eq["stable"] = result.stable;
            eq["unstable"] = *result.unstable;
            eq["field_residual"] = result.field_residual;
            eq["eigenvalues"] = result.jacobian_spectrum.eigenvalues;
            eq["lambda2"] = result.jacobian_spectrum.eigenvalues[1];
            eq["v2"] = result.jacobian_spectrum.eigenvector(1);
        } else {
            const Vec x_bar = stable_equilibrium(spec, alpha, s.dt);
            Matrix psd = linearized_jacobian(alpha, spec, x_bar);
            psd *= -1.0;
            const SpectralDecomposition d = spectral_decomp(psd);
            eq["stable"] = x_bar;
            eq["field_residual"] = norm_inf(model_field(x_bar, alpha, spec));
            eq["eigenvalues"] = d.eigenvalues;
            eq["lambda2"] = d.eigenvalues[1];
            eq["v2"] = d.eigenvector(1);
        }
        report["equilibrium"] = std::move(eq);
    } else {
        // Scalar models: tabulate the equilibrium branches over the grid.
        const Vec alphas = std::holds_alternative<GridSpec>(s.alpha)
                               ? std::get<GridSpec>(s.alpha).values()
                               : Vec{std::get<double>(s.alpha)};
        std::vector<std::vector<std::string>> rows;
        for (double alpha : alphas) {
            const ReducedSummary summary = reduced_summary_at(s.model, alpha);
            const std::string rate =
                summary.linear_rate ? format_double(*summary.linear_rate) : "";
            const std::string radius =
                summary.invariant_radius ? format_double(*summary.invariant_radius) : "";
            if (summary.equilibria.empty()) {
                rows.push_back({format_double(alpha), "", "", bifurcation_name(summary.type),
                                rate, radius});
            }
            for (const ReducedEquilibrium& e : summary.equilibria) {
                rows.push_back({format_double(alpha), format_double(e.value),
                                stability_name(e.stability), bifurcation_name(summary.type), rate,
                                radius});
            }
        }
        emit_csv_text({"alpha", "equilibrium", "stability", "type", "linear_rate",
                       "invariant_radius"},
                      rows, s.output_dir / "bifurcation_diagram.csv");
        report["variant"] =
            s.model.variant == ScenarioVariant::ReducedCO ? "reduced_co" : "reduced_ar";
        report["rows"] = rows.size();
        report["summary_at_last_alpha"] = reduced_summary_json(
            reduced_summary_at(s.model, alphas.back()));
    }
    write_json_report(report, s.output_dir / "report.json");
}

json covariance_to_json(const CovarianceReport& cov) {
    json j;
    j["final_trace"] = cov.final_trace;
    j["theoretical_trace"] =
        cov.theoretical_trace ? json(*cov.theoretical_trace) : json("inf");
    j["theoretical_trace_infinite"] = cov.theoretical_trace_infinite;
    j["gamma_hat"] = cov.gamma_hat;
    j["per_node_variance"] = cov.per_node_variance;
    j["alarms"] = cov.alarms;
    return j;
}

void run_detect(const Scenario& s) {
    const double alpha = scalar_alpha(s, "detect");
    write_resolved_scenario(s, s.output_dir);
    json report;
    report["subcommand"] = "detect";
    report["alpha"] = alpha;

    if (std::holds_alternative<PerturbationSpec>(s.experiment)) {
        if (!s.model.is_network())
            throw ValidationError("detect with a perturbation experiment requires a network model");
        const ModelSpec& spec = *s.model.network;
        const PerturbationSpec& pert = std::get<PerturbationSpec>(s.experiment);

        const Vec x_bar = stable_equilibrium(spec, alpha, s.dt);
        const Trajectory traj = run_perturbation_experiment(spec, alpha, pert, s.dt, s.horizon);
        write_trajectory_csv(traj, s.output_dir / "trajectory.csv");

        const Trajectory eps = decay_segment(traj, pert.t_off, x_bar);
        const Vec eps0 = eps.state_at(0);

        DetectionConfig cfg = s.detection.config;
        cfg.lambda3_lb = resolve_lambda3_lb(s, alpha);
        const DetectionReport det = detect_and_localize(eps, eps0, cfg, spec.graph());

        std::vector<std::string> header{"t"};
        for (int i = 0; i < spec.node_count(); ++i) header.push_back("r" + std::to_string(i + 1));
        std::vector<Vec> rows;
        for (const auto& [t, r] : residual_series(eps, eps0)) {
            Vec row{t};
            row.insert(row.end(), r.begin(), r.end());
            rows.push_back(std::move(row));
        }
        emit_csv(header, rows, s.output_dir / "residual.csv");

        json dj;
        dj["bifurcating"] = det.bifurcating;
        dj["t_star"] = det.t_star;
        dj["read_time"] = det.read_time;
        dj["residual_norm_at_read"] = det.residual_norm_at_read;
        dj["S"] = det.S ? nodes_json_one_based(*det.S) : json(nullptr);
        dj["boundary_edges"] =
            det.boundary_edges ? cut_edges_json(spec.graph(), *det.boundary_edges) : json(nullptr);
        dj["undetermined_nodes"] = nodes_json_one_based(det.undetermined_nodes);
        dj["thresholds"] = json{{"zeta", cfg.zeta},
                                {"delta", cfg.delta},
                                {"sign_tol", det.sign_tol_used},
                                {"lambda3_lb", *cfg.lambda3_lb}};
        report["detection"] = std::move(dj);
    } else {
        const NoiseSpec& noise = std::get<NoiseSpec>(s.experiment);
        if (s.model.is_network()) {
            const ModelSpec& spec = *s.model.network;
            const Vec x_bar = stable_equilibrium(spec, alpha, s.dt);
            const Trajectory traj = run_noise_experiment(spec, alpha, noise, s.dt);
            write_trajectory_csv(traj, s.output_dir / "trajectory.csv");

            const Matrix q = projection_matrix(spec.node_count());
            CovarianceReport cov = empirical_covariance_trace(traj, x_bar, q);
            auto [gamma, gamma_bar] = gamma_matrices(alpha, spec, noise.delta_t);
            cov.theoretical_trace = theoretical_covariance_trace(gamma_bar, noise.sigma);
            cov.theoretical_trace_infinite = !cov.theoretical_trace.has_value();

            std::vector<std::string> header{"t", "trace"};
            for (int i = 0; i < spec.node_count(); ++i)
                header.push_back("var" + std::to_string(i + 1));
            std::vector<Vec> rows;
            for (std::size_t i = 0; i < cov.empirical_trace_series.size(); ++i) {
                Vec row{cov.empirical_trace_series[i].first,
                        cov.empirical_trace_series[i].second};
                row.insert(row.end(), cov.per_node_variance_series[i].begin(),
                           cov.per_node_variance_series[i].end());
                rows.push_back(std::move(row));
            }
            emit_csv(header, rows, s.output_dir / "variance.csv");
            report["covariance"] = covariance_to_json(cov);
        } else {
            // Scalar models: moving statistics plus an AR(1) fit.
            const Trajectory traj = run_experiment(s, alpha);
            write_trajectory_csv(traj, s.output_dir / "trajectory.csv");
            const Vec series = traj.component(0);
            const std::size_t window =
                std::min<std::size_t>(std::max<std::size_t>(2, s.detection.moving_window),
                                      series.size());
            const MovingStats stats = moving_statistics(series, window);
            std::vector<Vec> rows;
            for (std::size_t i = 0; i < stats.index.size(); ++i) {
                rows.push_back(Vec{traj.times[static_cast<std::size_t>(stats.index[i])],
                                   stats.mean[i], stats.variance[i]});
            }
            emit_csv({"t", "mean", "variance"}, rows, s.output_dir / "variance.csv");

            json sj;
            sj["gamma_hat"] = ar1_autocorrelation(series);
            sj["sample_variance"] = stats.variance.back();
            const SummaryCell cell = summarize_cell(s, alpha);
            sj["theoretical_stationary_variance"] =
                cell.trace_infinite ? json("inf")
                                    : (cell.variance_trace ? json(*cell.variance_trace)
                                                           : json(nullptr));
            report["stochastic"] = std::move(sj);
        }
    }
    write_json_report(report, s.output_dir / "report.json");
}

void run_sweep(const Scenario& s) {
    const Vec alphas = std::holds_alternative<GridSpec>(s.alpha)
                           ? std::get<GridSpec>(s.alpha).values()
                           : Vec{std::get<double>(s.alpha)};
    write_resolved_scenario(s, s.output_dir);

    std::vector<std::vector<std::string>> summary;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "cell_%03zu", i);
        Scenario cell = s;
        cell.alpha = alphas[i];
        cell.output_dir = s.output_dir / name;
        write_resolved_scenario(cell, cell.output_dir);
        const Trajectory traj = run_experiment(cell, alphas[i]);
        write_trajectory_csv(traj, cell.output_dir / "trajectory.csv");

        const SummaryCell row = summarize_cell(s, alphas[i]);
        summary.push_back(
            {format_double(alphas[i]),
             row.lambda2 ? format_double(*row.lambda2) : "",
             row.recovery_rate ? format_double(*row.recovery_rate) : "",
             row.trace_infinite ? "inf" : trace_cell(row.variance_trace)});
    }
    emit_csv_text({"alpha", "lambda2", "recovery_rate", "variance_trace"}, summary,
                  s.output_dir / "summary.csv");
}

}  // namespace

double resolve_lambda3_lb(const Scenario& scenario, double alpha) {
    if (scenario.detection.config.lambda3_lb) {
        if (!(*scenario.detection.config.lambda3_lb > 0.0))
            throw ValidationError("detection.lambda3_lb must be strictly positive");
        return *scenario.detection.config.lambda3_lb;
    }
    if (!scenario.model.is_network())
        throw ValidationError("supply detection.lambda3_lb; it cannot be derived without a graph");
    const ModelSpec& spec = *scenario.model.network;
    if (spec.node_count() < 3)
        throw ValidationError("lambda_3 needs at least three nodes; supply detection.lambda3_lb");

    const GridSpec grid = lower_bound_grid(scenario, alpha);
    const Vec grid_values = grid.values();
    const Graph lower = lower_bound_graph(
        spec.graph(), [&](double a) { return weight_family_at(spec, a); }, grid_values);
    return spectral_decomp(laplacian(lower)).eigenvalues[2];
}

void run(Subcommand cmd, Scenario scenario, const RunOptions& options) {
    if (options.out) scenario.output_dir = *options.out;
    if (options.dt) {
        if (!(*options.dt > 0.0)) throw ValidationError("--dt must be strictly positive");
        scenario.dt = *options.dt;
    }
    if (options.seed && std::holds_alternative<NoiseSpec>(scenario.experiment))
        std::get<NoiseSpec>(scenario.experiment).seed = *options.seed;

    std::error_code ec;
    fs::create_directories(scenario.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + scenario.output_dir.string());

    switch (cmd) {
        case Subcommand::Simulate: run_simulate(scenario); break;
        case Subcommand::Analyze: run_analyze(scenario); break;
        case Subcommand::Detect: run_detect(scenario); break;
        case Subcommand::Sweep: run_sweep(scenario); break;
    }
}

}  // namespace netcsd
