#include "netcsd/scenario.hpp"

#include <fstream>
#include <set>

#include "netcsd/errors.hpp"

namespace netcsd {

using nlohmann::json;

namespace {

const json& require_field(const json& j, const char* key, const char* context) {
    auto it = j.find(key);
    if (it == j.end())
        throw ValidationError(std::string(context) + " is missing the required field \"" + key +
                              "\"");
    return *it;
}

double require_number(const json& j, const char* key, const char* context) {
    const json& v = require_field(j, key, context);
    if (!v.is_number()) throw ValidationError(std::string(context) + "." + key + " must be a number");
    return v.get<double>();
}

Vec number_array(const json& j, const char* what) {
    if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of numbers");
    Vec out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ValidationError(std::string(what) + " must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

/// Accepts {"base": x, "direction": y} with scalar or array entries.
ParamSchedule schedule_from_json(const json& j, std::size_t expected, const char* what) {
    ParamSchedule s;
    const json& base = require_field(j, "base", what);
    const json& dir = require_field(j, "direction", what);
    s.base = base.is_number() ? Vec{base.get<double>()} : number_array(base, what);
    s.direction = dir.is_number() ? Vec{dir.get<double>()} : number_array(dir, what);
    if (s.base.size() != expected || s.direction.size() != expected)
        throw ValidationError(std::string(what) + " must have " + std::to_string(expected) +
                              " components");
    return s;
}

json schedule_to_json(const ParamSchedule& s) {
    if (s.size() == 1) return json{{"base", s.base[0]}, {"direction", s.direction[0]}};
    return json{{"base", s.base}, {"direction", s.direction}};
}

GridSpec grid_from_json(const json& j, const char* what) {
    GridSpec g;
    g.from = require_number(j, "from", what);
    g.to = require_number(j, "to", what);
    g.steps = static_cast<int>(require_number(j, "steps", what));
    if (g.steps < 1) throw ValidationError(std::string(what) + ".steps must be at least 1");
    if (g.to < g.from) throw ValidationError(std::string(what) + " must satisfy from <= to");
    return g;
}

json grid_to_json(const GridSpec& g) {
    return json{{"from", g.from}, {"to", g.to}, {"steps", g.steps}};
}

ScenarioModel model_from_json(const json& j) {
    const std::string variant =
        require_field(j, "variant", "model").get<std::string>();
    ScenarioModel model;
    if (variant == "coupled_oscillators" || variant == "attraction_repulsion") {
        Graph graph = graph_from_json(require_field(j, "graph", "model"));
        const auto m = static_cast<std::size_t>(graph.edge_count());
        const auto n = static_cast<std::size_t>(graph.node_count());
        if (variant == "coupled_oscillators") {
            model.variant = ScenarioVariant::CoupledOscillators;
            Vec coupling = number_array(require_field(j, "coupling", "model"), "model.coupling");
            ParamSchedule omega =
                schedule_from_json(require_field(j, "omega", "model"), n, "model.omega");
            model.network =
                ModelSpec::coupled_oscillators(std::move(graph), std::move(coupling), std::move(omega));
        } else {
            model.variant = ScenarioVariant::AttractionRepulsion;
            ParamSchedule attraction =
                schedule_from_json(require_field(j, "attraction", "model"), m, "model.attraction");
            Vec repulsion = number_array(require_field(j, "repulsion", "model"), "model.repulsion");
            const double c = require_number(j, "c", "model");
            model.network = ModelSpec::attraction_repulsion(std::move(graph), std::move(attraction),
                                                            std::move(repulsion), c);
        }
        if (j.contains("cutset_nodes")) {
            for (const auto& v : j.at("cutset_nodes")) {
                const int node = v.get<int>();
                if (node < 1 || node > model.network->node_count())
                    throw ValidationError("model.cutset_nodes entry " + std::to_string(node) +
                                          " is outside 1.." +
                                          std::to_string(model.network->node_count()));
                model.cutset_nodes.push_back(node - 1);
            }
        }
    } else if (variant == "reduced_co") {
        model.variant = ScenarioVariant::ReducedCO;
        ReducedCoParams p;
        p.k = require_number(j, "k", "model");
        if (!(p.k > 0.0)) throw ValidationError("model.k must be strictly positive");
        p.omega_bar = schedule_from_json(require_field(j, "omega_bar", "model"), 1, "model.omega_bar");
        model.reduced_co = std::move(p);
    } else if (variant == "reduced_ar") {
        model.variant = ScenarioVariant::ReducedAR;
        ReducedArParams p;
        p.w_a = schedule_from_json(require_field(j, "w_a", "model"), 1, "model.w_a");
        p.w_r = require_number(j, "w_r", "model");
        p.c = require_number(j, "c", "model");
        if (!(p.w_r > 0.0) || !(p.c > 0.0))
            throw ValidationError("model.w_r and model.c must be strictly positive");
        model.reduced_ar = std::move(p);
    } else {
        throw ValidationError("unknown model variant \"" + variant + "\"");
    }
    return model;
}

json model_to_json(const ScenarioModel& model) {
    json j;
    switch (model.variant) {
        case ScenarioVariant::CoupledOscillators: {
            j["variant"] = "coupled_oscillators";
            j["graph"] = graph_to_json(model.network->graph());
            j["coupling"] = model.network->coupling();
            j["omega"] = schedule_to_json(model.network->omega_schedule());
            break;
        }
        case ScenarioVariant::AttractionRepulsion: {
            j["variant"] = "attraction_repulsion";
            j["graph"] = graph_to_json(model.network->graph());
            j["attraction"] = schedule_to_json(model.network->attraction_schedule());
            j["repulsion"] = model.network->repulsion();
            j["c"] = model.network->range_c();
            break;
        }
        case ScenarioVariant::ReducedCO: {
            j["variant"] = "reduced_co";
            j["k"] = model.reduced_co->k;
            j["omega_bar"] = schedule_to_json(model.reduced_co->omega_bar);
            break;
        }
        case ScenarioVariant::ReducedAR: {
            j["variant"] = "reduced_ar";
            j["w_a"] = schedule_to_json(model.reduced_ar->w_a);
            j["w_r"] = model.reduced_ar->w_r;
            j["c"] = model.reduced_ar->c;
            break;
        }
    }
    if (!model.cutset_nodes.empty()) {
        std::vector<int> one_based;
        for (int v : model.cutset_nodes) one_based.push_back(v + 1);
        j["cutset_nodes"] = one_based;
    }
    return j;
}

}  // namespace

Vec GridSpec::values() const {
    Vec out(static_cast<std::size_t>(steps));
    if (steps == 1) {
        out[0] = from;
        return out;
    }
    const double step = (to - from) / static_cast<double>(steps - 1);
    for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = from + step * i;
    out.back() = to;
    return out;
}

Graph graph_from_json(const json& j) {
    const int n = static_cast<int>(require_number(j, "n", "graph"));
    const json& edges_json = require_field(j, "edges", "graph");
    if (!edges_json.is_array()) throw ValidationError("graph.edges must be an array");
    std::vector<Edge> edges;
    edges.reserve(edges_json.size());
    for (const auto& e : edges_json) {
        const int u = static_cast<int>(require_number(e, "u", "graph edge"));
        const int v = static_cast<int>(require_number(e, "v", "graph edge"));
        const double w = require_number(e, "w", "graph edge");
        if (u < 1 || u > n || v < 1 || v > n)
            throw ValidationError("graph edge references a node outside 1.." + std::to_string(n));
        edges.push_back(Edge{u - 1, v - 1, w});
    }
    return Graph(n, std::move(edges));
}

json graph_to_json(const Graph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges())
        edges.push_back(json{{"u", e.head + 1}, {"v", e.tail + 1}, {"w", e.weight}});
    return json{{"n", g.node_count()}, {"edges", std::move(edges)}};
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.model = model_from_json(require_field(j, "model", "scenario"));

    const json& alpha = require_field(j, "alpha", "scenario");
    if (alpha.is_number()) {
        s.alpha = alpha.get<double>();
        if (std::get<double>(s.alpha) < 0.0)
            throw ValidationError("scenario.alpha must be nonnegative");
    } else {
        s.alpha = grid_from_json(alpha, "scenario.alpha");
    }

    const json& integ = require_field(j, "integrator", "scenario");
    s.dt = require_number(integ, "dt", "integrator");
    s.horizon = require_number(integ, "horizon", "integrator");
    if (!(s.dt > 0.0)) throw ValidationError("integrator.dt must be strictly positive");
    if (!(s.horizon > 0.0)) throw ValidationError("integrator.horizon must be strictly positive");

    const json& exp = require_field(j, "experiment", "scenario");
    const bool has_pert = exp.contains("perturbation");
    const bool has_noise = exp.contains("noise");
    if (has_pert == has_noise)
        throw ValidationError("experiment must contain exactly one of \"perturbation\" or \"noise\"");
    if (has_pert) {
        const json& p = exp.at("perturbation");
        PerturbationSpec pert;
        const json& signal = require_field(p, "signal", "perturbation");
        pert.signal = signal.is_number() ? Vec{signal.get<double>()}
                                         : number_array(signal, "perturbation.signal");
        if (static_cast<int>(pert.signal.size()) != s.model.dimension())
            throw ValidationError("perturbation.signal length must match the model dimension");
        const json& window = require_field(p, "window", "perturbation");
        if (!window.is_array() || window.size() != 2)
            throw ValidationError("perturbation.window must be [t_on, t_off]");
        pert.t_on = window[0].get<double>();
        pert.t_off = window[1].get<double>();
        if (!(0.0 <= pert.t_on && pert.t_on < pert.t_off && pert.t_off <= s.horizon))
            throw ValidationError("perturbation window must satisfy 0 <= t_on < t_off <= horizon");
        s.experiment = std::move(pert);
    } else {
        const json& ns = exp.at("noise");
        NoiseSpec noise;
        noise.sigma = require_number(ns, "sigma", "noise");
        noise.delta_t = require_number(ns, "delta_t", "noise");
        noise.seed = require_field(ns, "seed", "noise").get<std::uint64_t>();
        noise.horizon = ns.contains("horizon") ? ns.at("horizon").get<double>() : s.horizon;
        if (noise.sigma < 0.0) throw ValidationError("noise.sigma must be nonnegative");
        if (!(noise.delta_t > 0.0)) throw ValidationError("noise.delta_t must be strictly positive");
        if (!(noise.horizon > 0.0)) throw ValidationError("noise.horizon must be strictly positive");
        s.experiment = noise;
    }

    if (j.contains("detection")) {
        const json& d = j.at("detection");
        if (d.contains("zeta")) s.detection.config.zeta = d.at("zeta").get<double>();
        if (d.contains("delta")) s.detection.config.delta = d.at("delta").get<double>();
        if (d.contains("sign_tol")) s.detection.config.sign_tol = d.at("sign_tol").get<double>();
        if (d.contains("lambda3_lb"))
            s.detection.config.lambda3_lb = d.at("lambda3_lb").get<double>();
        if (d.contains("windowed_norm"))
            s.detection.config.windowed_norm = d.at("windowed_norm").get<bool>();
        if (d.contains("window_seconds"))
            s.detection.config.window_seconds = d.at("window_seconds").get<double>();
        if (d.contains("alpha_grid"))
            s.detection.alpha_grid = grid_from_json(d.at("alpha_grid"), "detection.alpha_grid");
        if (d.contains("moving_window"))
            s.detection.moving_window = d.at("moving_window").get<std::size_t>();
        if (!(s.detection.config.zeta > 0.0 && s.detection.config.zeta < 1.0))
            throw ValidationError("detection.zeta must lie strictly between 0 and 1");
        if (!(s.detection.config.delta > 0.0))
            throw ValidationError("detection.delta must be strictly positive");
    }

    s.output_dir = require_field(j, "output_dir", "scenario").get<std::string>();
    if (s.output_dir.empty()) throw ValidationError("output_dir must not be empty");
    return s;
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["model"] = model_to_json(s.model);
    if (std::holds_alternative<double>(s.alpha))
        j["alpha"] = std::get<double>(s.alpha);
    else
        j["alpha"] = grid_to_json(std::get<GridSpec>(s.alpha));
    j["integrator"] = json{{"dt", s.dt}, {"horizon", s.horizon}};

    if (std::holds_alternative<PerturbationSpec>(s.experiment)) {
        const auto& p = std::get<PerturbationSpec>(s.experiment);
        json pj;
        if (p.signal.size() == 1)
            pj["signal"] = p.signal[0];
        else
            pj["signal"] = p.signal;
        pj["window"] = json::array({p.t_on, p.t_off});
        j["experiment"] = json{{"perturbation", std::move(pj)}};
    } else {
        const auto& ns = std::get<NoiseSpec>(s.experiment);
        j["experiment"] = json{{"noise",
                                json{{"sigma", ns.sigma},
                                     {"delta_t", ns.delta_t},
                                     {"seed", ns.seed},
                                     {"horizon", ns.horizon}}}};
    }

    json d;
    d["zeta"] = s.detection.config.zeta;
    d["delta"] = s.detection.config.delta;
    if (s.detection.config.sign_tol) d["sign_tol"] = *s.detection.config.sign_tol;
    if (s.detection.config.lambda3_lb) d["lambda3_lb"] = *s.detection.config.lambda3_lb;
    if (s.detection.config.windowed_norm) {
        d["windowed_norm"] = true;
        d["window_seconds"] = s.detection.config.window_seconds;
    }
    if (s.detection.alpha_grid) d["alpha_grid"] = grid_to_json(*s.detection.alpha_grid);
    d["moving_window"] = s.detection.moving_window;
    j["detection"] = std::move(d);

    j["output_dir"] = s.output_dir.string();
    return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError("scenario " + path.string() + ": " + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const json::exception& e) {
        throw ValidationError("scenario " + path.string() + ": " + e.what());
    }
}

}  // namespace netcsd
