#pragma once

#include <filesystem>
#include <optional>
#include <variant>

#include "json.hpp"
#include "netcsd/detection.hpp"
#include "netcsd/models.hpp"
#include "netcsd/simulation.hpp"

namespace netcsd {

struct GridSpec {
    double from = 0.0;
    double to = 0.0;
    int steps = 1;

    Vec values() const;
};

enum class ScenarioVariant { CoupledOscillators, AttractionRepulsion, ReducedCO, ReducedAR };

struct ReducedCoParams {
    double k = 1.0;
    ParamSchedule omega_bar;  // scalar schedule

    double omega_bar_at(double alpha) const { return omega_bar.at(alpha)[0]; }
};

struct ReducedArParams {
    ParamSchedule w_a;  // scalar schedule
    double w_r = 1.0;
    double c = 1.0;

    double w_a_at(double alpha) const { return w_a.at(alpha)[0]; }
};

struct ScenarioModel {
    ScenarioVariant variant = ScenarioVariant::ReducedCO;
    std::optional<ModelSpec> network;
    std::optional<ReducedCoParams> reduced_co;
    std::optional<ReducedArParams> reduced_ar;
    std::vector<int> cutset_nodes;  // 0-based; empty when unspecified

    bool is_network() const {
        return variant == ScenarioVariant::CoupledOscillators ||
               variant == ScenarioVariant::AttractionRepulsion;
    }
    int dimension() const { return is_network() ? network->node_count() : 1; }
};

struct DetectionSettings {
    DetectionConfig config;
    std::optional<GridSpec> alpha_grid;  // grid for the lower-bound graph
    std::size_t moving_window = 100;     // moving-variance window (scalar models)
};

struct Scenario {
    ScenarioModel model;
    std::variant<double, GridSpec> alpha = 0.0;
    std::variant<PerturbationSpec, NoiseSpec> experiment;
    DetectionSettings detection;
    double dt = 1e-3;
    double horizon = 10.0;
    std::filesystem::path output_dir;
};

Graph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const Graph& g);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

/// Parses the file as JSON (// comments allowed) and validates every
/// cross-reference.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace netcsd
