#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "netcsd/scenario.hpp"

namespace netcsd {

enum class Subcommand { Simulate, Analyze, Detect, Sweep };

Subcommand subcommand_from_name(const std::string& name);

struct RunOptions {
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
};

/// Executes one subcommand, writing its artifacts under the scenario's
/// output directory. Throws netcsd::Error on failure.
void run(Subcommand cmd, Scenario scenario, const RunOptions& options = {});

/// Effective lambda_3 bound for detection: the configured value when given,
/// otherwise lambda_3 of the lower-bound graph over the alpha grid.
double resolve_lambda3_lb(const Scenario& scenario, double alpha);

}  // namespace netcsd
