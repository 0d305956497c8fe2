#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "netcsd/linalg.hpp"
#include "netcsd/simulation.hpp"

namespace netcsd {

/// Numeric series writer: header + rows at 17 significant digits, LF line
/// endings, atomic (temp file + rename). Non-finite values are refused.
void emit_csv(const std::vector<std::string>& header, const std::vector<Vec>& rows,
              const std::filesystem::path& path);

/// String-cell variant for tables that legitimately carry "inf" cells.
void emit_csv_text(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows,
                   const std::filesystem::path& path);

/// Trajectory as `t,x1,...,xn`.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

Trajectory read_trajectory_csv(const std::filesystem::path& path);

std::string format_double(double x);

void write_text_atomic(const std::string& content, const std::filesystem::path& path);

}  // namespace netcsd
