#include "netcsd/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "netcsd/errors.hpp"

namespace netcsd {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_text_atomic(const std::string& content, const fs::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

void emit_csv(const std::vector<std::string>& header, const std::vector<Vec>& rows,
              const fs::path& path) {
    if (rows.empty()) throw ValidationError("emit_csv requires a nonempty series");
    std::string out;
    out.reserve(rows.size() * rows.front().size() * 20 + 64);
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out += ',';
        out += header[j];
    }
    out += '\n';
    for (const Vec& row : rows) {
        if (row.size() != header.size())
            throw ValidationError("csv row width does not match the header");
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (!std::isfinite(row[j]))
                throw IoError("refusing to write non-finite value in column " + header[j]);
            if (j) out += ',';
            out += format_double(row[j]);
        }
        out += '\n';
    }
    write_text_atomic(out, path);
}

void emit_csv_text(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, const fs::path& path) {
    if (rows.empty()) throw ValidationError("emit_csv_text requires a nonempty series");
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out += ',';
        out += header[j];
    }
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw ValidationError("csv row width does not match the header");
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += row[j];
        }
        out += '\n';
    }
    write_text_atomic(out, path);
}

void write_trajectory_csv(const Trajectory& traj, const fs::path& path) {
    std::vector<std::string> header{"t"};
    for (std::size_t j = 0; j < traj.states.cols(); ++j)
        header.push_back("x" + std::to_string(j + 1));
    std::vector<Vec> rows;
    rows.reserve(traj.sample_count());
    for (std::size_t i = 0; i < traj.sample_count(); ++i) {
        Vec row;
        row.reserve(header.size());
        row.push_back(traj.times[i]);
        for (std::size_t j = 0; j < traj.states.cols(); ++j) row.push_back(traj.states(i, j));
        rows.push_back(std::move(row));
    }
    emit_csv(header, rows, path);
}

Trajectory read_trajectory_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty csv file " + path.string());

    std::size_t cols = 1;
    for (char c : line)
        if (c == ',') ++cols;
    if (cols < 2) throw ParseError("trajectory csv needs a time column and at least one state");

    std::vector<Vec> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Vec row;
        row.reserve(cols);
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != cols) throw ParseError("ragged csv row in " + path.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("csv has no data rows: " + path.string());

    Trajectory traj;
    traj.times.resize(rows.size());
    traj.states = Matrix(rows.size(), cols - 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        traj.times[i] = rows[i][0];
        for (std::size_t j = 1; j < cols; ++j) traj.states(i, j - 1) = rows[i][j];
    }
    return traj;
}

}  // namespace netcsd
