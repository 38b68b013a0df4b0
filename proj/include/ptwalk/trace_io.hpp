#pragma once

#include "ptwalk/twalk.hpp"

#include "json.hpp"

#include <filesystem>

namespace ptwalk {

nlohmann::json
to_json(const KernelConfig& cfg);

//! Missing keys keep their defaults; unknown enum values throw ConfigError.
KernelConfig
kernel_config_from_json(const nlohmann::json& j);

//! Trace CSV: header row, then one row per retained state
//!   iter,kind,accepted,log_gamma_x,log_gamma_y,x_0..x_{d-1},y_0..y_{d-1}
//! The initial state is written as iteration 0 with kind `init`. Reals are
//! written in shortest round-trip form.
void
write_trace_csv(const std::filesystem::path& path, const Trace& trace);

//! JSON sidecar: target, dimension, iteration count, thinning, seed, the full
//! kernel configuration and per-kind move tallies.
nlohmann::json
trace_header(const Trace& trace);

void
write_json(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json
read_json(const std::filesystem::path& path);

//! Parses a trace CSV, plus its sidecar when `header` is given. Records are
//! reconstructed for the retained rows only (all of them when thin == 1).
Trace
read_trace(const std::filesystem::path& csv,
           const std::filesystem::path& header = {});

//! Point matrix (one row per point) from either a trace CSV (x columns of
//! rows with iter > burn_in) or a bare numeric CSV with an optional header.
Eigen::MatrixXd
read_points(const std::filesystem::path& path, std::size_t burn_in = 0);

void
write_points(const std::filesystem::path& path, const Eigen::MatrixXd& points);

//! Shortest round-trip decimal form.
std::string
format_real(double v);

double
parse_real(std::string_view s);

} // namespace ptwalk
