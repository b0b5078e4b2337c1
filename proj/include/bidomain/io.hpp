#pragma once

#include <string>
#include <vector>

#include "bidomain/galerkin.hpp"

namespace bidomain {

/// RFC-4180-style CSV: comma separator, header row, dot decimal, %.17g.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Per-snapshot trajectory functionals (time, norms, cumulative integrals).
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec);

/// Full coefficient time series: time, c_*, ci_s_*, ce_s_*, a_*.
void write_coefficients_csv(const std::string& path, const TrajectoryRecord& rec);

/// Dense matrix dump for debugging (one CSV row per matrix row).
void write_matrix_csv(const std::string& path, const MatrixXd& M);

/// Provenance sidecar "<artifact>.meta.json" with the full config JSON and
/// the master seed; JSON reports embed the same fields inline instead.
void write_meta_sidecar(const std::string& artifact_path, const std::string& config_json,
                        std::uint64_t master_seed);

// Increment replay file: "BWINCR01", u64 n, u64 steps, f64 dt, u64 seed,
// then dW_v and dW_w as little-endian f64, step-major (all modes of step 0,
// then step 1, ...). A JSON sidecar repeats the dimensions.
void dump_increments(const std::string& path, const WienerIncrements& inc);
WienerIncrements load_increments(const std::string& path);

}  // namespace bidomain
