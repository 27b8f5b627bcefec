#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "sawspin/config.hpp"

// Experiment orchestration behind the CLI subcommands. Each command writes
// CSV curves and a JSON summary into `out_dir` and returns the summary.

namespace sawspin::experiments {

// Solved Rayleigh velocity, decay constants and a depth-decay table.
nlohmann::json cmd_rayleigh(const config::RunConfig& cfg,
                            const std::filesystem::path& out_dir);

// Strain components and surface slope maps on the configured grids; also
// exercises the grid import path when experiment.field.grid_csv is set.
nlohmann::json cmd_field(const config::RunConfig& cfg,
                         const std::filesystem::path& out_dir);

// Lock-in PL contrast against the B0 offset for on- and off-cavity drive;
// optional transverse scan of the integrated contrast.
nlohmann::json cmd_apr(const config::RunConfig& cfg,
                       const std::filesystem::path& out_dir);

// Ensemble Autler-Townes spectra per power with extracted splittings; for
// power sweeps also the sqrt(P) fit, for species sweeps the ratio report.
nlohmann::json cmd_autler_townes(const config::RunConfig& cfg,
                                 const std::filesystem::path& out_dir);

// Ensemble-averaged mechanical Rabi trace plus a single-spin companion.
nlohmann::json cmd_rabi(const config::RunConfig& cfg,
                        const std::filesystem::path& out_dir);

// Spatial map of the fitted Autler-Townes splitting: transverse (Gaussian
// fit), longitudinal (FFT + modulation metric) or 2d.
nlohmann::json cmd_map(const config::RunConfig& cfg,
                       const std::filesystem::path& out_dir);

}  // namespace sawspin::experiments
