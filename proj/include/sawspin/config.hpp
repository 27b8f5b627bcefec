#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sawspin/acoustics.hpp"
#include "sawspin/ensemble.hpp"
#include "sawspin/spin_core.hpp"

// JSON run configuration: schema-validated, unknown keys rejected, every
// quantity carries its unit in the key name (GHz, MHz/G, um, mW, G).

namespace sawspin::config {

struct GConfig {
  double g11_ghz = 0.0, g12_ghz = 0.0, g13_ghz = 0.0;
  double g14_ghz = 0.0, g33_ghz = 0.0, g44_ghz = 0.0;

  spin::GTensorC3v to_hz() const;
};

struct SpeciesConfig {
  double d0_ghz = 0.0;
  double gamma_mhz_per_g = 2.8;
  int contrast_sign = +1;
  GConfig g;
};

struct MaterialConfig {
  double v_l_m_s = 0.0;
  double v_t_m_s = 0.0;
  std::optional<double> v_r_m_s;

  acoustics::MaterialAcoustics to_acoustics() const;
};

struct CavityConfig {
  double lambda_um = 12.0;
  double w0_um = 24.0;
  double omega_m_mhz = 559.6;  // resonance frequency omega_m / 2 pi
  double q_loaded = 16000.0;
  double strain_per_sqrt_watt = 8e-4;
  bool include_divergence = false;

  acoustics::GaussianCavityMode mode() const;
  acoustics::PowerCalibration calibration() const;
};

struct DepthConfig {
  ensemble::DepthKind kind = ensemble::DepthKind::uniform_layer;
  double z_min_um = 0.0;
  double z_max_um = 18.0;
  double z_mean_um = 0.0;
  double z_sigma_um = 0.0;
};

struct EnsembleConfig {
  double psf_fwhm_um = 1.0;
  DepthConfig depth;
  double detuning_fwhm_mhz = 1.0;
  int n_samples = 2000;

  ensemble::EnsembleModel model(std::uint64_t seed) const;
};

struct AtExperimentConfig {
  std::vector<std::string> species = {"kk"};
  std::vector<double> power_mw = {400.0};
  double probe_span_mhz = 12.0;
  int probe_points = 241;
  double probe_rabi_mhz = 0.2;
  double linewidth_mhz = 0.2;       // intrinsic single-spin line (FWHM)
  double mech_detuning_mhz = 0.0;
  double laser_x_um = 0.0;
  double laser_y_um = 0.0;
  bool single_spin = false;         // skip ensemble averaging
};

struct RabiExperimentConfig {
  std::string species = "kk";
  std::vector<double> power_mw = {400.0};
  double tau_max_us = 1.25;
  int tau_points = 251;
  double pi_rabi_mhz = 1.0;
  bool instantaneous_pi = false;
  double mech_detuning_mhz = 0.0;
  double laser_x_um = 0.0;
  double laser_y_um = 0.0;
};

struct AprExperimentConfig {
  std::vector<std::string> species = {"kk"};
  double power_mw = 32.0;
  double db0_span_g = 3.0;
  int db0_points = 61;
  double modulation_depth_g = 5.0;
  double pump_us = 20.0;
  double probe_us = 20.0;
  double off_cavity_offset_mhz = 2.0;
  double residual_magnetic_rabi_mhz = 0.0;
  std::string device_orientation = "y";  // SAW propagation axis in crystal frame
  bool transverse_scan = false;
  double scan_y_span_um = 120.0;
  int scan_points = 41;
};

struct MapExperimentConfig {
  std::string species = "kk";
  double power_mw = 400.0;
  std::string direction = "longitudinal";  // longitudinal | transverse | 2d
  double x_span_um = 36.0;
  int x_points = 73;
  double y_span_um = 58.0;
  int y_points = 59;
  bool equalize_channels = false;  // rescale g14 so both channel maxima match
  double modulation_window_um = 18.0;  // interior |x| window for the metric
};

struct FieldExperimentConfig {
  double x_span_um = 30.0;
  int x_points = 121;
  double z_max_um = 24.0;
  int z_points = 97;
  double y_span_um = 60.0;
  int y_points = 81;
  bool standing = true;
  std::string grid_csv;  // optional import path replacing the analytic field
};

struct RunConfig {
  std::uint64_t rng_seed = 1;
  std::map<std::string, SpeciesConfig> species;
  MaterialConfig material;
  CavityConfig cavity;
  EnsembleConfig ensemble;
  AtExperimentConfig autler_townes;
  RabiExperimentConfig rabi;
  AprExperimentConfig apr;
  MapExperimentConfig map;
  FieldExperimentConfig field;

  const SpeciesConfig& species_or_throw(const std::string& name) const;
  spin::DefectSpecies resolve_species(const std::string& name) const;
};

// Built-in defaults: the device values of the modeled experiments and
// placeholder G sets calibrated to the measured per-species drive rates.
RunConfig default_config();

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& c);

// FNV-1a 64-bit hash of the canonical (sorted-key) JSON serialization.
std::string config_hash(const RunConfig& c);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace sawspin::config
