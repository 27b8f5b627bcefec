#include "sawspin/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "sawspin/errors.hpp"

namespace sawspin::config {

namespace {

using nlohmann::json;

// Strict object reader: every key must be consumed, leftovers are rejected
// with their full path.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw config_error("config field '" + path_ + "' must be an object");
    }
  }

  ~ObjectReader() = default;

  bool has(const std::string& key) {
    return j_.contains(key);
  }

  const json* take(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      return nullptr;
    }
    return &j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number()) {
      throw config_error("config field '" + path_ + "." + key +
                         "' must be a number");
    }
    return v->get<double>();
  }

  double required_number(const std::string& key) {
    const json* v = take(key);
    if (!v) {
      throw config_error("config field '" + path_ + "." + key +
                         "' is required");
    }
    if (!v->is_number()) {
      throw config_error("config field '" + path_ + "." + key +
                         "' must be a number");
    }
    return v->get<double>();
  }

  int integer(const std::string& key, int fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) {
      throw config_error("config field '" + path_ + "." + key +
                         "' must be an integer");
    }
    return v->get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      throw config_error("config field '" + path_ + "." + key +
                         "' must be a boolean");
    }
    return v->get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_string()) {
      throw config_error("config field '" + path_ + "." + key +
                         "' must be a string");
    }
    return v->get<std::string>();
  }

  std::vector<std::string> string_or_list(const std::string& key,
                                          std::vector<std::string> fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (v->is_string()) {
      return {v->get<std::string>()};
    }
    if (v->is_array()) {
      std::vector<std::string> out;
      for (const json& e : *v) {
        if (!e.is_string()) {
          throw config_error("config field '" + path_ + "." + key +
                             "' must hold strings");
        }
        out.push_back(e.get<std::string>());
      }
      if (out.empty()) {
        throw config_error("config field '" + path_ + "." + key +
                           "' must not be empty");
      }
      return out;
    }
    throw config_error("config field '" + path_ + "." + key +
                       "' must be a string or list of strings");
  }

  std::vector<double> number_or_list(const std::string& key,
                                     std::vector<double> fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (v->is_number()) {
      return {v->get<double>()};
    }
    if (v->is_array()) {
      std::vector<double> out;
      for (const json& e : *v) {
        if (!e.is_number()) {
          throw config_error("config field '" + path_ + "." + key +
                             "' must hold numbers");
        }
        out.push_back(e.get<double>());
      }
      if (out.empty()) {
        throw config_error("config field '" + path_ + "." + key +
                           "' must not be empty");
      }
      return out;
    }
    throw config_error("config field '" + path_ + "." + key +
                       "' must be a number or list of numbers");
  }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) {
        throw config_error("unknown config field '" + path_ + "." + it.key() +
                           "'");
      }
    }
  }

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

GConfig parse_g(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  GConfig g;
  g.g11_ghz = r.number("g11_ghz", 0.0);
  g.g12_ghz = r.number("g12_ghz", 0.0);
  g.g13_ghz = r.number("g13_ghz", 0.0);
  g.g14_ghz = r.number("g14_ghz", 0.0);
  g.g33_ghz = r.number("g33_ghz", 0.0);
  g.g44_ghz = r.number("g44_ghz", 0.0);
  r.finish();
  return g;
}

SpeciesConfig parse_species(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SpeciesConfig s;
  s.d0_ghz = r.required_number("d0_ghz");
  s.gamma_mhz_per_g = r.number("gamma_mhz_per_g", 2.8);
  s.contrast_sign = r.integer("contrast_sign", +1);
  if (const json* g = r.take("g")) {
    s.g = parse_g(*g, path + ".g");
  }
  if (!(s.d0_ghz > 0.0)) {
    throw config_error("config field '" + path + ".d0_ghz' must be > 0");
  }
  if (!(s.gamma_mhz_per_g > 0.0)) {
    throw config_error("config field '" + path +
                       ".gamma_mhz_per_g' must be > 0");
  }
  if (s.contrast_sign != 1 && s.contrast_sign != -1) {
    throw config_error("config field '" + path +
                       ".contrast_sign' must be +1 or -1");
  }
  r.finish();
  return s;
}

}  // namespace

spin::GTensorC3v GConfig::to_hz() const {
  spin::GTensorC3v g;
  g.g11 = g11_ghz * 1e9;
  g.g12 = g12_ghz * 1e9;
  g.g13 = g13_ghz * 1e9;
  g.g14 = g14_ghz * 1e9;
  g.g33 = g33_ghz * 1e9;
  g.g44 = g44_ghz * 1e9;
  return g;
}

acoustics::MaterialAcoustics MaterialConfig::to_acoustics() const {
  acoustics::MaterialAcoustics m;
  m.v_l_m_s = v_l_m_s;
  m.v_t_m_s = v_t_m_s;
  m.v_r_m_s = v_r_m_s;
  return m;
}

acoustics::GaussianCavityMode CavityConfig::mode() const {
  acoustics::GaussianCavityMode m;
  m.wavelength_m = lambda_um * 1e-6;
  m.waist_m = w0_um * 1e-6;
  m.omega_m_rad_s = 2.0 * std::numbers::pi * omega_m_mhz * 1e6;
  m.q_loaded = q_loaded;
  m.include_divergence = include_divergence;
  return m;
}

acoustics::PowerCalibration CavityConfig::calibration() const {
  acoustics::PowerCalibration cal;
  cal.strain_per_sqrt_watt = strain_per_sqrt_watt;
  cal.reference_power_w = 1.0;
  return cal;
}

ensemble::EnsembleModel EnsembleConfig::model(std::uint64_t seed) const {
  ensemble::EnsembleModel m;
  m.psf_fwhm_m = psf_fwhm_um * 1e-6;
  m.depth_kind = depth.kind;
  m.z_min_m = depth.z_min_um * 1e-6;
  m.z_max_m = depth.z_max_um * 1e-6;
  m.z_mean_m = depth.z_mean_um * 1e-6;
  m.z_sigma_m = depth.z_sigma_um * 1e-6;
  m.detuning_fwhm_hz = detuning_fwhm_mhz * 1e6;
  m.n_samples = n_samples;
  m.rng_seed = seed;
  return m;
}

const SpeciesConfig& RunConfig::species_or_throw(const std::string& name) const {
  const auto it = species.find(name);
  if (it == species.end()) {
    throw config_error("config species '" + name + "' is not defined");
  }
  return it->second;
}

spin::DefectSpecies RunConfig::resolve_species(const std::string& name) const {
  const SpeciesConfig& sc = species_or_throw(name);
  spin::DefectSpecies s;
  s.name = name;
  s.kind = name == "hh"    ? spin::SpeciesKind::hh
           : name == "kk"  ? spin::SpeciesKind::kk
           : name == "PL6" ? spin::SpeciesKind::pl6
                           : spin::SpeciesKind::custom;
  s.d0_ghz = sc.d0_ghz;
  s.gamma_mhz_per_g = sc.gamma_mhz_per_g;
  s.contrast_sign = sc.contrast_sign;
  s.g_params = sc.g.to_hz();
  return s;
}

RunConfig default_config() {
  RunConfig c;
  c.rng_seed = 1;

  // Placeholder coupling sets: magnitudes chosen so the shipped cavity and
  // power calibration reproduce the measured per-species drive rates
  // (kk : hh : PL6 = 4.0 : 1.1 : 3.4 for dm2, kk : hh = 0.89 for dm1).
  SpeciesConfig kk;
  kk.d0_ghz = 1.305;
  kk.gamma_mhz_per_g = 2.8;
  kk.contrast_sign = +1;
  kk.g.g11_ghz = 12.0;
  kk.g.g12_ghz = -4.0;
  kk.g.g13_ghz = 2.0;
  kk.g.g14_ghz = 4.0;
  kk.g.g33_ghz = 10.0;
  kk.g.g44_ghz = 20.0;

  SpeciesConfig hh = kk;
  hh.d0_ghz = 1.336;
  hh.contrast_sign = -1;
  const double dm2_hh = 1.1 / 4.0;
  hh.g.g11_ghz = kk.g.g11_ghz * dm2_hh;
  hh.g.g12_ghz = kk.g.g12_ghz * dm2_hh;
  hh.g.g14_ghz = kk.g.g14_ghz * dm2_hh;
  hh.g.g44_ghz = kk.g.g44_ghz / 0.89;

  SpeciesConfig pl6 = kk;
  pl6.d0_ghz = 1.365;
  pl6.contrast_sign = +1;
  const double dm2_pl6 = 3.4 / 4.0;
  pl6.g.g11_ghz = kk.g.g11_ghz * dm2_pl6;
  pl6.g.g12_ghz = kk.g.g12_ghz * dm2_pl6;
  pl6.g.g14_ghz = kk.g.g14_ghz * dm2_pl6;

  c.species["kk"] = kk;
  c.species["hh"] = hh;
  c.species["PL6"] = pl6;

  // solve_rayleigh_velocity returns 6830 m/s for these bulk velocities
  c.material.v_l_m_s = 13100.0;
  c.material.v_t_m_s = 7409.3;

  c.cavity.lambda_um = 12.0;
  c.cavity.w0_um = 24.0;
  c.cavity.omega_m_mhz = 559.6;
  c.cavity.q_loaded = 16000.0;
  c.cavity.strain_per_sqrt_watt = 8.0e-4;
  c.cavity.include_divergence = false;

  c.ensemble.psf_fwhm_um = 1.0;
  c.ensemble.depth.kind = ensemble::DepthKind::uniform_layer;
  c.ensemble.depth.z_min_um = 0.0;
  c.ensemble.depth.z_max_um = 18.0;
  c.ensemble.detuning_fwhm_mhz = 1.0;
  c.ensemble.n_samples = 2000;

  return c;
}

namespace {

DepthConfig parse_depth(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  DepthConfig d;
  const std::string kind = r.text("kind", "uniform_layer");
  if (kind == "uniform_layer") {
    d.kind = ensemble::DepthKind::uniform_layer;
  } else if (kind == "gaussian") {
    d.kind = ensemble::DepthKind::gaussian;
  } else {
    throw config_error("config field '" + path +
                       ".kind' must be 'uniform_layer' or 'gaussian'");
  }
  d.z_min_um = r.number("z_min_um", 0.0);
  d.z_max_um = r.number("z_max_um", 18.0);
  d.z_mean_um = r.number("z_mean_um", 0.0);
  d.z_sigma_um = r.number("z_sigma_um", 0.0);
  r.finish();
  return d;
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig c = default_config();
  ObjectReader root(j, "config");

  if (const json* v = root.take("rng_seed")) {
    if (!v->is_number_unsigned()) {
      throw config_error("config field 'config.rng_seed' must be a "
                         "non-negative integer");
    }
    c.rng_seed = v->get<std::uint64_t>();
  }

  if (const json* v = root.take("species")) {
    if (!v->is_object()) {
      throw config_error("config field 'config.species' must be an object");
    }
    c.species.clear();
    for (auto it = v->begin(); it != v->end(); ++it) {
      c.species[it.key()] =
          parse_species(it.value(), "config.species." + it.key());
    }
    if (c.species.empty()) {
      throw config_error("config field 'config.species' must not be empty");
    }
  }

  if (const json* v = root.take("material")) {
    ObjectReader r(*v, "config.material");
    c.material.v_l_m_s = r.number("v_l_m_s", c.material.v_l_m_s);
    c.material.v_t_m_s = r.number("v_t_m_s", c.material.v_t_m_s);
    if (r.has("v_r_m_s")) {
      c.material.v_r_m_s = r.number("v_r_m_s", 0.0);
      if (!(*c.material.v_r_m_s > 0.0)) {
        throw config_error("config field 'config.material.v_r_m_s' must be > 0");
      }
    }
    r.finish();
    if (!(c.material.v_t_m_s > 0.0) || !(c.material.v_l_m_s > 0.0)) {
      throw config_error(
          "config field 'config.material.v_t_m_s' and 'v_l_m_s' must be > 0");
    }
    if (!c.material.v_r_m_s && c.material.v_t_m_s >= c.material.v_l_m_s) {
      throw config_error(
          "config field 'config.material.v_t_m_s' must be smaller than "
          "'config.material.v_l_m_s'");
    }
  }

  if (const json* v = root.take("cavity")) {
    ObjectReader r(*v, "config.cavity");
    c.cavity.lambda_um = r.number("lambda_um", c.cavity.lambda_um);
    c.cavity.w0_um = r.number("w0_um", c.cavity.w0_um);
    c.cavity.omega_m_mhz = r.number("omega_m_mhz", c.cavity.omega_m_mhz);
    c.cavity.q_loaded = r.number("q_loaded", c.cavity.q_loaded);
    c.cavity.strain_per_sqrt_watt =
        r.number("strain_per_sqrt_watt", c.cavity.strain_per_sqrt_watt);
    c.cavity.include_divergence =
        r.boolean("include_divergence", c.cavity.include_divergence);
    r.finish();
    if (!(c.cavity.lambda_um > 0.0) || !(c.cavity.w0_um > 0.0)) {
      throw config_error(
          "config fields 'config.cavity.lambda_um' and 'w0_um' must be > 0");
    }
    if (!(c.cavity.omega_m_mhz > 0.0) || !(c.cavity.q_loaded > 0.0)) {
      throw config_error(
          "config fields 'config.cavity.omega_m_mhz' and 'q_loaded' must be "
          "> 0");
    }
    if (!(c.cavity.strain_per_sqrt_watt >= 0.0)) {
      throw config_error(
          "config field 'config.cavity.strain_per_sqrt_watt' must be >= 0");
    }
  }

  if (const json* v = root.take("ensemble")) {
    ObjectReader r(*v, "config.ensemble");
    c.ensemble.psf_fwhm_um = r.number("psf_fwhm_um", c.ensemble.psf_fwhm_um);
    if (const json* d = r.take("depth")) {
      c.ensemble.depth = parse_depth(*d, "config.ensemble.depth");
    }
    c.ensemble.detuning_fwhm_mhz =
        r.number("detuning_fwhm_mhz", c.ensemble.detuning_fwhm_mhz);
    c.ensemble.n_samples = r.integer("n_samples", c.ensemble.n_samples);
    r.finish();
    if (c.ensemble.n_samples < 1) {
      throw config_error("config field 'config.ensemble.n_samples' must be >= 1");
    }
    if (c.ensemble.psf_fwhm_um < 0.0) {
      throw config_error(
          "config field 'config.ensemble.psf_fwhm_um' must be >= 0");
    }
  }

  if (const json* v = root.take("experiment")) {
    ObjectReader r(*v, "config.experiment");
    if (const json* e = r.take("autler_townes")) {
      ObjectReader a(*e, "config.experiment.autler_townes");
      auto& at = c.autler_townes;
      at.species = a.string_or_list("species", at.species);
      at.power_mw = a.number_or_list("power_mw", at.power_mw);
      at.probe_span_mhz = a.number("probe_span_mhz", at.probe_span_mhz);
      at.probe_points = a.integer("probe_points", at.probe_points);
      at.probe_rabi_mhz = a.number("probe_rabi_mhz", at.probe_rabi_mhz);
      at.linewidth_mhz = a.number("linewidth_mhz", at.linewidth_mhz);
      at.mech_detuning_mhz = a.number("mech_detuning_mhz", at.mech_detuning_mhz);
      at.laser_x_um = a.number("laser_x_um", at.laser_x_um);
      at.laser_y_um = a.number("laser_y_um", at.laser_y_um);
      at.single_spin = a.boolean("single_spin", at.single_spin);
      a.finish();
      if (at.probe_points < 2 || !(at.probe_span_mhz > 0.0)) {
        throw config_error(
            "config.experiment.autler_townes probe grid is invalid");
      }
      for (double p : at.power_mw) {
        if (p < 0.0) {
          throw config_error(
              "config field 'config.experiment.autler_townes.power_mw' must "
              "be >= 0");
        }
      }
    }
    if (const json* e = r.take("rabi")) {
      ObjectReader a(*e, "config.experiment.rabi");
      auto& rb = c.rabi;
      rb.species = a.text("species", rb.species);
      rb.power_mw = a.number_or_list("power_mw", rb.power_mw);
      rb.tau_max_us = a.number("tau_max_us", rb.tau_max_us);
      rb.tau_points = a.integer("tau_points", rb.tau_points);
      rb.pi_rabi_mhz = a.number("pi_rabi_mhz", rb.pi_rabi_mhz);
      rb.instantaneous_pi = a.boolean("instantaneous_pi", rb.instantaneous_pi);
      rb.mech_detuning_mhz = a.number("mech_detuning_mhz", rb.mech_detuning_mhz);
      rb.laser_x_um = a.number("laser_x_um", rb.laser_x_um);
      rb.laser_y_um = a.number("laser_y_um", rb.laser_y_um);
      a.finish();
      if (rb.tau_points < 2 || !(rb.tau_max_us > 0.0)) {
        throw config_error("config.experiment.rabi tau grid is invalid");
      }
      if (!rb.instantaneous_pi && !(rb.pi_rabi_mhz > 0.0)) {
        throw config_error(
            "config field 'config.experiment.rabi.pi_rabi_mhz' must be > 0");
      }
    }
    if (const json* e = r.take("apr")) {
      ObjectReader a(*e, "config.experiment.apr");
      auto& apr = c.apr;
      apr.species = a.string_or_list("species", apr.species);
      apr.power_mw = a.number("power_mw", apr.power_mw);
      apr.db0_span_g = a.number("db0_span_g", apr.db0_span_g);
      apr.db0_points = a.integer("db0_points", apr.db0_points);
      apr.modulation_depth_g = a.number("modulation_depth_g", apr.modulation_depth_g);
      apr.pump_us = a.number("pump_us", apr.pump_us);
      apr.probe_us = a.number("probe_us", apr.probe_us);
      apr.off_cavity_offset_mhz =
          a.number("off_cavity_offset_mhz", apr.off_cavity_offset_mhz);
      apr.residual_magnetic_rabi_mhz =
          a.number("residual_magnetic_rabi_mhz", apr.residual_magnetic_rabi_mhz);
      apr.device_orientation =
          a.text("device_orientation", apr.device_orientation);
      apr.transverse_scan = a.boolean("transverse_scan", apr.transverse_scan);
      apr.scan_y_span_um = a.number("scan_y_span_um", apr.scan_y_span_um);
      apr.scan_points = a.integer("scan_points", apr.scan_points);
      a.finish();
      if (apr.device_orientation != "x" && apr.device_orientation != "y") {
        throw config_error(
            "config field 'config.experiment.apr.device_orientation' must be "
            "'x' or 'y'");
      }
      if (apr.db0_points < 2 || !(apr.db0_span_g > 0.0)) {
        throw config_error("config.experiment.apr field scan is invalid");
      }
      if (apr.power_mw < 0.0) {
        throw config_error(
            "config field 'config.experiment.apr.power_mw' must be >= 0");
      }
    }
    if (const json* e = r.take("map")) {
      ObjectReader a(*e, "config.experiment.map");
      auto& mp = c.map;
      mp.species = a.text("species", mp.species);
      mp.power_mw = a.number("power_mw", mp.power_mw);
      mp.direction = a.text("direction", mp.direction);
      mp.x_span_um = a.number("x_span_um", mp.x_span_um);
      mp.x_points = a.integer("x_points", mp.x_points);
      mp.y_span_um = a.number("y_span_um", mp.y_span_um);
      mp.y_points = a.integer("y_points", mp.y_points);
      mp.equalize_channels = a.boolean("equalize_channels", mp.equalize_channels);
      mp.modulation_window_um =
          a.number("modulation_window_um", mp.modulation_window_um);
      a.finish();
      if (mp.direction != "transverse" && mp.direction != "longitudinal" &&
          mp.direction != "2d") {
        throw config_error(
            "config field 'config.experiment.map.direction' must be "
            "'transverse', 'longitudinal' or '2d'");
      }
    }
    if (const json* e = r.take("field")) {
      ObjectReader a(*e, "config.experiment.field");
      auto& f = c.field;
      f.x_span_um = a.number("x_span_um", f.x_span_um);
      f.x_points = a.integer("x_points", f.x_points);
      f.z_max_um = a.number("z_max_um", f.z_max_um);
      f.z_points = a.integer("z_points", f.z_points);
      f.y_span_um = a.number("y_span_um", f.y_span_um);
      f.y_points = a.integer("y_points", f.y_points);
      f.standing = a.boolean("standing", f.standing);
      f.grid_csv = a.text("grid_csv", f.grid_csv);
      a.finish();
      if (f.x_points < 2 || f.z_points < 2 || f.y_points < 2) {
        throw config_error("config.experiment.field grids need >= 2 points");
      }
    }
    r.finish();
  }

  root.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("cannot open config file '" + path.string() + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw config_error("config file '" + path.string() +
                       "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["rng_seed"] = c.rng_seed;
  for (const auto& [name, s] : c.species) {
    json g;
    g["g11_ghz"] = s.g.g11_ghz;
    g["g12_ghz"] = s.g.g12_ghz;
    g["g13_ghz"] = s.g.g13_ghz;
    g["g14_ghz"] = s.g.g14_ghz;
    g["g33_ghz"] = s.g.g33_ghz;
    g["g44_ghz"] = s.g.g44_ghz;
    json sp;
    sp["d0_ghz"] = s.d0_ghz;
    sp["gamma_mhz_per_g"] = s.gamma_mhz_per_g;
    sp["contrast_sign"] = s.contrast_sign;
    sp["g"] = g;
    j["species"][name] = sp;
  }
  j["material"]["v_l_m_s"] = c.material.v_l_m_s;
  j["material"]["v_t_m_s"] = c.material.v_t_m_s;
  if (c.material.v_r_m_s) {
    j["material"]["v_r_m_s"] = *c.material.v_r_m_s;
  }
  auto& cav = j["cavity"];
  cav["lambda_um"] = c.cavity.lambda_um;
  cav["w0_um"] = c.cavity.w0_um;
  cav["omega_m_mhz"] = c.cavity.omega_m_mhz;
  cav["q_loaded"] = c.cavity.q_loaded;
  cav["strain_per_sqrt_watt"] = c.cavity.strain_per_sqrt_watt;
  cav["include_divergence"] = c.cavity.include_divergence;
  auto& ens = j["ensemble"];
  ens["psf_fwhm_um"] = c.ensemble.psf_fwhm_um;
  ens["depth"]["kind"] = c.ensemble.depth.kind == ensemble::DepthKind::gaussian
                             ? "gaussian"
                             : "uniform_layer";
  ens["depth"]["z_min_um"] = c.ensemble.depth.z_min_um;
  ens["depth"]["z_max_um"] = c.ensemble.depth.z_max_um;
  ens["depth"]["z_mean_um"] = c.ensemble.depth.z_mean_um;
  ens["depth"]["z_sigma_um"] = c.ensemble.depth.z_sigma_um;
  ens["detuning_fwhm_mhz"] = c.ensemble.detuning_fwhm_mhz;
  ens["n_samples"] = c.ensemble.n_samples;

  auto& at = j["experiment"]["autler_townes"];
  at["species"] = c.autler_townes.species;
  at["power_mw"] = c.autler_townes.power_mw;
  at["probe_span_mhz"] = c.autler_townes.probe_span_mhz;
  at["probe_points"] = c.autler_townes.probe_points;
  at["probe_rabi_mhz"] = c.autler_townes.probe_rabi_mhz;
  at["linewidth_mhz"] = c.autler_townes.linewidth_mhz;
  at["mech_detuning_mhz"] = c.autler_townes.mech_detuning_mhz;
  at["laser_x_um"] = c.autler_townes.laser_x_um;
  at["laser_y_um"] = c.autler_townes.laser_y_um;
  at["single_spin"] = c.autler_townes.single_spin;

  auto& rb = j["experiment"]["rabi"];
  rb["species"] = c.rabi.species;
  rb["power_mw"] = c.rabi.power_mw;
  rb["tau_max_us"] = c.rabi.tau_max_us;
  rb["tau_points"] = c.rabi.tau_points;
  rb["pi_rabi_mhz"] = c.rabi.pi_rabi_mhz;
  rb["instantaneous_pi"] = c.rabi.instantaneous_pi;
  rb["mech_detuning_mhz"] = c.rabi.mech_detuning_mhz;
  rb["laser_x_um"] = c.rabi.laser_x_um;
  rb["laser_y_um"] = c.rabi.laser_y_um;

  auto& apr = j["experiment"]["apr"];
  apr["species"] = c.apr.species;
  apr["power_mw"] = c.apr.power_mw;
  apr["db0_span_g"] = c.apr.db0_span_g;
  apr["db0_points"] = c.apr.db0_points;
  apr["modulation_depth_g"] = c.apr.modulation_depth_g;
  apr["pump_us"] = c.apr.pump_us;
  apr["probe_us"] = c.apr.probe_us;
  apr["off_cavity_offset_mhz"] = c.apr.off_cavity_offset_mhz;
  apr["residual_magnetic_rabi_mhz"] = c.apr.residual_magnetic_rabi_mhz;
  apr["device_orientation"] = c.apr.device_orientation;
  apr["transverse_scan"] = c.apr.transverse_scan;
  apr["scan_y_span_um"] = c.apr.scan_y_span_um;
  apr["scan_points"] = c.apr.scan_points;

  auto& mp = j["experiment"]["map"];
  mp["species"] = c.map.species;
  mp["power_mw"] = c.map.power_mw;
  mp["direction"] = c.map.direction;
  mp["x_span_um"] = c.map.x_span_um;
  mp["x_points"] = c.map.x_points;
  mp["y_span_um"] = c.map.y_span_um;
  mp["y_points"] = c.map.y_points;
  mp["equalize_channels"] = c.map.equalize_channels;
  mp["modulation_window_um"] = c.map.modulation_window_um;

  auto& f = j["experiment"]["field"];
  f["x_span_um"] = c.field.x_span_um;
  f["x_points"] = c.field.x_points;
  f["z_max_um"] = c.field.z_max_um;
  f["z_points"] = c.field.z_points;
  f["y_span_um"] = c.field.y_span_um;
  f["y_points"] = c.field.y_points;
  f["standing"] = c.field.standing;
  f["grid_csv"] = c.field.grid_csv;

  return j;
}

std::string config_hash(const RunConfig& c) {
  const std::string dump = to_json(c).dump();
  // FNV-1a 64 bit
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace sawspin::config
