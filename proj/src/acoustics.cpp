#include "sawspin/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "sawspin/errors.hpp"

namespace sawspin::acoustics {

namespace {

double secular_residual(double xi, double vt_over_vl) {
  const double a = 2.0 - xi * xi;
  return a * a - 4.0 * std::sqrt(1.0 - xi * xi * vt_over_vl * vt_over_vl) *
                     std::sqrt(1.0 - xi * xi);
}

}  // namespace

double solve_rayleigh_velocity(const MaterialAcoustics& m) {
  if (!(m.v_t_m_s > 0.0) || !(m.v_l_m_s > 0.0)) {
    throw config_error("material velocities must be positive");
  }
  if (m.v_t_m_s >= m.v_l_m_s) {
    throw config_error(
        "material.v_t_m_s must be smaller than material.v_l_m_s (no Rayleigh "
        "root otherwise)");
  }
  const double r = m.v_t_m_s / m.v_l_m_s;
  // R(xi) < 0 for small xi > 0 and R(1) = 1 > 0: unique sign change.
  double lo = 1e-6;
  double hi = 1.0;
  if (!(secular_residual(lo, r) < 0.0)) {
    throw numeric_error("Rayleigh secular equation not bracketed");
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (secular_residual(mid, r) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) * m.v_t_m_s;
}

RayleighWave::RayleighWave(const RayleighWaveParams& p,
                           const MaterialAcoustics& m)
    : params_(p) {
  if (!(p.wavelength_m > 0.0)) {
    throw config_error("wavelength must be positive");
  }
  v_r_ = m.v_r_m_s ? *m.v_r_m_s : solve_rayleigh_velocity(m);
  if (!(v_r_ > 0.0) || v_r_ >= m.v_t_m_s) {
    throw config_error("Rayleigh velocity must satisfy 0 < v_r < v_t");
  }
  k_ = 2.0 * std::numbers::pi / p.wavelength_m;
  omega_ = v_r_ * k_;
  const double rl = v_r_ / m.v_l_m_s;
  const double rt = v_r_ / m.v_t_m_s;
  q_ = k_ * std::sqrt(1.0 - rl * rl);
  s_ = k_ * std::sqrt(1.0 - rt * rt);
  beta_x_ = 2.0 * q_ * s_ / (s_ * s_ + k_ * k_);
  beta_z_ = 2.0 * k_ * k_ / (s_ * s_ + k_ * k_);
  // |u_z(z=0)| = q |A| |1 - beta_z| = surface amplitude
  amp_ = params_.surface_amplitude_m / (q_ * std::abs(1.0 - beta_z_));
}

Displacement RayleighWave::displacement(double x, double z,
                                        double phase) const {
  if (z < 0.0) {
    throw numeric_error("Rayleigh field evaluated above the surface (z < 0)");
  }
  const double fx = std::exp(-q_ * z) - beta_x_ * std::exp(-s_ * z);
  const double fz = std::exp(-q_ * z) - beta_z_ * std::exp(-s_ * z);
  const double theta = k_ * x - phase;
  Displacement d;
  d.ux = -k_ * amp_ * fx * std::sin(theta);
  d.uz = -q_ * amp_ * fz * std::cos(theta);
  return d;
}

spin::StrainTensor RayleighWave::strain(double x, double z,
                                        double phase) const {
  if (z < 0.0) {
    throw numeric_error("Rayleigh field evaluated above the surface (z < 0)");
  }
  const double eq = std::exp(-q_ * z);
  const double es = std::exp(-s_ * z);
  const double fx = eq - beta_x_ * es;
  const double fz = eq - beta_z_ * es;
  const double dfx = -q_ * eq + beta_x_ * s_ * es;
  const double dfz = -q_ * eq + beta_z_ * s_ * es;
  const double theta = k_ * x - phase;

  spin::StrainTensor e;
  e.exx = -k_ * k_ * amp_ * fx * std::cos(theta);
  e.ezz = -q_ * amp_ * dfz * std::cos(theta);
  e.exz = 0.5 * k_ * amp_ * (q_ * fz - dfx) * std::sin(theta);
  return e;
}

Displacement RayleighWave::standing_displacement(double x, double z,
                                                 double phase) const {
  // +x wave plus its x -> -x mirror image
  const Displacement fwd = displacement(x, z, phase);
  const Displacement bwd = displacement(-x, z, phase);
  return {fwd.ux - bwd.ux, fwd.uz + bwd.uz};
}

spin::StrainTensor RayleighWave::standing_strain(double x, double z,
                                                 double phase) const {
  const spin::StrainTensor fwd = strain(x, z, phase);
  const spin::StrainTensor bwd = strain(-x, z, phase);
  spin::StrainTensor e;
  e.exx = fwd.exx + bwd.exx;
  e.ezz = fwd.ezz + bwd.ezz;
  e.exz = fwd.exz - bwd.exz;
  return e;
}

namespace {

double beam_width(double x, const GaussianCavityMode& mode) {
  if (!mode.include_divergence) {
    return mode.waist_m;
  }
  const double x_r =
      std::numbers::pi * mode.waist_m * mode.waist_m / mode.wavelength_m;
  return mode.waist_m * std::sqrt(1.0 + (x / x_r) * (x / x_r));
}

}  // namespace

double gaussian_envelope(double y, double x, const GaussianCavityMode& mode) {
  const double w = beam_width(x, mode);
  return std::exp(-y * y / (w * w));
}

double mode_amplitude(double y, double x, const GaussianCavityMode& mode) {
  const double w = beam_width(x, mode);
  return std::sqrt(mode.waist_m / w) * std::exp(-y * y / (w * w));
}

double envelope_fwhm(const GaussianCavityMode& mode) {
  return 2.0 * mode.waist_m * std::sqrt(std::numbers::ln2);
}

double amplitude_from_power(const PowerCalibration& cal, double p_watts) {
  if (p_watts < 0.0) {
    throw config_error("power must be non-negative");
  }
  return cal.strain_per_sqrt_watt * std::sqrt(p_watts);
}

double cavity_time_constant(const GaussianCavityMode& mode) {
  return 2.0 * mode.q_loaded / mode.omega_m_rad_s;
}

double cavity_ring_up(double t, const GaussianCavityMode& mode,
                      double steady_scale) {
  return steady_scale * (1.0 - std::exp(-t / cavity_time_constant(mode)));
}

double cavity_ring_down(double t, const GaussianCavityMode& mode,
                        double steady_scale) {
  return steady_scale * std::exp(-t / cavity_time_constant(mode));
}

double cavity_response(const GaussianCavityMode& mode, double detuning_hz) {
  const double f_m =
      mode.omega_m_rad_s / (2.0 * std::numbers::pi);
  const double x = 2.0 * mode.q_loaded * detuning_hz / f_m;
  return 1.0 / std::sqrt(1.0 + x * x);
}

AnalyticStandingField::AnalyticStandingField(const RayleighWave& wave,
                                             const GaussianCavityMode& mode,
                                             double peak_scale)
    : wave_(wave), mode_(mode), scale_(peak_scale) {
  // signed normalization: eps_xx at the surface antinode (0,0) and phase 0
  // equals +peak_scale
  const double ref = wave_.standing_strain(0.0, 0.0, 0.0).exx;
  if (ref == 0.0) {
    throw numeric_error("standing wave has zero surface strain");
  }
  norm_ = 1.0 / ref;
}

spin::StrainTensor AnalyticStandingField::strain(double x, double y, double z,
                                                 double phase) const {
  spin::StrainTensor e = wave_.standing_strain(x, z, phase);
  const double a = scale_ * norm_ * mode_amplitude(y, x, mode_);
  e.exx *= a;
  e.ezz *= a;
  e.exz *= a;
  return e;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

GridStrainField import_strain_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("cannot open strain grid '" + path.string() + "'");
  }

  std::string line;
  // skip metadata comments
  do {
    if (!std::getline(in, line)) {
      throw config_error("strain grid '" + path.string() + "' is empty");
    }
  } while (!line.empty() && line[0] == '#');

  const std::vector<std::string> header = split_csv_line(line);
  const std::vector<std::string> required = {"x_um", "z_um", "exx", "ezz",
                                             "exz"};
  std::vector<int> col(required.size(), -1);
  for (std::size_t i = 0; i < required.size(); ++i) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == required[i]) {
        col[i] = static_cast<int>(j);
      }
    }
    if (col[i] < 0) {
      throw config_error("strain grid '" + path.string() +
                         "' is missing column '" + required[i] + "'");
    }
  }

  struct Row {
    double x, z, exx, ezz, exz;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() < header.size()) {
      throw config_error("strain grid row " + std::to_string(line_no) +
                         " has too few fields");
    }
    Row r{};
    try {
      r.x = std::stod(f[col[0]]) * 1e-6;
      r.z = std::stod(f[col[1]]) * 1e-6;
      r.exx = std::stod(f[col[2]]);
      r.ezz = std::stod(f[col[3]]);
      r.exz = std::stod(f[col[4]]);
    } catch (const std::exception&) {
      throw config_error("strain grid row " + std::to_string(line_no) +
                         " is not numeric");
    }
    rows.push_back(r);
  }
  if (rows.empty()) {
    throw config_error("strain grid '" + path.string() + "' has no data rows");
  }

  GridStrainField field;
  for (const Row& r : rows) {
    field.xs_.push_back(r.x);
    field.zs_.push_back(r.z);
  }
  auto unique_sorted = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  unique_sorted(field.xs_);
  unique_sorted(field.zs_);
  const std::size_t nx = field.xs_.size();
  const std::size_t nz = field.zs_.size();
  if (nx < 2 || nz < 2 || rows.size() != nx * nz) {
    throw config_error("strain grid '" + path.string() +
                       "' is not a rectangular grid (" +
                       std::to_string(rows.size()) + " rows, expected " +
                       std::to_string(nx) + " x " + std::to_string(nz) + ")");
  }

  auto index_of = [](const std::vector<double>& v, double x) -> std::size_t {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) {
      return v.size();
    }
    return static_cast<std::size_t>(it - v.begin());
  };

  field.exx_.assign(nx * nz, std::numeric_limits<double>::quiet_NaN());
  field.ezz_.assign(nx * nz, std::numeric_limits<double>::quiet_NaN());
  field.exz_.assign(nx * nz, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> seen(nx * nz, 0);
  for (const Row& r : rows) {
    const std::size_t ix = index_of(field.xs_, r.x);
    const std::size_t iz = index_of(field.zs_, r.z);
    const std::size_t idx = iz * nx + ix;
    if (seen[idx]) {
      throw config_error("strain grid '" + path.string() +
                         "' has duplicate grid nodes");
    }
    seen[idx] = 1;
    field.exx_[idx] = r.exx;
    field.ezz_[idx] = r.ezz;
    field.exz_[idx] = r.exz;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw config_error("strain grid '" + path.string() +
                       "' is not a rectangular grid (missing nodes)");
  }
  return field;
}

bool GridStrainField::contains(double x, double z) const {
  return x >= xs_.front() && x <= xs_.back() && z >= zs_.front() &&
         z <= zs_.back();
}

void GridStrainField::set_envelope(const GaussianCavityMode& mode) {
  envelope_ = mode;
}

double GridStrainField::interp(const std::vector<double>& v, double x,
                               double z) const {
  const std::size_t nx = xs_.size();
  auto cell = [](const std::vector<double>& axis, double t) -> std::size_t {
    // largest i with axis[i] <= t, clamped to the last interval
    auto it = std::upper_bound(axis.begin(), axis.end(), t);
    std::size_t i = static_cast<std::size_t>(it - axis.begin());
    if (i > 0) --i;
    if (i >= axis.size() - 1) i = axis.size() - 2;
    return i;
  };
  const std::size_t ix = cell(xs_, x);
  const std::size_t iz = cell(zs_, z);
  const double tx = (x - xs_[ix]) / (xs_[ix + 1] - xs_[ix]);
  const double tz = (z - zs_[iz]) / (zs_[iz + 1] - zs_[iz]);
  const double v00 = v[iz * nx + ix];
  const double v10 = v[iz * nx + ix + 1];
  const double v01 = v[(iz + 1) * nx + ix];
  const double v11 = v[(iz + 1) * nx + ix + 1];
  return (1.0 - tz) * ((1.0 - tx) * v00 + tx * v10) +
         tz * ((1.0 - tx) * v01 + tx * v11);
}

spin::StrainTensor GridStrainField::strain(double x, double y, double z,
                                           double phase) const {
  if (!contains(x, z)) {
    throw numeric_error("strain grid query outside the hull at x=" +
                        std::to_string(x * 1e6) + " um, z=" +
                        std::to_string(z * 1e6) + " um");
  }
  double a = scale_ * std::cos(phase);
  if (envelope_) {
    a *= mode_amplitude(y, x, *envelope_);
  }
  spin::StrainTensor e;
  e.exx = a * interp(exx_, x, z);
  e.ezz = a * interp(ezz_, x, z);
  e.exz = a * interp(exz_, x, z);
  return e;
}

SlopeMaps lattice_slope_map(const RayleighWave& wave,
                            const GaussianCavityMode& mode,
                            const std::vector<double>& xs,
                            const std::vector<double>& ys, bool standing) {
  if (xs.empty() || ys.empty()) {
    throw config_error("slope map grid is empty");
  }
  SlopeMaps maps;
  maps.xs = xs;
  maps.ys = ys;
  maps.dz_dx.resize(xs.size() * ys.size());
  maps.dz_dy.resize(xs.size() * ys.size());

  const double h = wave.wavelength() * 1e-4;
  auto uz = [&](double x, double y, double phase) {
    const Displacement d = standing ? wave.standing_displacement(x, 0.0, phase)
                                    : wave.displacement(x, 0.0, phase);
    return d.uz * mode_amplitude(y, x, mode);
  };
  // every field is harmonic in phase, so two quadrature snapshots give the
  // oscillation amplitude
  auto slope_amp = [&](double x, double y, bool along_x) {
    double a0 = 0.0, a1 = 0.0;
    for (int qdr = 0; qdr < 2; ++qdr) {
      const double p = qdr == 0 ? 0.0 : std::numbers::pi / 2.0;
      const double d =
          along_x ? (uz(x + h, y, p) - uz(x - h, y, p)) / (2.0 * h)
                  : (uz(x, y + h, p) - uz(x, y - h, p)) / (2.0 * h);
      (qdr == 0 ? a0 : a1) = d;
    }
    const double amp = std::hypot(a0, a1);
    const double ref = std::abs(a0) >= std::abs(a1) ? a0 : a1;
    return std::pair<double, double>(amp, ref < 0.0 ? -amp : amp);
  };

  for (std::size_t iy = 0; iy < ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      const auto [amp_x, signed_x] = slope_amp(xs[ix], ys[iy], true);
      const auto [amp_y, signed_y] = slope_amp(xs[ix], ys[iy], false);
      maps.dz_dx[iy * xs.size() + ix] = amp_x;
      maps.dz_dy[iy * xs.size() + ix] = signed_y;
    }
  }
  return maps;
}

}  // namespace sawspin::acoustics
