#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "sawspin/spin_core.hpp"

// Rayleigh-wave elasticity on an isotropic half space, Gaussian cavity mode
// geometry, cavity power / ring-up dynamics and strain-field generation.
//
// Coordinates: x along the wave propagation, z is depth below the surface
// (z >= 0 inside the solid), y transverse. The `phase` argument is the RF
// phase; peak strain amplitudes are obtained at phase = 0.

namespace sawspin::acoustics {

struct MaterialAcoustics {
  double v_l_m_s = 0.0;             // longitudinal bulk velocity
  double v_t_m_s = 0.0;             // transverse bulk velocity
  std::optional<double> v_r_m_s;    // Rayleigh velocity if supplied
};

// Unique root v_r in (0, v_t) of the Rayleigh secular equation
// (2 - xi^2)^2 = 4 sqrt(1 - xi^2 (v_t/v_l)^2) sqrt(1 - xi^2), xi = v_r/v_t,
// found by bracketed bisection to 1e-10 relative tolerance.
double solve_rayleigh_velocity(const MaterialAcoustics& m);

struct RayleighWaveParams {
  double wavelength_m = 0.0;
  double surface_amplitude_m = 0.0;  // |u_z| at z = 0
};

struct Displacement {
  double ux = 0.0;
  double uz = 0.0;
};

// Traveling Rayleigh wave moving toward +x, classical two-exponential depth
// profile, normalized so |u_z(z=0)| equals the surface amplitude.
class RayleighWave {
 public:
  RayleighWave(const RayleighWaveParams& p, const MaterialAcoustics& m);

  double wavelength() const { return params_.wavelength_m; }
  double wavenumber() const { return k_; }
  double angular_frequency() const { return omega_; }
  double rayleigh_velocity() const { return v_r_; }
  double decay_q() const { return q_; }   // compressional decay constant, 1/m
  double decay_s() const { return s_; }   // shear decay constant, 1/m

  Displacement displacement(double x, double z, double phase) const;
  spin::StrainTensor strain(double x, double z, double phase) const;

  // Superposition of the +x and -x traveling waves (cavity standing wave).
  Displacement standing_displacement(double x, double z, double phase) const;
  spin::StrainTensor standing_strain(double x, double z, double phase) const;

 private:
  RayleighWaveParams params_;
  double v_r_ = 0.0;
  double k_ = 0.0, omega_ = 0.0, q_ = 0.0, s_ = 0.0;
  double amp_ = 0.0;     // potential amplitude after normalization
  double beta_x_ = 0.0;  // 2qs/(s^2+k^2)
  double beta_z_ = 0.0;  // 2k^2/(s^2+k^2)
};

struct GaussianCavityMode {
  double wavelength_m = 0.0;
  double waist_m = 0.0;           // w0 of exp(-y^2/w0^2)
  double omega_m_rad_s = 0.0;     // angular resonance frequency
  double q_loaded = 0.0;
  bool include_divergence = false;
};

// exp(-y^2/w(x)^2); w(x) = w0 unless divergence is enabled, in which case
// w(x) = w0 sqrt(1 + (x/x_R)^2) with x_R = pi w0^2 / lambda.
double gaussian_envelope(double y, double x, const GaussianCavityMode& mode);

// Transverse mode profile including the sqrt(w0/w(x)) amplitude reduction of
// a diverging surface beam; identical to gaussian_envelope when divergence
// is off.
double mode_amplitude(double y, double x, const GaussianCavityMode& mode);

// 2 w0 sqrt(ln 2)
double envelope_fwhm(const GaussianCavityMode& mode);

struct PowerCalibration {
  double strain_per_sqrt_watt = 0.0;  // peak strain scale per sqrt(W)
  double reference_power_w = 1.0;
};

// strain_per_sqrt_watt * sqrt(P)
double amplitude_from_power(const PowerCalibration& cal, double p_watts);

double cavity_time_constant(const GaussianCavityMode& mode);  // 2Q/omega_m
double cavity_ring_up(double t, const GaussianCavityMode& mode,
                      double steady_scale);
double cavity_ring_down(double t, const GaussianCavityMode& mode,
                        double steady_scale);

// Steady-state amplitude of the cavity driven `detuning_hz` away from
// resonance, relative to the on-resonance amplitude.
double cavity_response(const GaussianCavityMode& mode, double detuning_hz);

// Spatially resolved strain of the enveloped cavity mode. Evaluation is pure
// and reentrant.
class StrainField {
 public:
  virtual ~StrainField() = default;
  virtual spin::StrainTensor strain(double x, double y, double z,
                                    double phase) const = 0;
  virtual bool contains(double x, double z) const = 0;
  virtual std::string source() const = 0;
  // Multiplies every component; used for the power-to-strain calibration.
  virtual double peak_scale() const = 0;
};

// Analytical Gaussian-enveloped standing wave. The (x,z) shape is normalized
// so eps_xx at the surface antinode (x=0, z=0, phase=0) equals `peak_scale`.
class AnalyticStandingField final : public StrainField {
 public:
  AnalyticStandingField(const RayleighWave& wave, const GaussianCavityMode& mode,
                        double peak_scale);

  spin::StrainTensor strain(double x, double y, double z,
                            double phase) const override;
  bool contains(double, double z) const override { return z >= 0.0; }
  std::string source() const override { return "analytical"; }
  double peak_scale() const override { return scale_; }

 private:
  RayleighWave wave_;
  GaussianCavityMode mode_;
  double scale_ = 1.0;
  double norm_ = 1.0;  // 1 / eps_xx(0,0,phase=0) of the raw standing wave
};

// Plane-strain (x,z) grid imported from CSV columns
// x_um, z_um, exx, ezz, exz. Bilinear interpolation inside the hull, exact at
// nodes; out-of-hull queries throw. Values are treated as peak amplitudes and
// scale with cos(phase). Immutable after load.
class GridStrainField final : public StrainField {
 public:
  spin::StrainTensor strain(double x, double y, double z,
                            double phase) const override;
  bool contains(double x, double z) const override;
  std::string source() const override { return "imported-grid"; }
  double peak_scale() const override { return scale_; }

  void set_envelope(const GaussianCavityMode& mode);
  void set_scale(double scale) { scale_ = scale; }

  friend GridStrainField import_strain_grid(const std::filesystem::path& path);

 private:
  std::vector<double> xs_, zs_;                 // meters, strictly increasing
  std::vector<double> exx_, ezz_, exz_;         // row-major [iz * nx + ix]
  std::optional<GaussianCavityMode> envelope_;
  double scale_ = 1.0;

  double interp(const std::vector<double>& v, double x, double z) const;
};

GridStrainField import_strain_grid(const std::filesystem::path& path);

// Peak-over-phase surface slope amplitudes |du_z/dx|, du_z/dy of the
// enveloped mode on a rectangular (x, y) grid at z = 0. The transverse slope
// is signed (odd in y); the longitudinal slope is the oscillation amplitude.
struct SlopeMaps {
  std::vector<double> xs, ys;     // meters
  std::vector<double> dz_dx;      // row-major [iy * nx + ix]
  std::vector<double> dz_dy;
};

SlopeMaps lattice_slope_map(const RayleighWave& wave,
                            const GaussianCavityMode& mode,
                            const std::vector<double>& xs,
                            const std::vector<double>& ys, bool standing);

}  // namespace sawspin::acoustics
