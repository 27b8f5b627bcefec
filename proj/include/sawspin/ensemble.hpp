#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sawspin/acoustics.hpp"
#include "sawspin/analysis.hpp"
#include "sawspin/dynamics.hpp"
#include "sawspin/spin_core.hpp"

// Spatial sampling of defects, per-defect drive rates from the strain field
// and averaging of simulated observables over position and detuning
// distributions. Sampling is bit-identical for a fixed seed.

namespace sawspin::ensemble {

enum class DepthKind { uniform_layer, gaussian };

struct EnsembleModel {
  double psf_fwhm_m = 1e-6;          // lateral optical spot FWHM
  DepthKind depth_kind = DepthKind::uniform_layer;
  double z_min_m = 0.0;              // uniform layer bounds
  double z_max_m = 18e-6;
  double z_mean_m = 0.0;             // gaussian depth parameters
  double z_sigma_m = 0.0;
  double detuning_fwhm_hz = 1e6;     // inhomogeneous zero-field linewidth
  int n_samples = 2000;
  std::uint64_t rng_seed = 1;
};

struct SpinSample {
  double x_m = 0.0, y_m = 0.0, z_m = 0.0;
  double detuning_hz = 0.0;
  std::complex<double> omega_m_hz = 0.0;    // local dm2 drive rate
  std::complex<double> omega_dm1_hz = 0.0;  // local dm1 drive rate
};

// Deterministic RNG with a self-contained normal deviate (Box-Muller over
// mt19937_64) so sample sets are bit-identical across standard libraries.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : eng_(seed) {}
  double uniform();  // [0, 1)
  double normal();   // standard normal

 private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Seed for the sample set belonging to one scan position (splitmix64 mix of
// the base seed and the position index).
std::uint64_t position_seed(std::uint64_t base_seed, std::uint64_t index);

// Lateral offsets ~ Gaussian with the PSF FWHM about (cx, cy); depths from
// the configured distribution; detunings Gaussian with detuning_fwhm.
// Throws config_error on invalid distribution parameters.
std::vector<SpinSample> sample_spins(const EnsembleModel& model, double cx,
                                     double cy);

// Fills omega_m / omega_dm1 from the strain field at each sample position
// (peak cavity amplitude, phase 0). `crystal_rotation_rad` rotates the
// device-frame strain into the crystal frame before contraction (pi/2 for a
// device propagating along the crystal y axis). Out-of-domain positions
// throw.
void local_drive_rates(const acoustics::StrainField& field,
                       const spin::GTensorC3v& g,
                       std::span<SpinSample> samples,
                       double crystal_rotation_rad = 0.0);

// Uniform or weighted mean over per-spin traces sharing one abscissa.
std::vector<double> ensemble_average(
    const std::vector<std::vector<double>>& traces,
    std::span<const double> weights = {});

struct AtSpectrumParams {
  double probe_span_hz = 12e6;     // symmetric probe window
  int probe_points = 241;
  double probe_rabi_hz = 0.2e6;
  double linewidth_fwhm_hz = 0.2e6;  // intrinsic (single-spin) line
  double mech_detuning_hz = 0.0;
};

// Ensemble Autler-Townes spectrum: per-sample dressed lines (local omega_m,
// sample detuning) accumulated on the probe grid.
analysis::Spectrum averaged_at_spectrum(std::span<const SpinSample> samples,
                                        const AtSpectrumParams& p);

// Ensemble-averaged observable evaluated at each laser position.
std::vector<double> scan_map(
    const std::function<double(double x, double y)>& observable,
    std::span<const std::pair<double, double>> positions);

// Observable builder: fitted Autler-Townes splitting at a laser position.
// Sampling is reseeded deterministically per position.
std::function<double(double, double)> make_at_splitting_observable(
    const acoustics::StrainField& field, const spin::GTensorC3v& g,
    const EnsembleModel& model, const AtSpectrumParams& at,
    double crystal_rotation_rad = 0.0);

// Per-channel ensemble profiles used for the longitudinal-map analysis:
// RMS over samples of the eps_xx channel |(g11-g12)/2 * exx| and the shear
// channel |2 g14 exz| of the dm2 rate.
struct ChannelRms {
  double exx_channel = 0.0;
  double exz_channel = 0.0;
  double total = 0.0;  // sqrt of mean |omega_m|^2
};

ChannelRms channel_rms(std::span<const SpinSample> samples);

}  // namespace sawspin::ensemble
