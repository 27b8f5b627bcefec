#pragma once

#include <span>
#include <utility>
#include <vector>

// Extraction of quantitative results from simulated data: multi-Gaussian
// least-squares fitting, dressed-doublet splitting, spatial FFT, square-root
// power-law fits and modulation metrics. All functions are pure.

namespace sawspin::analysis {

struct Spectrum {
  std::vector<double> x;  // strictly increasing abscissa (Hz or m)
  std::vector<double> y;  // ordinate (contrast, dimensionless)
};

struct Peak {
  double center = 0.0;
  double fwhm = 0.0;
  double amplitude = 0.0;
  // 95% two-sided confidence intervals from the linearized covariance.
  double center_ci95 = 0.0;
  double fwhm_ci95 = 0.0;
  double amplitude_ci95 = 0.0;
};

struct PeakFit {
  std::vector<Peak> peaks;
  double baseline = 0.0;
  double baseline_ci95 = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool degenerate = false;  // overlapping centers (within FWHM/10)
};

// Nonlinear least squares of n_peaks Gaussians plus a constant baseline,
// Levenberg-Marquardt damping, tolerance 1e-10 on the relative cost decrease,
// at most 200 iterations. `center_guesses` holds one initial center per peak;
// amplitudes and widths are seeded from the data. Throws numeric_error on
// non-convergence or a singular Jacobian.
PeakFit fit_gaussian_peaks(const Spectrum& s, int n_peaks,
                           std::span<const double> center_guesses);

struct SplittingResult {
  double splitting_hz = 0.0;
  double ci95_hz = 0.0;
  bool resolved = false;
  double upper_bound_hz = 0.0;  // single-peak FWHM when unresolved
};

// Two-Gaussian fit of a dressed doublet; splitting = |c2 - c1|. An
// unresolved doublet (degenerate fit) reports the fitted single-peak FWHM as
// an upper bound instead.
SplittingResult extract_at_splitting(const Spectrum& s);

// One-sided magnitude spectrum (k = 0 .. N/2) of the mean-subtracted profile,
// frequency axis in cycles per meter. Requires uniform spacing and >= 8
// samples. Optional Hann window for imported data.
Spectrum fft_spatial(const Spectrum& profile, bool hann_window = false);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares of splitting against sqrt(power). Needs >= 3 points.
LineFit linear_fit_sqrt_power(
    std::span<const std::pair<double, double>> power_splitting);

// 100 * (max - min) / mean of the supplied profile values. The caller is
// responsible for windowing out envelope roll-off. Throws on a nonpositive
// mean.
double peak_to_peak_modulation(std::span<const double> values);

}  // namespace sawspin::analysis
