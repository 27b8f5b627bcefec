#include "sawspin/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "sawspin/errors.hpp"

namespace sawspin::analysis {

namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)
constexpr double kZ95 = 1.959963984540054;            // two-sided 95%

void check_spectrum(const Spectrum& s) {
  if (s.x.size() != s.y.size()) {
    throw config_error("spectrum abscissa/ordinate lengths differ");
  }
  if (s.x.size() < 2) {
    throw config_error("spectrum needs at least two samples");
  }
  for (std::size_t i = 1; i < s.x.size(); ++i) {
    if (!(s.x[i] > s.x[i - 1])) {
      throw config_error("spectrum abscissa must be strictly increasing");
    }
  }
}

// Model: y = baseline + sum_k A_k exp(-(x - c_k)^2 / (2 s_k^2)).
// Parameter vector: [b, A_0, c_0, s_0, A_1, c_1, s_1, ...].
struct GaussianModel {
  int n_peaks;

  double eval(const Eigen::VectorXd& p, double x) const {
    double v = p(0);
    for (int k = 0; k < n_peaks; ++k) {
      const double a = p(1 + 3 * k);
      const double c = p(2 + 3 * k);
      const double s = p(3 + 3 * k);
      const double t = (x - c) / s;
      v += a * std::exp(-0.5 * t * t);
    }
    return v;
  }

  void jacobian_row(const Eigen::VectorXd& p, double x,
                    Eigen::RowVectorXd& row) const {
    row(0) = 1.0;
    for (int k = 0; k < n_peaks; ++k) {
      const double a = p(1 + 3 * k);
      const double c = p(2 + 3 * k);
      const double s = p(3 + 3 * k);
      const double t = (x - c) / s;
      const double g = std::exp(-0.5 * t * t);
      row(1 + 3 * k) = g;
      row(2 + 3 * k) = a * g * t / s;
      row(3 + 3 * k) = a * g * t * t / s;
    }
  }
};

double cost_of(const GaussianModel& model, const Eigen::VectorXd& p,
               const Spectrum& s) {
  double c = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const double r = s.y[i] - model.eval(p, s.x[i]);
    c += r * r;
  }
  return 0.5 * c;
}

}  // namespace

PeakFit fit_gaussian_peaks(const Spectrum& s, int n_peaks,
                           std::span<const double> center_guesses) {
  check_spectrum(s);
  if (n_peaks < 1) {
    throw config_error("fit needs at least one peak");
  }
  if (static_cast<int>(center_guesses.size()) != n_peaks) {
    throw config_error("one initial center per peak required");
  }
  const int n = static_cast<int>(s.x.size());
  const int n_par = 1 + 3 * n_peaks;
  if (n < n_par) {
    throw config_error("spectrum has fewer samples than fit parameters");
  }

  const double y_min = *std::min_element(s.y.begin(), s.y.end());
  const double span = s.x.back() - s.x.front();
  const double sigma0 =
      std::max(span / (8.0 * n_peaks), 2.0 * (s.x[1] - s.x[0]));

  GaussianModel model{n_peaks};
  Eigen::VectorXd p(n_par);
  p(0) = y_min;
  for (int k = 0; k < n_peaks; ++k) {
    const double c = center_guesses[k];
    // amplitude seeded from the data point nearest the guessed center
    const auto it = std::lower_bound(s.x.begin(), s.x.end(), c);
    const std::size_t idx =
        std::min<std::size_t>(it - s.x.begin(), s.x.size() - 1);
    p(1 + 3 * k) = std::max(s.y[idx] - y_min, 1e-12);
    p(2 + 3 * k) = c;
    p(3 + 3 * k) = sigma0;
  }

  Eigen::VectorXd residual(n);
  Eigen::MatrixXd jac(n, n_par);
  Eigen::RowVectorXd jrow(n_par);
  double lambda = 1e-3;
  double cost = cost_of(model, p, s);
  int iter = 0;
  for (; iter < 200; ++iter) {
    for (int i = 0; i < n; ++i) {
      residual(i) = s.y[i] - model.eval(p, s.x[i]);
      model.jacobian_row(p, s.x[i], jrow);
      jac.row(i) = jrow;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * residual;

    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      if (ldlt.info() != Eigen::Success) {
        throw numeric_error("Gaussian fit: singular normal equations");
      }
      const Eigen::VectorXd step = ldlt.solve(jtr);
      if (!step.allFinite()) {
        throw numeric_error("Gaussian fit: singular Jacobian");
      }
      const Eigen::VectorXd trial = p + step;
      const double trial_cost = cost_of(model, trial, s);
      if (trial_cost <= cost) {
        const double decrease = (cost - trial_cost) / std::max(cost, 1e-300);
        p = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (decrease < 1e-10) {
          iter = 201;  // converged
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      break;  // no downhill step found: at a (possibly flat) optimum
    }
  }

  // widths enter the model through s^2 only
  for (int k = 0; k < n_peaks; ++k) {
    p(3 + 3 * k) = std::abs(p(3 + 3 * k));
  }

  // linearized covariance at the optimum
  for (int i = 0; i < n; ++i) {
    residual(i) = s.y[i] - model.eval(p, s.x[i]);
    model.jacobian_row(p, s.x[i], jrow);
    jac.row(i) = jrow;
  }
  const int dof = std::max(n - n_par, 1);
  const double s2 = residual.squaredNorm() / dof;
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const Eigen::MatrixXd cov =
      s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();

  PeakFit fit;
  fit.baseline = p(0);
  fit.baseline_ci95 = kZ95 * std::sqrt(std::max(cov(0, 0), 0.0));
  fit.residual_norm = std::sqrt(residual.squaredNorm());
  fit.iterations = std::min(iter, 200);
  for (int k = 0; k < n_peaks; ++k) {
    Peak peak;
    peak.amplitude = p(1 + 3 * k);
    peak.center = p(2 + 3 * k);
    peak.fwhm = kFwhmPerSigma * p(3 + 3 * k);
    peak.amplitude_ci95 =
        kZ95 * std::sqrt(std::max(cov(1 + 3 * k, 1 + 3 * k), 0.0));
    peak.center_ci95 =
        kZ95 * std::sqrt(std::max(cov(2 + 3 * k, 2 + 3 * k), 0.0));
    peak.fwhm_ci95 = kFwhmPerSigma *
                     kZ95 * std::sqrt(std::max(cov(3 + 3 * k, 3 + 3 * k), 0.0));
    fit.peaks.push_back(peak);
  }
  std::sort(fit.peaks.begin(), fit.peaks.end(),
            [](const Peak& a, const Peak& b) { return a.center < b.center; });

  for (std::size_t i = 0; i + 1 < fit.peaks.size(); ++i) {
    const double gap =
        std::abs(fit.peaks[i + 1].center - fit.peaks[i].center);
    const double w = std::max(fit.peaks[i].fwhm, fit.peaks[i + 1].fwhm);
    if (gap < 0.1 * w) {
      fit.degenerate = true;
    }
  }
  return fit;
}

SplittingResult extract_at_splitting(const Spectrum& s) {
  check_spectrum(s);
  // seed the doublet from the two strongest local maxima
  std::vector<std::pair<double, double>> maxima;  // (y, x)
  for (std::size_t i = 1; i + 1 < s.x.size(); ++i) {
    if (s.y[i] >= s.y[i - 1] && s.y[i] >= s.y[i + 1]) {
      maxima.emplace_back(s.y[i], s.x[i]);
    }
  }
  std::sort(maxima.rbegin(), maxima.rend());

  double c0, c1;
  if (maxima.size() >= 2) {
    c0 = std::min(maxima[0].second, maxima[1].second);
    c1 = std::max(maxima[0].second, maxima[1].second);
  } else {
    const std::size_t peak =
        std::max_element(s.y.begin(), s.y.end()) - s.y.begin();
    const double span = s.x.back() - s.x.front();
    c0 = s.x[peak] - span / 16.0;
    c1 = s.x[peak] + span / 16.0;
  }

  SplittingResult result;
  bool two_peak_ok = true;
  PeakFit fit;
  try {
    const double guesses[] = {c0, c1};
    fit = fit_gaussian_peaks(s, 2, guesses);
  } catch (const numeric_error&) {
    two_peak_ok = false;
  }
  if (two_peak_ok && !fit.degenerate) {
    result.resolved = true;
    result.splitting_hz = std::abs(fit.peaks[1].center - fit.peaks[0].center);
    result.ci95_hz = std::hypot(fit.peaks[0].center_ci95,
                                fit.peaks[1].center_ci95);
    return result;
  }

  // unresolved doublet: report the single-line width as an upper bound
  const std::size_t peak =
      std::max_element(s.y.begin(), s.y.end()) - s.y.begin();
  const double guess[] = {s.x[peak]};
  const PeakFit single = fit_gaussian_peaks(s, 1, guess);
  result.resolved = false;
  result.splitting_hz = 0.0;
  result.upper_bound_hz = single.peaks[0].fwhm;
  result.ci95_hz = single.peaks[0].fwhm_ci95;
  return result;
}

Spectrum fft_spatial(const Spectrum& profile, bool hann_window) {
  check_spectrum(profile);
  const std::size_t n = profile.x.size();
  if (n < 8) {
    throw config_error("spatial FFT needs at least 8 samples");
  }
  const double dx = profile.x[1] - profile.x[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double step = profile.x[i] - profile.x[i - 1];
    if (std::abs(step - dx) > 1e-6 * std::abs(dx)) {
      throw config_error("spatial FFT requires uniform spacing");
    }
  }

  double mean = 0.0;
  for (double v : profile.y) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double window = 1.0;
    if (hann_window) {
      window = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    }
    w[i] = (profile.y[i] - mean) * window;
  }

  Spectrum out;
  const std::size_t n_bins = n / 2 + 1;
  out.x.resize(n_bins);
  out.y.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = -2.0 * std::numbers::pi *
                         static_cast<double>(k * i) / static_cast<double>(n);
      re += w[i] * std::cos(ang);
      im += w[i] * std::sin(ang);
    }
    out.x[k] = static_cast<double>(k) / (static_cast<double>(n) * dx);
    out.y[k] = std::hypot(re, im);
  }
  return out;
}

LineFit linear_fit_sqrt_power(
    std::span<const std::pair<double, double>> power_splitting) {
  if (power_splitting.size() < 3) {
    throw config_error("sqrt-power fit needs at least 3 points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(power_splitting.size());
  for (const auto& [p, split] : power_splitting) {
    if (p < 0.0) {
      throw config_error("powers must be non-negative");
    }
    const double x = std::sqrt(p);
    sx += x;
    sy += split;
    sxx += x * x;
    sxy += x * split;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    throw numeric_error("sqrt-power fit is degenerate");
  }
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;

  const double y_mean = sy / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& [p, split] : power_splitting) {
    const double y_hat = fit.intercept + fit.slope * std::sqrt(p);
    ss_res += (split - y_hat) * (split - y_hat);
    ss_tot += (split - y_mean) * (split - y_mean);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double peak_to_peak_modulation(std::span<const double> values) {
  if (values.empty()) {
    throw config_error("modulation metric needs a nonempty profile");
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (!(mean > 0.0)) {
    throw config_error("modulation metric needs a positive mean");
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  return 100.0 * (*mx - *mn) / mean;
}

}  // namespace sawspin::analysis
