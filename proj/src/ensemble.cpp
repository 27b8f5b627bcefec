#include "sawspin/ensemble.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "sawspin/errors.hpp"

namespace sawspin::ensemble {

namespace {
constexpr double kFwhmPerSigma = 2.3548200450309493;
}

double SampleRng::uniform() {
  // 53-bit mantissa in [0, 1); fixed mapping for cross-platform stability
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double SampleRng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // Box-Muller; u in (0, 1]
  double u = 0.0;
  do {
    u = 1.0 - uniform();
  } while (u <= 0.0);
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double a = 2.0 * std::numbers::pi * v;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t position_seed(std::uint64_t base_seed, std::uint64_t index) {
  // splitmix64 of the combined word
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<SpinSample> sample_spins(const EnsembleModel& model, double cx,
                                     double cy) {
  if (model.n_samples < 1) {
    throw config_error("ensemble.n_samples must be >= 1");
  }
  if (model.psf_fwhm_m < 0.0) {
    throw config_error("ensemble.psf_fwhm_um must be >= 0");
  }
  if (model.detuning_fwhm_hz < 0.0) {
    throw config_error("ensemble.detuning_fwhm_mhz must be >= 0");
  }
  if (model.depth_kind == DepthKind::uniform_layer) {
    if (model.z_min_m < 0.0 || model.z_max_m < model.z_min_m) {
      throw config_error("ensemble depth layer must satisfy 0 <= z_min <= z_max");
    }
  } else {
    if (model.z_sigma_m < 0.0 || model.z_mean_m < 0.0) {
      throw config_error("ensemble gaussian depth needs z_mean, z_sigma >= 0");
    }
  }

  SampleRng rng(model.rng_seed);
  const double psf_sigma = model.psf_fwhm_m / kFwhmPerSigma;
  const double det_sigma = model.detuning_fwhm_hz / kFwhmPerSigma;

  std::vector<SpinSample> samples(model.n_samples);
  for (SpinSample& s : samples) {
    s.x_m = cx + psf_sigma * rng.normal();
    s.y_m = cy + psf_sigma * rng.normal();
    if (model.depth_kind == DepthKind::uniform_layer) {
      s.z_m = model.z_min_m + (model.z_max_m - model.z_min_m) * rng.uniform();
    } else {
      do {
        s.z_m = model.z_mean_m + model.z_sigma_m * rng.normal();
      } while (s.z_m < 0.0);
    }
    s.detuning_hz = det_sigma * rng.normal();
  }
  return samples;
}

void local_drive_rates(const acoustics::StrainField& field,
                       const spin::GTensorC3v& g,
                       std::span<SpinSample> samples,
                       double crystal_rotation_rad) {
  for (SpinSample& s : samples) {
    if (!field.contains(s.x_m, s.z_m)) {
      throw numeric_error("spin sample outside the strain field domain");
    }
    spin::StrainTensor eps = field.strain(s.x_m, s.y_m, s.z_m, 0.0);
    if (crystal_rotation_rad != 0.0) {
      eps = spin::rotate_strain(eps, crystal_rotation_rad);
    }
    s.omega_m_hz = spin::transition_rate_dm2(g, eps);
    s.omega_dm1_hz = spin::transition_rate_dm1(g, eps);
  }
}

std::vector<double> ensemble_average(
    const std::vector<std::vector<double>>& traces,
    std::span<const double> weights) {
  if (traces.empty()) {
    throw config_error("ensemble average of zero traces");
  }
  const std::size_t len = traces.front().size();
  for (const auto& t : traces) {
    if (t.size() != len) {
      throw config_error("ensemble traces have mismatched abscissas");
    }
  }
  if (!weights.empty() && weights.size() != traces.size()) {
    throw config_error("one weight per trace required");
  }

  std::vector<double> mean(len, 0.0);
  double w_sum = 0.0;
  for (std::size_t j = 0; j < traces.size(); ++j) {
    const double w = weights.empty() ? 1.0 : weights[j];
    w_sum += w;
    for (std::size_t i = 0; i < len; ++i) {
      mean[i] += w * traces[j][i];
    }
  }
  if (w_sum == 0.0) {
    throw config_error("ensemble weights sum to zero");
  }
  for (double& v : mean) {
    v /= w_sum;
  }
  return mean;
}

analysis::Spectrum averaged_at_spectrum(std::span<const SpinSample> samples,
                                        const AtSpectrumParams& p) {
  if (samples.empty()) {
    throw config_error("no samples for the averaged spectrum");
  }
  if (p.probe_points < 2) {
    throw config_error("probe grid needs at least 2 points");
  }
  analysis::Spectrum s;
  s.x.resize(p.probe_points);
  s.y.assign(p.probe_points, 0.0);
  const double x0 = -0.5 * p.probe_span_hz;
  const double dx = p.probe_span_hz / (p.probe_points - 1);
  for (int i = 0; i < p.probe_points; ++i) {
    s.x[i] = x0 + i * dx;
  }

  const double fwhm = std::hypot(p.linewidth_fwhm_hz, p.probe_rabi_hz);
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  for (const SpinSample& sample : samples) {
    const dynamics::DressedLines lines = dynamics::dressed_lines(
        sample.omega_m_hz, p.mech_detuning_hz, sample.detuning_hz);
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < p.probe_points; ++i) {
        const double d = (s.x[i] - lines.center_hz[j]) / sigma;
        s.y[i] += lines.weight[j] * std::exp(-0.5 * d * d);
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (double& v : s.y) {
    v *= inv_n;
  }
  return s;
}

std::vector<double> scan_map(
    const std::function<double(double x, double y)>& observable,
    std::span<const std::pair<double, double>> positions) {
  std::vector<double> profile;
  profile.reserve(positions.size());
  for (const auto& [x, y] : positions) {
    profile.push_back(observable(x, y));
  }
  return profile;
}

std::function<double(double, double)> make_at_splitting_observable(
    const acoustics::StrainField& field, const spin::GTensorC3v& g,
    const EnsembleModel& model, const AtSpectrumParams& at,
    double crystal_rotation_rad) {
  // samples are reseeded per position so scan points are independent yet
  // deterministic
  auto counter = std::make_shared<std::uint64_t>(0);
  return [&field, g, model, at, crystal_rotation_rad,
          counter](double x, double y) {
    EnsembleModel local = model;
    local.rng_seed = position_seed(model.rng_seed, (*counter)++);
    std::vector<SpinSample> samples = sample_spins(local, x, y);
    local_drive_rates(field, g, samples, crystal_rotation_rad);
    const analysis::Spectrum spec = averaged_at_spectrum(samples, at);
    const analysis::SplittingResult split =
        analysis::extract_at_splitting(spec);
    return split.resolved ? split.splitting_hz : split.upper_bound_hz;
  };
}

ChannelRms channel_rms(std::span<const SpinSample> samples) {
  if (samples.empty()) {
    throw config_error("channel RMS of zero samples");
  }
  ChannelRms rms;
  double sum_re = 0.0, sum_im = 0.0, sum_tot = 0.0;
  for (const SpinSample& s : samples) {
    // the eps_xx channel is the real part of omega_m, the shear channel the
    // imaginary part
    sum_re += s.omega_m_hz.real() * s.omega_m_hz.real();
    sum_im += s.omega_m_hz.imag() * s.omega_m_hz.imag();
    sum_tot += std::norm(s.omega_m_hz);
  }
  const double n = static_cast<double>(samples.size());
  rms.exx_channel = std::sqrt(sum_re / n);
  rms.exz_channel = std::sqrt(sum_im / n);
  rms.total = std::sqrt(sum_tot / n);
  return rms;
}

}  // namespace sawspin::ensemble
