#include "sawspin/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sawspin/errors.hpp"

namespace sawspin::dynamics {

namespace {

constexpr int kPlus = 0;   // |+1>
constexpr int kZero = 1;   // |0>
constexpr int kMinus = 2;  // |-1>

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_magnetic(Channel c) {
  return c == Channel::magnetic_plus || c == Channel::magnetic_minus;
}

Matrix3c propagator(const Matrix3c& h, double dt) {
  if (!h.allFinite()) {
    throw numeric_error("non-finite Hamiltonian entries in propagation");
  }
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(h);
  Vector3c phases;
  for (int i = 0; i < 3; ++i) {
    phases(i) = std::exp(Complex(0.0, -kTwoPi * es.eigenvalues()(i) * dt));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

void evolve(SpinState& psi, const Matrix3c& h, double dt) {
  psi.amp = propagator(h, dt) * psi.amp;
}

void apply_laser_reset(SpinState& psi, double init_polarization) {
  if (init_polarization >= 1.0) {
    psi = ground_state();
    return;
  }
  // partial reset: populations interpolate toward |0>, phases retained
  const Eigen::Vector3d p = psi.populations();
  Eigen::Vector3d target = (1.0 - init_polarization) * p;
  target(kZero) += init_polarization;
  for (int i = 0; i < 3; ++i) {
    const double a = std::abs(psi.amp(i));
    psi.amp(i) = a > 0.0 ? psi.amp(i) / a * std::sqrt(target(i))
                         : Complex(std::sqrt(target(i)), 0.0);
  }
  psi.amp.normalize();
}

}  // namespace

Matrix3c rwa_hamiltonian(std::span<const DriveTone> tones,
                         double inhomogeneous_detuning_hz) {
  int n_magnetic = 0, n_mech_dm2 = 0, n_mech_dm1 = 0;
  const DriveTone* magnetic = nullptr;
  const DriveTone* mech_dm2 = nullptr;
  const DriveTone* mech_dm1 = nullptr;
  for (const DriveTone& t : tones) {
    if (is_magnetic(t.channel)) {
      ++n_magnetic;
      magnetic = &t;
    } else if (t.channel == Channel::mechanical_dm2) {
      ++n_mech_dm2;
      mech_dm2 = &t;
    } else {
      ++n_mech_dm1;
      mech_dm1 = &t;
    }
  }
  if (n_magnetic > 1 || n_mech_dm2 > 1 || n_mech_dm1 > 1 ||
      (n_mech_dm1 > 0 && (n_magnetic > 0 || n_mech_dm2 > 0))) {
    throw config_error(
        "unsupported tone combination: supported sets are {magnetic probe + "
        "mechanical_dm2}, {magnetic}, {mechanical}");
  }

  const double inh = inhomogeneous_detuning_hz;
  Matrix3c h = Matrix3c::Zero();
  // the inhomogeneous zero-field shift moves |+1> and |-1> together
  h(kPlus, kPlus) = inh;
  h(kMinus, kMinus) = inh;

  if (magnetic) {
    const int lvl =
        magnetic->channel == Channel::magnetic_plus ? kPlus : kMinus;
    h(lvl, lvl) -= magnetic->detuning_hz;
    h(lvl, kZero) += 0.5 * magnetic->rabi_hz;
    h(kZero, lvl) += 0.5 * std::conj(magnetic->rabi_hz);
    if (mech_dm2) {
      // the mechanical tone ladders off the magnetically probed level
      const int other = lvl == kPlus ? kMinus : kPlus;
      h(other, other) -= magnetic->detuning_hz + mech_dm2->detuning_hz;
      h(kPlus, kMinus) += 0.5 * mech_dm2->rabi_hz;
      h(kMinus, kPlus) += 0.5 * std::conj(mech_dm2->rabi_hz);
    }
  } else if (mech_dm2) {
    h(kPlus, kPlus) -= mech_dm2->detuning_hz;
    h(kPlus, kMinus) += 0.5 * mech_dm2->rabi_hz;
    h(kMinus, kPlus) += 0.5 * std::conj(mech_dm2->rabi_hz);
  } else if (mech_dm1) {
    h(kMinus, kMinus) -= mech_dm1->detuning_hz;
    h(kMinus, kZero) += 0.5 * mech_dm1->rabi_hz;
    h(kZero, kMinus) += 0.5 * std::conj(mech_dm1->rabi_hz);
  }
  return h;
}

Eigen::Vector3d SpinState::populations() const { return amp.cwiseAbs2(); }

SpinState ground_state() {
  SpinState s;
  s.amp(kZero) = 1.0;
  return s;
}

double pl_readout(const Eigen::Vector3d& populations, const ReadoutModel& m) {
  return m.pl_base + m.contrast_sign * m.pl_slope * populations(kZero);
}

std::vector<SpinState> propagate(
    const PulseSequence& seq,
    const std::function<Matrix3c(const Segment&, int)>& h_of_segment,
    const SpinState& psi0, const ReadoutModel& readout) {
  if (std::abs(psi0.norm() - 1.0) > 1e-9) {
    throw config_error("initial state is not normalized");
  }
  std::vector<SpinState> trajectory;
  trajectory.reserve(seq.segments.size());
  SpinState psi = psi0;
  for (std::size_t i = 0; i < seq.segments.size(); ++i) {
    const Segment& seg = seq.segments[i];
    if (seg.duration_s < 0.0) {
      throw config_error("segment duration must be non-negative");
    }
    if (seg.duration_s > 0.0) {
      evolve(psi, h_of_segment(seg, static_cast<int>(i)), seg.duration_s);
    }
    if (seg.laser_on) {
      apply_laser_reset(psi, readout.init_polarization);
    }
    trajectory.push_back(psi);
  }
  return trajectory;
}

DressedLines dressed_lines(Complex omega_m_rabi_hz, double mech_detuning_hz,
                           double inhomogeneous_detuning_hz) {
  // {|+1>, |-1>} block of the mech-driven frame, inh removed:
  //   A = [[-dm, w/2], [w*/2, 0]],  eigenvalues mu = -dm/2 +- root
  const double dm = mech_detuning_hz;
  const double w2 = std::norm(omega_m_rabi_hz);
  const double root = 0.5 * std::sqrt(dm * dm + w2);

  DressedLines lines;
  for (int j = 0; j < 2; ++j) {
    const double mu = -0.5 * dm + (j == 0 ? -root : root);
    lines.center_hz[j] = inhomogeneous_detuning_hz + mu;
    // eigenvector (a, b) with a = w/2 on |+1> and b = dm + mu on |-1>
    const double a2 = 0.25 * w2;
    const double b2 = (dm + mu) * (dm + mu);
    const double n = a2 + b2;
    lines.weight[j] = n > 0.0 ? b2 / n : 0.5;
  }
  return lines;
}

analysis::Spectrum dressed_spectrum(Complex omega_m_rabi_hz,
                                    double mech_detuning_hz,
                                    std::span<const double> probe_detunings_hz,
                                    double probe_rabi_hz,
                                    double linewidth_fwhm_hz) {
  if (probe_detunings_hz.empty()) {
    throw config_error("probe range is empty");
  }
  const DressedLines lines =
      dressed_lines(omega_m_rabi_hz, mech_detuning_hz, 0.0);
  const double fwhm = std::hypot(linewidth_fwhm_hz, std::abs(probe_rabi_hz));
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));

  analysis::Spectrum s;
  s.x.assign(probe_detunings_hz.begin(), probe_detunings_hz.end());
  s.y.resize(s.x.size(), 0.0);
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    double v = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double d = (s.x[i] - lines.center_hz[j]) / sigma;
      v += lines.weight[j] * std::exp(-0.5 * d * d);
    }
    s.y[i] = v;
  }
  return s;
}

std::vector<double> simulate_rabi_sequence(Complex omega_m_rabi_hz,
                                           const PiPulseParams& pi_pulse,
                                           std::span<const double> tau_s,
                                           double mech_detuning_hz,
                                           double inhomogeneous_detuning_hz) {
  // one frame for the whole sequence; the zero-amplitude magnetic tone keeps
  // the frame pinned while only the mechanical drive runs
  const DriveTone mech{Channel::mechanical_dm2, omega_m_rabi_hz,
                       mech_detuning_hz};
  const DriveTone pi_on{Channel::magnetic_minus, pi_pulse.rabi_hz, 0.0};
  const DriveTone pi_off{Channel::magnetic_minus, 0.0, 0.0};
  const DriveTone drive_tones[] = {pi_off, mech};
  const Matrix3c h_drive =
      rwa_hamiltonian(drive_tones, inhomogeneous_detuning_hz);
  const DriveTone pulse_tones[] = {pi_on, mech};
  const Matrix3c h_pulse =
      rwa_hamiltonian(pulse_tones, inhomogeneous_detuning_hz);

  Matrix3c pi_gate = Matrix3c::Zero();  // exact pi on the {|0>, |-1>} pair
  pi_gate(kPlus, kPlus) = 1.0;
  pi_gate(kZero, kMinus) = Complex(0.0, -1.0);
  pi_gate(kMinus, kZero) = Complex(0.0, -1.0);

  std::vector<double> signal;
  signal.reserve(tau_s.size());
  for (double tau : tau_s) {
    if (tau < 0.0) {
      throw config_error("tau must be non-negative");
    }
    SpinState psi = ground_state();
    if (pi_pulse.instantaneous) {
      psi.amp = pi_gate * psi.amp;
    } else {
      evolve(psi, h_pulse, 1.0 / (2.0 * pi_pulse.rabi_hz));
    }
    if (tau > 0.0) {
      evolve(psi, h_drive, tau);
    }
    const Eigen::Vector3d p = psi.populations();
    signal.push_back(p(kMinus) - p(kPlus));
  }
  return signal;
}

std::vector<double> simulate_apr_scan(const AprParams& p,
                                      std::span<const double> db0_gauss,
                                      double inhomogeneous_detuning_hz) {
  const double gamma_hz_per_g = p.gamma_mhz_per_g * 1e6;
  const double tau_c = acoustics::cavity_time_constant(p.cavity);
  // cavity filter on the mechanical drive only; the stray magnetic field
  // from the transducer current is unfiltered
  const double steady = acoustics::cavity_response(p.cavity, p.drive_offset_hz);
  const int n = std::max(1, p.substeps);

  const auto cycle_pl = [&](double db_total) {
    // raising B0 lowers the |0> -> |-1> transition by gamma * dB
    const double detuning = p.drive_offset_hz + gamma_hz_per_g * db_total -
                            inhomogeneous_detuning_hz;

    SpinState psi = ground_state();
    // pump: RF on, cavity rings up, laser off
    const double dt_pump = p.pump_duration_s / n;
    for (int i = 0; i < n; ++i) {
      const double t_mid = (i + 0.5) * dt_pump;
      const Complex rabi =
          steady * (1.0 - std::exp(-t_mid / tau_c)) * p.mech_dm1_rabi_hz +
          p.residual_magnetic_rabi_hz;
      const DriveTone tones[] = {{Channel::mechanical_dm1, rabi, detuning}};
      evolve(psi, rwa_hamiltonian(tones, 0.0), dt_pump);
    }
    const double rung_up =
        steady * (1.0 - std::exp(-p.pump_duration_s / tau_c));

    // probe: RF off, cavity rings down, laser integrates PL
    double pl_sum = 0.0;
    const double dt_probe = p.probe_duration_s / n;
    for (int i = 0; i < n; ++i) {
      const double t_mid = (i + 0.5) * dt_probe;
      const Complex rabi =
          rung_up * std::exp(-t_mid / tau_c) * p.mech_dm1_rabi_hz;
      const DriveTone tones[] = {{Channel::mechanical_dm1, rabi, detuning}};
      evolve(psi, rwa_hamiltonian(tones, 0.0), dt_probe);
      pl_sum += psi.populations()(kZero);
    }
    return pl_sum / n;
  };

  std::vector<double> contrast;
  contrast.reserve(db0_gauss.size());
  for (double db0 : db0_gauss) {
    contrast.push_back(cycle_pl(db0) - cycle_pl(db0 + p.modulation_depth_g));
  }
  return contrast;
}

}  // namespace sawspin::dynamics
