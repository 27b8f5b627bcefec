#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sawspin/acoustics.hpp"
#include "sawspin/analysis.hpp"

// Rotating-frame Hamiltonians, dressed-state spectra and pulse-sequence
// propagation for one S=1 spin in the (|+1>, |0>, |-1>) basis. Frequencies
// are linear (Hz); propagators use U = exp(-2*pi*i H dt).

namespace sawspin::dynamics {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

enum class Channel {
  magnetic_plus,    // |0> <-> |+1>
  magnetic_minus,   // |0> <-> |-1>
  mechanical_dm2,   // |+1> <-> |-1>
  mechanical_dm1,   // |0> <-> |-1>
};

struct DriveTone {
  Channel channel = Channel::magnetic_minus;
  Complex rabi_hz = 0.0;     // peak-strain / peak-field matrix element
  double detuning_hz = 0.0;  // tone frequency minus the addressed transition
};

// Rotating-frame Hamiltonian for a frame-consistent tone set: one magnetic
// tone, one mechanical tone, or {magnetic probe + mechanical_dm2}. Tone Rabi
// amplitudes enter as rabi/2 on the corresponding off-diagonal; detunings and
// the inhomogeneous zero-field shift (which moves both |+1> and |-1>) sit on
// the diagonal. A zero-amplitude tone still pins the frame, which keeps a
// pulse sequence in one frame while tones switch on and off. Throws
// config_error for unsupported combinations.
Matrix3c rwa_hamiltonian(std::span<const DriveTone> tones,
                         double inhomogeneous_detuning_hz);

struct SpinState {
  Vector3c amp = Vector3c::Zero();  // (|+1>, |0>, |-1>)

  Eigen::Vector3d populations() const;
  double norm() const { return amp.norm(); }
};

SpinState ground_state();  // |0>

struct ReadoutModel {
  double pl_base = 0.0;
  double pl_slope = 1.0;          // PL contrast per unit p0 population
  int contrast_sign = +1;
  double init_polarization = 1.0; // fraction reset to |0> by the laser
};

// PL = pl_base + contrast_sign * pl_slope * p0. Insensitive to how the
// remaining population is split between |+1> and |-1>.
double pl_readout(const Eigen::Vector3d& populations, const ReadoutModel& m);

struct Segment {
  double duration_s = 0.0;
  std::vector<DriveTone> tones;
  bool laser_on = false;
  bool readout = false;
};

struct PulseSequence {
  std::vector<Segment> segments;
};

// Piecewise-constant propagation: per segment psi <- exp(-2*pi*i H dt) psi
// via Hermitian eigendecomposition; laser-on segments then apply the reset
// map (populations pulled toward |0> by init_polarization, phases kept;
// full projection to |0> at init_polarization = 1). Returns the state after
// every segment. Throws numeric_error on non-finite Hamiltonian entries.
std::vector<SpinState> propagate(
    const PulseSequence& seq,
    const std::function<Matrix3c(const Segment&, int)>& h_of_segment,
    const SpinState& psi0, const ReadoutModel& readout);

// Dressed resonance positions (probe detunings) and probe weights of the
// mechanically driven {|+1>,|-1>} manifold, as seen by a weak magnetic probe
// on |0> -> |-1>.
struct DressedLines {
  double center_hz[2];
  double weight[2];
};

DressedLines dressed_lines(Complex omega_m_rabi_hz, double mech_detuning_hz,
                           double inhomogeneous_detuning_hz);

// Weak-probe dressed-state spectrum: Gaussian lines at the dressed
// resonances, FWHM = sqrt(linewidth^2 + probe_rabi^2) (inhomogeneous line
// plus probe power broadening). `probe_detunings_hz` is relative to the bare
// |0> -> |-1> transition. Throws config_error on an empty probe range.
analysis::Spectrum dressed_spectrum(Complex omega_m_rabi_hz,
                                    double mech_detuning_hz,
                                    std::span<const double> probe_detunings_hz,
                                    double probe_rabi_hz,
                                    double linewidth_fwhm_hz);

struct PiPulseParams {
  double rabi_hz = 1.0e6;      // magnetic Rabi frequency of the pi pulses
  bool instantaneous = false;  // ideal pi rotation instead of a timed pulse
};

// Mechanically driven Rabi sequence: init |0> -> magnetic pi (0 -> -1) ->
// mechanical dm2 drive for tau -> readout of p(-1) - p(+1) just before the
// second pi pulse. The mechanical drive stays on during the pi pulses.
// Returns one signal value per tau; +1 means all population in |-1>.
std::vector<double> simulate_rabi_sequence(Complex omega_m_rabi_hz,
                                           const PiPulseParams& pi_pulse,
                                           std::span<const double> tau_s,
                                           double mech_detuning_hz,
                                           double inhomogeneous_detuning_hz = 0.0);

struct AprParams {
  Complex mech_dm1_rabi_hz = 0.0;       // steady-state on-cavity drive rate
  double pump_duration_s = 20e-6;       // RF on, laser off (cavity ring-up)
  double probe_duration_s = 20e-6;      // RF off, laser on (ring-down)
  acoustics::GaussianCavityMode cavity;
  double drive_offset_hz = 0.0;         // RF drive minus cavity resonance
  double modulation_depth_g = 5.0;      // B0 modulation for the lock-in
  double gamma_mhz_per_g = 2.8;
  Complex residual_magnetic_rabi_hz = 0.0;  // stray IDT field during RF-on
  int substeps = 64;                    // piecewise-constant ring profile
};

// Interlaced pump/probe sequence with B0 field modulation. For each offset
// dB0 the PL (time-averaged p0 over the probe window) is simulated at B0 and
// at B0 + modulation; the lock-in difference is returned per offset.
std::vector<double> simulate_apr_scan(const AprParams& p,
                                      std::span<const double> db0_gauss,
                                      double inhomogeneous_detuning_hz = 0.0);

}  // namespace sawspin::dynamics
