#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "sawspin/analysis.hpp"
#include "sawspin/dynamics.hpp"
#include "sawspin/errors.hpp"

using namespace sawspin;
using dynamics::Channel;
using dynamics::Complex;
using dynamics::DriveTone;
using dynamics::Matrix3c;

namespace {

std::vector<double> make_grid(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// 2x2 eigenvalue oracle for the dressed gap
double dressed_gap_oracle(double omega, double detuning) {
  return std::sqrt(omega * omega + detuning * detuning);
}

double extracted_splitting(const analysis::Spectrum& s) {
  const analysis::SplittingResult r = analysis::extract_at_splitting(s);
  REQUIRE(r.resolved);
  return r.splitting_hz;
}

}  // namespace

TEST_CASE("rwa_hamiltonian structure") {
  SUBCASE("no tones, zero detuning is the zero matrix") {
    const Matrix3c h = dynamics::rwa_hamiltonian({}, 0.0);
    CHECK(h.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("resonant dm2 drive splits the dressed pair by the Rabi rate") {
    const DriveTone tones[] = {{Channel::mechanical_dm2, 4e6, 0.0}};
    const Matrix3c h = dynamics::rwa_hamiltonian(tones, 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(h);
    CHECK(es.eigenvalues()(2) - es.eigenvalues()(0) == doctest::Approx(4e6));
  }

  SUBCASE("detuned dm2 drive gives the hyperbolic gap") {
    const DriveTone tones[] = {{Channel::mechanical_dm2, 4e6, 3e6}};
    const Matrix3c h = dynamics::rwa_hamiltonian(tones, 0.0);
    // only the {|+1>, |-1>} block is populated
    Eigen::Matrix2cd block;
    block << h(0, 0), h(0, 2), h(2, 0), h(2, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);
    CHECK(es.eigenvalues()(1) - es.eigenvalues()(0) ==
          doctest::Approx(dressed_gap_oracle(4e6, 3e6)));
  }

  SUBCASE("magnetic tone sits on the addressed off-diagonal") {
    const DriveTone tones[] = {{Channel::magnetic_minus, Complex(1e6, 0.5e6),
                                0.2e6}};
    const Matrix3c h = dynamics::rwa_hamiltonian(tones, 0.0);
    CHECK(h(2, 1) == Complex(0.5e6, 0.25e6));
    CHECK(h(1, 2) == std::conj(h(2, 1)));
    CHECK(h(2, 2) == Complex(-0.2e6, 0.0));
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("inhomogeneous shift moves both m = +-1 levels, not the dm2 gap") {
    const DriveTone tones[] = {{Channel::magnetic_minus, 1e6, 0.0},
                               {Channel::mechanical_dm2, 4e6, 0.0}};
    const Matrix3c h = dynamics::rwa_hamiltonian(tones, 0.7e6);
    CHECK(h(0, 0).real() == doctest::Approx(0.7e6));
    CHECK(h(2, 2).real() == doctest::Approx(0.7e6));
    CHECK(h(1, 1).real() == doctest::Approx(0.0));
  }

  SUBCASE("unsupported tone combinations are rejected") {
    const DriveTone bad1[] = {{Channel::mechanical_dm1, 1e6, 0.0},
                              {Channel::mechanical_dm2, 1e6, 0.0}};
    CHECK_THROWS_AS(dynamics::rwa_hamiltonian(bad1, 0.0), config_error);
    const DriveTone bad2[] = {{Channel::magnetic_minus, 1e6, 0.0},
                              {Channel::mechanical_dm1, 1e6, 0.0}};
    CHECK_THROWS_AS(dynamics::rwa_hamiltonian(bad2, 0.0), config_error);
    const DriveTone bad3[] = {{Channel::magnetic_minus, 1e6, 0.0},
                              {Channel::magnetic_plus, 1e6, 0.0}};
    CHECK_THROWS_AS(dynamics::rwa_hamiltonian(bad3, 0.0), config_error);
  }
}

TEST_CASE("propagate") {
  const dynamics::ReadoutModel readout;

  SUBCASE("zero Hamiltonian leaves the state unchanged") {
    dynamics::PulseSequence seq;
    seq.segments.push_back({3.7e-6, {}, false, false});
    const auto h_of = [](const dynamics::Segment&, int) {
      return Matrix3c::Zero().eval();
    };
    const auto traj =
        dynamics::propagate(seq, h_of, dynamics::ground_state(), readout);
    CHECK(std::abs(traj.back().amp(1) - Complex(1.0, 0.0)) < 1e-12);
  }

  SUBCASE("resonant pi pulse transfers |0> to |-1>") {
    const double rabi = 1e6;
    dynamics::PulseSequence seq;
    dynamics::Segment seg;
    seg.duration_s = 1.0 / (2.0 * rabi);
    seg.tones = {{Channel::magnetic_minus, rabi, 0.0}};
    seq.segments.push_back(seg);
    const auto h_of = [](const dynamics::Segment& s, int) {
      return dynamics::rwa_hamiltonian(s.tones, 0.0);
    };
    const auto traj =
        dynamics::propagate(seq, h_of, dynamics::ground_state(), readout);
    CHECK(traj.back().populations()(2) > 0.9999);

    // two-level Rabi oracle sin^2(pi Omega t) along the pulse
    for (double frac : {0.25, 0.5, 0.75}) {
      dynamics::PulseSequence part;
      dynamics::Segment pseg = seg;
      pseg.duration_s = frac / (2.0 * rabi);
      part.segments.push_back(pseg);
      const auto t =
          dynamics::propagate(part, h_of, dynamics::ground_state(), readout);
      const double expected =
          std::pow(std::sin(std::numbers::pi * rabi * pseg.duration_s), 2);
      CHECK(t.back().populations()(2) ==
            doctest::Approx(expected).epsilon(1e-8));
    }
  }

  SUBCASE("two pi pulses return to |0>") {
    const double rabi = 2e6;
    dynamics::PulseSequence seq;
    dynamics::Segment seg;
    seg.duration_s = 1.0 / (2.0 * rabi);
    seg.tones = {{Channel::magnetic_minus, rabi, 0.0}};
    seq.segments.push_back(seg);
    seq.segments.push_back(seg);
    const auto h_of = [](const dynamics::Segment& s, int) {
      return dynamics::rwa_hamiltonian(s.tones, 0.0);
    };
    const auto traj =
        dynamics::propagate(seq, h_of, dynamics::ground_state(), readout);
    CHECK(traj.back().populations()(1) == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("norm is preserved without renormalization") {
    dynamics::PulseSequence seq;
    for (int i = 0; i < 64; ++i) {
      dynamics::Segment seg;
      seg.duration_s = 0.3e-6;
      seg.tones = {{Channel::magnetic_minus, Complex(1.1e6, 0.4e6), 0.35e6}};
      seq.segments.push_back(seg);
    }
    const auto h_of = [](const dynamics::Segment& s, int) {
      return dynamics::rwa_hamiltonian(s.tones, 0.2e6);
    };
    const auto traj =
        dynamics::propagate(seq, h_of, dynamics::ground_state(), readout);
    CHECK(std::abs(traj.back().norm() - 1.0) < 1e-10);
  }

  SUBCASE("accumulated propagator is unitary") {
    const DriveTone tones[] = {{Channel::magnetic_minus, 1e6, 0.0},
                               {Channel::mechanical_dm2, Complex(0, 4e6),
                                0.5e6}};
    const Matrix3c h = dynamics::rwa_hamiltonian(tones, 0.1e6);
    const auto h_of = [&](const dynamics::Segment&, int) { return h; };
    Matrix3c u = Matrix3c::Identity();
    for (int i = 0; i < 100; ++i) {
      Matrix3c step;
      for (int c = 0; c < 3; ++c) {
        dynamics::SpinState psi;
        psi.amp.setZero();
        psi.amp(c) = 1.0;
        dynamics::PulseSequence seq;
        dynamics::Segment seg;
        seg.duration_s = 0.1e-6;
        seq.segments.push_back(seg);
        step.col(c) =
            dynamics::propagate(seq, h_of, psi, dynamics::ReadoutModel{})
                .back()
                .amp;
      }
      u = step * u;
    }
    CHECK((u.adjoint() * u - Matrix3c::Identity()).cwiseAbs().maxCoeff() <
          1e-10);
  }

  SUBCASE("laser reset projects to |0>") {
    dynamics::PulseSequence seq;
    dynamics::Segment drive;
    drive.duration_s = 0.2e-6;
    drive.tones = {{Channel::magnetic_minus, 1e6, 0.0}};
    seq.segments.push_back(drive);
    dynamics::Segment laser;
    laser.duration_s = 0.0;
    laser.laser_on = true;
    seq.segments.push_back(laser);
    const auto h_of = [](const dynamics::Segment& s, int) {
      return dynamics::rwa_hamiltonian(s.tones, 0.0);
    };
    const auto traj =
        dynamics::propagate(seq, h_of, dynamics::ground_state(), readout);
    CHECK(traj.back().populations()(1) == doctest::Approx(1.0));

    // partial polarization pulls populations toward |0>
    dynamics::ReadoutModel partial;
    partial.init_polarization = 0.5;
    const auto traj2 =
        dynamics::propagate(seq, h_of, dynamics::ground_state(), partial);
    const double p0_driven = traj.front().populations()(1);
    const double p0_after = traj2.back().populations()(1);
    CHECK(p0_after == doctest::Approx(0.5 + 0.5 * p0_driven).epsilon(1e-9));
  }

  SUBCASE("non-finite Hamiltonian is rejected") {
    dynamics::PulseSequence seq;
    seq.segments.push_back({1e-6, {}, false, false});
    const auto h_of = [](const dynamics::Segment&, int) {
      Matrix3c h = Matrix3c::Zero();
      h(0, 0) = std::numeric_limits<double>::quiet_NaN();
      return h;
    };
    CHECK_THROWS_AS(
        dynamics::propagate(seq, h_of, dynamics::ground_state(), {}),
        numeric_error);
  }
}

TEST_CASE("pl_readout") {
  dynamics::ReadoutModel m;
  m.pl_base = 1.0;
  m.pl_slope = 0.05;
  m.contrast_sign = +1;

  CHECK(dynamics::pl_readout({0.0, 1.0, 0.0}, m) == doctest::Approx(1.05));
  // insensitive to the +1 / -1 distribution
  CHECK(dynamics::pl_readout({1.0, 0.0, 0.0}, m) ==
        dynamics::pl_readout({0.0, 0.0, 1.0}, m));
  // linear midpoint
  CHECK(dynamics::pl_readout({0.25, 0.5, 0.25}, m) ==
        doctest::Approx(1.0 + 0.05 * 0.5));
  m.contrast_sign = -1;
  CHECK(dynamics::pl_readout({0.0, 1.0, 0.0}, m) == doctest::Approx(0.95));
}

TEST_CASE("dressed_spectrum") {
  const std::vector<double> probe = make_grid(-8e6, 8e6, 321);

  SUBCASE("resonant splitting equals the drive rate") {
    const analysis::Spectrum s =
        dynamics::dressed_spectrum(4e6, 0.0, probe, 0.2e6, 1e6);
    CHECK(extracted_splitting(s) == doctest::Approx(4e6).epsilon(0.02));
  }

  SUBCASE("zero drive collapses to a single line at the bare transition") {
    const analysis::Spectrum s =
        dynamics::dressed_spectrum(0.0, 0.0, probe, 0.2e6, 1e6);
    const analysis::SplittingResult r = analysis::extract_at_splitting(s);
    CHECK_FALSE(r.resolved);
    CHECK(r.upper_bound_hz ==
          doctest::Approx(std::hypot(1e6, 0.2e6)).epsilon(0.05));
    std::size_t imax = 0;
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (s.y[i] > s.y[imax]) imax = i;
    }
    CHECK(std::abs(s.x[imax]) < 1e5);
  }

  SUBCASE("detuned drive follows sqrt(delta^2 + omega^2)") {
    for (double delta : {-4e6, -2e6, 1e6, 3e6}) {
      const analysis::Spectrum s =
          dynamics::dressed_spectrum(4e6, delta, probe, 0.2e6, 1e6);
      CHECK(extracted_splitting(s) ==
            doctest::Approx(dressed_gap_oracle(4e6, delta)).epsilon(0.02));
    }
  }

  SUBCASE("weak-probe independence") {
    const analysis::Spectrum s1 =
        dynamics::dressed_spectrum(4e6, 0.0, probe, 0.4e6, 1e6);
    const analysis::Spectrum s2 =
        dynamics::dressed_spectrum(4e6, 0.0, probe, 0.2e6, 1e6);
    const double d1 = extracted_splitting(s1);
    const double d2 = extracted_splitting(s2);
    CHECK(std::abs(d1 - d2) / d2 < 0.02);
  }

  SUBCASE("complex drive phase does not move the lines") {
    const Complex rot = 4e6 * std::exp(Complex(0.0, 1.1));
    const analysis::Spectrum s =
        dynamics::dressed_spectrum(rot, 0.0, probe, 0.2e6, 1e6);
    CHECK(extracted_splitting(s) == doctest::Approx(4e6).epsilon(0.02));
  }

  SUBCASE("empty probe range is rejected") {
    CHECK_THROWS_AS(dynamics::dressed_spectrum(4e6, 0.0, {}, 0.2e6, 1e6),
                    config_error);
  }
}

TEST_CASE("dressed_lines weights") {
  // far-detuned drive: the |-1>-like line keeps all probe weight
  const dynamics::DressedLines lines = dynamics::dressed_lines(0.1e6, 5e6, 0.0);
  const int bright = lines.weight[0] > lines.weight[1] ? 0 : 1;
  CHECK(lines.weight[bright] > 0.99);
  CHECK(std::abs(lines.center_hz[bright]) < 1e4);
  // inhomogeneous shift moves both lines rigidly
  const dynamics::DressedLines shifted =
      dynamics::dressed_lines(4e6, 1e6, 0.3e6);
  const dynamics::DressedLines base = dynamics::dressed_lines(4e6, 1e6, 0.0);
  CHECK(shifted.center_hz[0] - base.center_hz[0] == doctest::Approx(0.3e6));
  CHECK(shifted.center_hz[1] - base.center_hz[1] == doctest::Approx(0.3e6));
}

TEST_CASE("simulate_rabi_sequence") {
  SUBCASE("ideal pulses: tau = 0 reads +1, half period reads -1") {
    dynamics::PiPulseParams ideal;
    ideal.instantaneous = true;
    const double omega = 4e6;
    const std::vector<double> taus = {0.0, 1.0 / (2.0 * omega), 1.0 / omega};
    const auto signal =
        dynamics::simulate_rabi_sequence(omega, ideal, taus, 0.0, 0.0);
    CHECK(signal[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(signal[1] == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(signal[2] == doctest::Approx(1.0).epsilon(1e-8));
  }

  SUBCASE("resonant trace follows the two-level oracle cos(2 pi omega tau)") {
    dynamics::PiPulseParams ideal;
    ideal.instantaneous = true;
    const double omega = 4e6;
    const std::vector<double> taus = make_grid(0.0, 1e-6, 101);
    const auto signal =
        dynamics::simulate_rabi_sequence(omega, ideal, taus, 0.0, 0.0);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      CHECK(signal[i] ==
            doctest::Approx(std::cos(2.0 * std::numbers::pi * omega * taus[i]))
                .epsilon(1e-8));
    }
  }

  SUBCASE("oscillation frequency equals the drive rate") {
    dynamics::PiPulseParams ideal;
    ideal.instantaneous = true;
    const double omega = 3.7e6;
    const std::vector<double> taus = make_grid(0.0, 1e-6, 2001);
    const auto signal =
        dynamics::simulate_rabi_sequence(omega, ideal, taus, 0.0, 0.0);
    // first zero crossing of the cosine at omega tau = 1/4
    double crossing = 0.0;
    for (std::size_t i = 1; i < taus.size(); ++i) {
      if (signal[i - 1] > 0.0 && signal[i] <= 0.0) {
        const double frac = signal[i - 1] / (signal[i - 1] - signal[i]);
        crossing = taus[i - 1] + frac * (taus[i] - taus[i - 1]);
        break;
      }
    }
    REQUIRE(crossing > 0.0);
    CHECK(1.0 / (4.0 * crossing) == doctest::Approx(omega).epsilon(1e-3));
  }

  SUBCASE("finite pulses show the three-level tau = 0 deficit") {
    dynamics::PiPulseParams finite;
    finite.rabi_hz = 1e6;
    const std::vector<double> taus = {0.0};
    const auto with_mech =
        dynamics::simulate_rabi_sequence(4e6, finite, taus, 0.0, 0.0);
    // a two-level-only model (mechanical drive off during the pulse) reads
    // exactly +1 after a perfect pi pulse
    const auto two_level =
        dynamics::simulate_rabi_sequence(0.0, finite, taus, 0.0, 0.0);
    CHECK(two_level[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(with_mech[0] < two_level[0] - 0.05);
  }

  SUBCASE("mechanically detuned drive limits the transfer") {
    dynamics::PiPulseParams ideal;
    ideal.instantaneous = true;
    const double omega = 4e6, delta = 3e6;
    const std::vector<double> taus = make_grid(0.0, 0.5e-6, 501);
    const auto signal =
        dynamics::simulate_rabi_sequence(omega, ideal, taus, delta, 0.0);
    // generalized Rabi: transfer capped at omega^2 / (omega^2 + delta^2)
    double min_signal = 1.0;
    for (double v : signal) min_signal = std::min(min_signal, v);
    const double limit =
        1.0 - 2.0 * omega * omega / (omega * omega + delta * delta);
    CHECK(min_signal == doctest::Approx(limit).epsilon(1e-3));
  }

  SUBCASE("negative tau is rejected") {
    dynamics::PiPulseParams ideal;
    ideal.instantaneous = true;
    const std::vector<double> taus = {-1e-9};
    CHECK_THROWS_AS(dynamics::simulate_rabi_sequence(1e6, ideal, taus, 0.0),
                    config_error);
  }
}

TEST_CASE("simulate_apr_scan") {
  dynamics::AprParams params;
  params.cavity.wavelength_m = 12e-6;
  params.cavity.waist_m = 24e-6;
  params.cavity.q_loaded = 16000.0;
  params.cavity.omega_m_rad_s = 2.0 * std::numbers::pi * 559.6e6;
  params.mech_dm1_rabi_hz = 0.05e6;
  params.gamma_mhz_per_g = 2.8;
  params.modulation_depth_g = 5.0;
  params.substeps = 48;

  const std::vector<double> db0 = make_grid(-3.0, 3.0, 41);

  SUBCASE("zero drive gives a flat zero curve") {
    dynamics::AprParams none = params;
    none.mech_dm1_rabi_hz = 0.0;
    const auto contrast = dynamics::simulate_apr_scan(none, db0, 0.0);
    for (double v : contrast) {
      CHECK(std::abs(v) < 1e-12);
    }
  }

  SUBCASE("on-cavity dip is centered and off-cavity drive is suppressed") {
    const auto on = dynamics::simulate_apr_scan(params, db0, 0.0);
    dynamics::AprParams off = params;
    off.drive_offset_hz = 2e6;
    const auto off_scan = dynamics::simulate_apr_scan(off, db0, 0.0);

    std::size_t imax = 0;
    double on_max = 0.0, off_max = 0.0;
    for (std::size_t i = 0; i < db0.size(); ++i) {
      if (std::abs(on[i]) > std::abs(on[imax])) imax = i;
      on_max = std::max(on_max, std::abs(on[i]));
      off_max = std::max(off_max, std::abs(off_scan[i]));
    }
    CHECK(std::abs(db0[imax]) < 0.2);
    CHECK(on_max > 5.0 * off_max);
  }

  SUBCASE("width grows with drive broadening and detuning spread") {
    const auto width_of = [&](const std::vector<double>& scan) {
      double peak = 0.0;
      for (double v : scan) peak = std::max(peak, std::abs(v));
      int count = 0;
      for (double v : scan) {
        if (std::abs(v) > 0.5 * peak) ++count;
      }
      return count;
    };

    const auto narrow = dynamics::simulate_apr_scan(params, db0, 0.0);

    // averaging over a static detuning spread broadens the dip
    std::vector<double> broadened(db0.size(), 0.0);
    for (double det : {-1.0e6, -0.5e6, 0.0, 0.5e6, 1.0e6}) {
      const auto scan = dynamics::simulate_apr_scan(params, db0, det);
      for (std::size_t i = 0; i < scan.size(); ++i) {
        broadened[i] += scan[i] / 5.0;
      }
    }
    CHECK(width_of(broadened) > width_of(narrow));

    dynamics::AprParams strong = params;
    strong.mech_dm1_rabi_hz = 0.4e6;
    const auto wide = dynamics::simulate_apr_scan(strong, db0, 0.0);
    CHECK(width_of(wide) > width_of(narrow));
  }

  SUBCASE("residual magnetic drive persists off cavity") {
    dynamics::AprParams off = params;
    off.drive_offset_hz = 2e6;
    off.mech_dm1_rabi_hz = 0.0;
    off.residual_magnetic_rabi_hz = 0.05e6;
    const auto scan = dynamics::simulate_apr_scan(off, db0, 0.0);
    double peak = 0.0;
    for (double v : scan) peak = std::max(peak, std::abs(v));
    CHECK(peak > 1e-4);
  }
}
