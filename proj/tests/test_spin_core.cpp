#include <doctest.h>

#include <complex>
#include <numbers>
#include <random>

#include "sawspin/errors.hpp"
#include "sawspin/spin_core.hpp"

using namespace sawspin;
using spin::Complex;
using spin::Matrix3c;
using spin::StrainTensor;

namespace {

// independent oracle: spin matrices from the S+/S- ladder on the
// (|+1>, |0>, |-1>) basis
struct LadderOracle {
  Matrix3c sx, sy, sz;

  LadderOracle() {
    Matrix3c sp = Matrix3c::Zero();
    sp(0, 1) = std::sqrt(2.0);
    sp(1, 2) = std::sqrt(2.0);
    const Matrix3c sm = sp.adjoint();
    sx = 0.5 * (sp + sm);
    sy = Complex(0.0, -0.5) * (sp - sm);
    sz = Matrix3c::Zero();
    sz(0, 0) = 1.0;
    sz(2, 2) = -1.0;
  }
};

// independent oracle: contraction S . dd . S by explicit index loops
Matrix3c contraction_oracle(const Eigen::Matrix3d& dd) {
  const LadderOracle op;
  const Matrix3c s[3] = {op.sx, op.sy, op.sz};
  Matrix3c h = Matrix3c::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      h += dd(i, j) * s[i] * s[j];
    }
  }
  return h;
}

StrainTensor scale_strain(const StrainTensor& e, double a) {
  StrainTensor out = e;
  out.exx *= a;
  out.eyy *= a;
  out.ezz *= a;
  out.eyz *= a;
  out.exz *= a;
  out.exy *= a;
  return out;
}

StrainTensor add_strain(const StrainTensor& a, const StrainTensor& b) {
  StrainTensor out;
  out.exx = a.exx + b.exx;
  out.eyy = a.eyy + b.eyy;
  out.ezz = a.ezz + b.ezz;
  out.eyz = a.eyz + b.eyz;
  out.exz = a.exz + b.exz;
  out.exy = a.exy + b.exy;
  return out;
}

}  // namespace

TEST_CASE("spin operators match the ladder construction") {
  const spin::SpinOperators ops = spin::build_spin_operators();
  const LadderOracle oracle;
  CHECK((ops.sx - oracle.sx).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((ops.sy - oracle.sy).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((ops.sz - oracle.sz).cwiseAbs().maxCoeff() < 1e-15);

  // sz = diag(1, 0, -1)
  CHECK(ops.sz(0, 0) == Complex(1.0, 0.0));
  CHECK(ops.sz(1, 1) == Complex(0.0, 0.0));
  CHECK(ops.sz(2, 2) == Complex(-1.0, 0.0));
}

TEST_CASE("spin operator invariants") {
  const spin::SpinOperators& op = spin::spin_operators();

  const Matrix3c comm_xy = op.sx * op.sy - op.sy * op.sx;
  const Matrix3c comm_yz = op.sy * op.sz - op.sz * op.sy;
  const Matrix3c comm_zx = op.sz * op.sx - op.sx * op.sz;
  const Complex i(0.0, 1.0);
  CHECK((comm_xy - i * op.sz).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((comm_yz - i * op.sx).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((comm_zx - i * op.sy).cwiseAbs().maxCoeff() < 1e-14);

  const Matrix3c casimir = op.sx2 + op.sy2 + op.sz2;
  CHECK((casimir - 2.0 * Matrix3c::Identity()).cwiseAbs().maxCoeff() < 1e-14);

  for (const Matrix3c* m :
       {&op.sx2, &op.sy2, &op.sz2, &op.sxsy, &op.sxsz, &op.sysz}) {
    CHECK((*m - m->adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("dm2 operator matrix elements") {
  const spin::SpinOperators& op = spin::spin_operators();
  // <+1|(sx^2 - sy^2)|-1> = 1 and <+1|{sx,sy}|-1> = -i, computed from the
  // ladder forms (S+^2 + S-^2)/2 and (S+^2 - S-^2)/2i
  const Matrix3c diff = op.sx2 - op.sy2;
  CHECK(std::abs(diff(0, 2) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(op.sxsy(0, 2) - Complex(0.0, -1.0)) < 1e-15);
}

TEST_CASE("g_voigt_matrix follows the 3m pattern") {
  SUBCASE("all zero") {
    CHECK(spin::g_voigt_matrix({}).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("(6,6) carries (g11-g12)/2") {
    spin::GTensorC3v g;
    g.g11 = 1.0;
    const spin::Matrix6d m = spin::g_voigt_matrix(g);
    CHECK(m(5, 5) == doctest::Approx(0.5));
    CHECK(m(0, 0) == doctest::Approx(1.0));
    CHECK(m(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("g14 placement and sign flips") {
    spin::GTensorC3v g;
    g.g14 = 5.0;
    const spin::Matrix6d m = spin::g_voigt_matrix(g);
    CHECK(m(0, 3) == doctest::Approx(5.0));
    CHECK(m(1, 3) == doctest::Approx(-5.0));
    CHECK(m(3, 0) == doctest::Approx(5.0));
    CHECK(m(3, 1) == doctest::Approx(-5.0));
    CHECK(m(4, 5) == doctest::Approx(5.0));
    CHECK(m(5, 4) == doctest::Approx(5.0));
    // nothing else is populated
    spin::Matrix6d expected = spin::Matrix6d::Zero();
    expected(0, 3) = 5.0;
    expected(1, 3) = -5.0;
    expected(3, 0) = 5.0;
    expected(3, 1) = -5.0;
    expected(4, 5) = 5.0;
    expected(5, 4) = 5.0;
    CHECK((m - expected).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("delta_d contraction") {
  SUBCASE("zero strain") {
    spin::GTensorC3v g;
    g.g11 = 1e9;
    g.g44 = 2e9;
    CHECK(spin::delta_d(g, {}).dd.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("uniaxial") {
    spin::GTensorC3v g;
    g.g11 = 10e9;
    g.g12 = 4e9;
    StrainTensor e;
    e.exx = 1e-4;
    const spin::ZfsDelta dd = spin::delta_d(g, e);
    CHECK(dd.dd(0, 0) == doctest::Approx(1.0e6));
    CHECK(dd.dd(1, 1) == doctest::Approx(0.4e6));
  }
  SUBCASE("engineering shear factor") {
    spin::GTensorC3v g;
    g.g14 = 5e9;
    StrainTensor e;
    e.exz = 1e-4;
    const spin::ZfsDelta dd = spin::delta_d(g, e);
    CHECK(dd.dd(0, 1) == doctest::Approx(1.0e6));  // dD_xy = 2 g14 exz
  }
  SUBCASE("matches independent multiplication and stays symmetric") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      spin::GTensorC3v g{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
      StrainTensor e;
      e.exx = u(rng);
      e.eyy = u(rng);
      e.ezz = u(rng);
      e.eyz = u(rng);
      e.exz = u(rng);
      e.exy = u(rng);
      const spin::ZfsDelta dd = spin::delta_d(g, e);
      CHECK((dd.dd - dd.dd.transpose()).cwiseAbs().maxCoeff() < 1e-15);

      // oracle: explicit row contraction with engineering shear
      const double v[6] = {e.exx, e.eyy,      e.ezz,
                           2.0 * e.eyz, 2.0 * e.exz, 2.0 * e.exy};
      const double row_xx = g.g11 * v[0] + g.g12 * v[1] + g.g13 * v[2] +
                            g.g14 * v[3];
      const double row_yz = g.g14 * v[0] - g.g14 * v[1] + g.g44 * v[3];
      const double row_xy = g.g14 * v[4] + 0.5 * (g.g11 - g.g12) * v[5];
      CHECK(dd.dd(0, 0) == doctest::Approx(row_xx).epsilon(1e-12));
      CHECK(dd.dd(1, 2) == doctest::Approx(row_yz).epsilon(1e-12));
      CHECK(dd.dd(0, 1) == doctest::Approx(row_xy).epsilon(1e-12));
    }
  }
}

TEST_CASE("hamiltonian spectra") {
  SUBCASE("kk at zero field") {
    const spin::DefectSpecies kk = spin::make_species(spin::SpeciesKind::kk);
    const Matrix3c h = spin::hamiltonian(kk, {}, {});
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(h);
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx(1.305e9).epsilon(1e-12));
    CHECK(es.eigenvalues()(2) == doctest::Approx(1.305e9).epsilon(1e-12));
  }
  SUBCASE("kk at 266.2 G reaches the cavity frequency") {
    const spin::DefectSpecies kk = spin::make_species(spin::SpeciesKind::kk);
    spin::MagneticField b;
    b.bz_g = 266.2;
    const Matrix3c h = spin::hamiltonian(kk, b, {});
    // axial field keeps the matrix diagonal in the m_s basis
    const double f_minus = h(2, 2).real() - h(1, 1).real();
    CHECK(f_minus == doctest::Approx(1.305e9 - 2.8e6 * 266.2).epsilon(1e-12));
    CHECK(f_minus == doctest::Approx(559.64e6).epsilon(1e-4));
  }
  SUBCASE("dD_xy only couples |+1> and |-1>") {
    const spin::DefectSpecies kk = spin::make_species(spin::SpeciesKind::kk);
    spin::ZfsDelta dd;
    dd.dd(0, 1) = dd.dd(1, 0) = 2.5e6;
    const Matrix3c h = spin::hamiltonian(kk, {}, dd);
    CHECK(std::abs(h(0, 1)) < 1e-12);
    CHECK(std::abs(h(1, 2)) < 1e-12);
    CHECK(std::abs(h(0, 2)) > 1e5);
  }
  SUBCASE("invalid species constants are rejected") {
    spin::DefectSpecies bad = spin::make_species(spin::SpeciesKind::kk);
    bad.d0_ghz = 0.0;
    CHECK_THROWS_AS(spin::hamiltonian(bad, {}, {}), config_error);
  }
}

TEST_CASE("transition_rate_dm2 examples") {
  SUBCASE("uniaxial channel is real") {
    spin::GTensorC3v g;
    g.g11 = 4e9;
    g.g12 = -2e9;  // g11 - g12 = 6 GHz
    StrainTensor e;
    e.exx = 1e-4;
    const Complex rate = spin::transition_rate_dm2(g, e);
    CHECK(rate.real() == doctest::Approx(0.3e6).epsilon(1e-12));
    CHECK(std::abs(rate.imag()) < 1e-9);
  }
  SUBCASE("shear channel is imaginary") {
    spin::GTensorC3v g;
    g.g14 = 5e9;
    StrainTensor e;
    e.exz = 1e-4;
    const Complex rate = spin::transition_rate_dm2(g, e);
    CHECK(rate.imag() == doctest::Approx(-1.0e6).epsilon(1e-12));
    CHECK(std::abs(rate.real()) < 1e-9);
  }
  SUBCASE("zero strain") {
    spin::GTensorC3v g;
    g.g11 = 1e9;
    CHECK(std::abs(spin::transition_rate_dm2(g, {})) == 0.0);
  }
}

TEST_CASE("closed-form equivalence over 1000 random draws") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ug(-20e9, 20e9);
  std::uniform_real_distribution<double> ue(-1e-3, 1e-3);
  for (int trial = 0; trial < 1000; ++trial) {
    spin::GTensorC3v g;
    g.g11 = ug(rng);
    g.g12 = ug(rng);
    g.g13 = ug(rng);
    g.g14 = ug(rng);
    g.g33 = ug(rng);
    g.g44 = ug(rng);
    StrainTensor e;
    e.exx = ue(rng);
    e.exz = ue(rng);

    const Complex full = spin::transition_rate_dm2(g, e);
    const Complex closed =
        0.5 * (g.g11 - g.g12) * e.exx - Complex(0.0, 2.0) * g.g14 * e.exz;
    const double denom = std::max(std::abs(closed), 1e-30);
    CHECK(std::abs(full - closed) / denom < 1e-12);

    // and both agree with the ladder-oracle contraction
    const Complex oracle =
        contraction_oracle(spin::delta_d(g, e).dd)(0, 2);
    CHECK(std::abs(full - oracle) / denom < 1e-12);
  }
}

TEST_CASE("transition_rate_dm1") {
  SUBCASE("shear channel proportional to g44") {
    spin::GTensorC3v g;
    g.g44 = 7e9;
    StrainTensor e;
    e.exz = 1e-4;
    const Complex rate = spin::transition_rate_dm1(g, e);
    // dD_xz = 2 g44 exz enters as -dD_xz/sqrt(2)
    const double expected = -2.0 * 7e9 * 1e-4 / std::sqrt(2.0);
    CHECK(rate.real() == doctest::Approx(expected).epsilon(1e-12));
    const Complex oracle = contraction_oracle(spin::delta_d(g, e).dd)(1, 2);
    CHECK(std::abs(rate - oracle) < 1e-6 * std::abs(rate));
  }
  SUBCASE("axial strain does not drive dm1") {
    spin::GTensorC3v g;
    g.g11 = 5e9;
    g.g13 = 3e9;
    g.g33 = 9e9;
    StrainTensor e;
    e.ezz = 1e-3;
    CHECK(std::abs(spin::transition_rate_dm1(g, e)) < 1e-9);
  }
  SUBCASE("zero strain") {
    spin::GTensorC3v g;
    g.g44 = 1e9;
    CHECK(std::abs(spin::transition_rate_dm1(g, {})) == 0.0);
  }
  SUBCASE("same magnitude toward |+1> and |-1>") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      spin::GTensorC3v g{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
      StrainTensor e;
      e.exx = u(rng);
      e.eyy = u(rng);
      e.ezz = u(rng);
      e.eyz = u(rng);
      e.exz = u(rng);
      e.exy = u(rng);
      const Matrix3c m = spin::zfs_interaction(spin::delta_d(g, e).dd);
      CHECK(std::abs(m(1, 2)) == doctest::Approx(std::abs(m(1, 0))));
    }
  }
}

TEST_CASE("selection rules") {
  SUBCASE("in-plane dD components couple only |+1> <-> |-1>") {
    Eigen::Matrix3d dd = Eigen::Matrix3d::Zero();
    dd(0, 0) = 3e6;
    dd(1, 1) = -3e6;
    dd(0, 1) = dd(1, 0) = 1.5e6;
    const Matrix3c m = spin::zfs_interaction(dd);
    CHECK(std::abs(m(0, 1)) == 0.0);
    CHECK(std::abs(m(1, 2)) == 0.0);
    CHECK(std::abs(m(0, 2)) > 0.0);
    CHECK(std::abs(m(0, 0)) < 1e-9);
    CHECK(std::abs(m(1, 1)) < 1e-9);
  }
  SUBCASE("axial-shear dD components couple only |0> <-> |+-1>") {
    Eigen::Matrix3d dd = Eigen::Matrix3d::Zero();
    dd(0, 2) = dd(2, 0) = 2e6;
    dd(1, 2) = dd(2, 1) = -1e6;
    const Matrix3c m = spin::zfs_interaction(dd);
    CHECK(std::abs(m(0, 2)) == 0.0);
    CHECK(std::abs(m(0, 1)) > 0.0);
    CHECK(std::abs(m(1, 2)) > 0.0);
  }
}

TEST_CASE("phase property: channels add in quadrature") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    spin::GTensorC3v g;
    g.g11 = 10e9 * u(rng);
    g.g12 = 10e9 * u(rng);
    g.g14 = 10e9 * u(rng);
    StrainTensor ex, es;
    ex.exx = 1e-4 * u(rng);
    es.exz = 1e-4 * u(rng);
    const Complex rx = spin::transition_rate_dm2(g, ex);
    const Complex rs = spin::transition_rate_dm2(g, es);
    CHECK(std::abs(rx.imag()) < 1e-6);
    CHECK(std::abs(rs.real()) < 1e-6);
    const Complex sum = spin::transition_rate_dm2(g, add_strain(ex, es));
    CHECK(std::norm(sum) ==
          doctest::Approx(std::norm(rx) + std::norm(rs)).epsilon(1e-10));
  }
}

TEST_CASE("linearity of delta_d and the rates") {
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    spin::GTensorC3v g{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    StrainTensor e1, e2;
    e1.exx = u(rng);
    e1.eyy = u(rng);
    e1.ezz = u(rng);
    e1.eyz = u(rng);
    e1.exz = u(rng);
    e1.exy = u(rng);
    e2.exx = u(rng);
    e2.eyy = u(rng);
    e2.ezz = u(rng);
    e2.eyz = u(rng);
    e2.exz = u(rng);
    e2.exy = u(rng);
    const double a = u(rng), b = u(rng);

    const StrainTensor combo = add_strain(scale_strain(e1, a),
                                          scale_strain(e2, b));
    const Eigen::Matrix3d lhs = spin::delta_d(g, combo).dd;
    const Eigen::Matrix3d rhs =
        a * spin::delta_d(g, e1).dd + b * spin::delta_d(g, e2).dd;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);

    const Complex r_combo = spin::transition_rate_dm2(g, combo);
    const Complex r_sum = a * spin::transition_rate_dm2(g, e1) +
                          b * spin::transition_rate_dm2(g, e2);
    CHECK(std::abs(r_combo - r_sum) < 1e-12);
  }
}

TEST_CASE("identity shift of dD leaves transition frequencies unchanged") {
  const spin::DefectSpecies kk = spin::make_species(spin::SpeciesKind::kk);
  spin::MagneticField b;
  b.bz_g = 100.0;
  spin::ZfsDelta dd;
  dd.dd << 1e6, 2e5, 3e5,
           2e5, -4e5, 1e5,
           3e5, 1e5, 2e6;
  spin::ZfsDelta shifted = dd;
  shifted.dd += 5e6 * Eigen::Matrix3d::Identity();

  Eigen::SelfAdjointEigenSolver<Matrix3c> es1(spin::hamiltonian(kk, b, dd));
  Eigen::SelfAdjointEigenSolver<Matrix3c> es2(
      spin::hamiltonian(kk, b, shifted));
  const auto& v1 = es1.eigenvalues();
  const auto& v2 = es2.eigenvalues();
  // spectra shift rigidly: <S^2> adds 2 * 5 MHz per level... the shift is
  // c * (sx^2 + sy^2 + sz^2) = 2c * identity, so differences are preserved
  CHECK(v1(1) - v1(0) == doctest::Approx(v2(1) - v2(0)).epsilon(1e-10));
  CHECK(v1(2) - v1(0) == doctest::Approx(v2(2) - v2(0)).epsilon(1e-10));
  CHECK(v2(0) - v1(0) == doctest::Approx(1e7).epsilon(1e-10));
}

TEST_CASE("rotate_strain") {
  SUBCASE("zero angle is the identity") {
    StrainTensor e;
    e.exx = 0.3;
    e.eyz = -0.2;
    e.exy = 0.1;
    const StrainTensor r = spin::rotate_strain(e, 0.0);
    CHECK(r.exx == doctest::Approx(e.exx));
    CHECK(r.eyz == doctest::Approx(e.eyz));
    CHECK(r.exy == doctest::Approx(e.exy));
  }
  SUBCASE("quarter turn swaps exx into eyy") {
    StrainTensor e;
    e.exx = 0.7;
    const StrainTensor r = spin::rotate_strain(e, std::numbers::pi / 2.0);
    CHECK(r.eyy == doctest::Approx(0.7));
    CHECK(std::abs(r.exx) < 1e-15);
  }
  SUBCASE("quarter turn maps exz into eyz") {
    StrainTensor e;
    e.exz = 0.4;
    const StrainTensor r = spin::rotate_strain(e, std::numbers::pi / 2.0);
    CHECK(r.eyz == doctest::Approx(0.4));
    CHECK(std::abs(r.exz) < 1e-15);
  }
  SUBCASE("trace and symmetry preserved at random angles") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      StrainTensor e;
      e.exx = u(rng);
      e.eyy = u(rng);
      e.ezz = u(rng);
      e.eyz = u(rng);
      e.exz = u(rng);
      e.exy = u(rng);
      const double angle = 3.0 * u(rng);
      const StrainTensor r = spin::rotate_strain(e, angle);
      CHECK(r.exx + r.eyy + r.ezz ==
            doctest::Approx(e.exx + e.eyy + e.ezz).epsilon(1e-12));
    }
  }
}

TEST_CASE("species presets") {
  const spin::DefectSpecies hh = spin::make_species(spin::SpeciesKind::hh);
  const spin::DefectSpecies kk = spin::make_species(spin::SpeciesKind::kk);
  CHECK(hh.d0_ghz == doctest::Approx(1.336));
  CHECK(kk.d0_ghz == doctest::Approx(1.305));
  CHECK(hh.gamma_mhz_per_g == doctest::Approx(2.8));
  CHECK(kk.gamma_mhz_per_g == doctest::Approx(2.8));
  CHECK(kk.contrast_sign == 1);
}
