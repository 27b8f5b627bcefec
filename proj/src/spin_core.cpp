#include "sawspin/spin_core.hpp"

#include <cmath>

#include "sawspin/errors.hpp"

namespace sawspin::spin {

namespace {
constexpr Complex kI{0.0, 1.0};
}

SpinOperators build_spin_operators() {
  SpinOperators ops;
  const double r = 1.0 / std::sqrt(2.0);

  ops.sx << 0, r, 0,
            r, 0, r,
            0, r, 0;
  ops.sy << 0, -kI * r, 0,
            kI * r, 0, -kI * r,
            0, kI * r, 0;
  ops.sz << 1, 0, 0,
            0, 0, 0,
            0, 0, -1;

  ops.sx2 = ops.sx * ops.sx;
  ops.sy2 = ops.sy * ops.sy;
  ops.sz2 = ops.sz * ops.sz;
  ops.sxsy = ops.sx * ops.sy + ops.sy * ops.sx;
  ops.sxsz = ops.sx * ops.sz + ops.sz * ops.sx;
  ops.sysz = ops.sy * ops.sz + ops.sz * ops.sy;
  return ops;
}

const SpinOperators& spin_operators() {
  static const SpinOperators ops = build_spin_operators();
  return ops;
}

Matrix6d g_voigt_matrix(const GTensorC3v& g) {
  Matrix6d m = Matrix6d::Zero();
  // Trigonal 3m pattern, rows/columns in Voigt order (xx, yy, zz, yz, xz, xy).
  m(0, 0) = g.g11;  m(0, 1) = g.g12;  m(0, 2) = g.g13;  m(0, 3) = g.g14;
  m(1, 0) = g.g12;  m(1, 1) = g.g11;  m(1, 2) = g.g13;  m(1, 3) = -g.g14;
  m(2, 0) = g.g13;  m(2, 1) = g.g13;  m(2, 2) = g.g33;
  m(3, 0) = g.g14;  m(3, 1) = -g.g14; m(3, 3) = g.g44;
  m(4, 4) = g.g44;  m(4, 5) = g.g14;
  m(5, 4) = g.g14;  m(5, 5) = 0.5 * (g.g11 - g.g12);
  return m;
}

Vector6d StrainTensor::voigt() const {
  Vector6d v;
  v << exx, eyy, ezz, 2.0 * eyz, 2.0 * exz, 2.0 * exy;
  return v;
}

Eigen::Matrix3d StrainTensor::matrix() const {
  Eigen::Matrix3d m;
  m << exx, exy, exz,
       exy, eyy, eyz,
       exz, eyz, ezz;
  return m;
}

StrainTensor StrainTensor::from_matrix(const Eigen::Matrix3d& m) {
  StrainTensor e;
  e.exx = m(0, 0);
  e.eyy = m(1, 1);
  e.ezz = m(2, 2);
  e.eyz = 0.5 * (m(1, 2) + m(2, 1));
  e.exz = 0.5 * (m(0, 2) + m(2, 0));
  e.exy = 0.5 * (m(0, 1) + m(1, 0));
  return e;
}

StrainTensor rotate_strain(const StrainTensor& eps, double angle_rad) {
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  Eigen::Matrix3d rot;
  rot << c, -s, 0,
         s,  c, 0,
         0,  0, 1;
  return StrainTensor::from_matrix(rot * eps.matrix() * rot.transpose());
}

ZfsDelta delta_d(const GTensorC3v& g, const StrainTensor& eps) {
  const Vector6d dd = g_voigt_matrix(g) * eps.voigt();
  ZfsDelta out;
  out.dd << dd(0), dd(5), dd(4),
            dd(5), dd(1), dd(3),
            dd(4), dd(3), dd(2);
  return out;
}

DefectSpecies make_species(SpeciesKind kind) {
  DefectSpecies s;
  s.kind = kind;
  switch (kind) {
    case SpeciesKind::hh:
      s.name = "hh";
      s.d0_ghz = 1.336;
      s.contrast_sign = -1;
      break;
    case SpeciesKind::kk:
      s.name = "kk";
      s.d0_ghz = 1.305;
      s.contrast_sign = +1;
      break;
    case SpeciesKind::pl6:
      s.name = "PL6";
      s.d0_ghz = 1.365;
      s.contrast_sign = +1;
      break;
    case SpeciesKind::custom:
      s.name = "custom";
      break;
  }
  return s;
}

Matrix3c zfs_interaction(const Eigen::Matrix3d& dd) {
  const SpinOperators& op = spin_operators();
  Matrix3c h = Matrix3c::Zero();
  h += dd(0, 0) * op.sx2;
  h += dd(1, 1) * op.sy2;
  h += dd(2, 2) * op.sz2;
  h += dd(0, 1) * op.sxsy;
  h += dd(0, 2) * op.sxsz;
  h += dd(1, 2) * op.sysz;
  return h;
}

Matrix3c hamiltonian(const DefectSpecies& species, const MagneticField& b,
                     const ZfsDelta& dd) {
  if (species.d0_ghz <= 0.0) {
    throw config_error("species '" + species.name + "': d0_ghz must be > 0");
  }
  if (species.gamma_mhz_per_g <= 0.0) {
    throw config_error("species '" + species.name +
                       "': gamma_mhz_per_g must be > 0");
  }
  const SpinOperators& op = spin_operators();
  const double gamma_hz = species.gamma_mhz_per_g * 1e6;
  Matrix3c h = gamma_hz * (b.bx_g * op.sx + b.by_g * op.sy + b.bz_g * op.sz);
  h += (species.d0_ghz * 1e9) * op.sz2;
  h += zfs_interaction(dd.dd);
  return h;
}

Complex transition_rate_dm2(const GTensorC3v& g, const StrainTensor& eps) {
  // full contraction: <+1| S.dD.S |-1>
  return zfs_interaction(delta_d(g, eps).dd)(0, 2);
}

Complex transition_rate_dm1(const GTensorC3v& g, const StrainTensor& eps) {
  // <0| S.dD.S |-1>
  return zfs_interaction(delta_d(g, eps).dd)(1, 2);
}

}  // namespace sawspin::spin
