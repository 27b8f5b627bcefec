#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

// S = 1 operator algebra, trigonal (3m) spin-strain coupling and the
// strain-driven transition matrix elements.
//
// Basis ordering for every 3x3 matrix in this library: (|+1>, |0>, |-1>).
// All Hamiltonians are H/h in Hz, magnetic fields in Gauss, strains
// dimensionless.

namespace sawspin::spin {

using Matrix3c = Eigen::Matrix3cd;
using Complex = std::complex<double>;

struct SpinOperators {
  Matrix3c sx, sy, sz;
  // squares and anticommutators {a,b} = ab + ba
  Matrix3c sx2, sy2, sz2;
  Matrix3c sxsy, sxsz, sysz;
};

// Standard S=1 matrices in the (|+1>, |0>, |-1>) basis.
const SpinOperators& spin_operators();
SpinOperators build_spin_operators();

// Six independent spin-strain coupling parameters of a c-axis defect with
// trigonal 3m site symmetry, in Hz per unit strain.
struct GTensorC3v {
  double g11 = 0.0;
  double g12 = 0.0;
  double g13 = 0.0;
  double g14 = 0.0;
  double g33 = 0.0;
  double g44 = 0.0;
};

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

// 6x6 coupling matrix in Voigt order (xx, yy, zz, yz, xz, xy) acting on the
// engineering-shear strain vector.
Matrix6d g_voigt_matrix(const GTensorC3v& g);

// Symmetric physical strain tensor (six stored components).
struct StrainTensor {
  double exx = 0.0, eyy = 0.0, ezz = 0.0;
  double eyz = 0.0, exz = 0.0, exy = 0.0;

  // Voigt vector with engineering shear: (exx, eyy, ezz, 2eyz, 2exz, 2exy).
  Vector6d voigt() const;
  Eigen::Matrix3d matrix() const;
  static StrainTensor from_matrix(const Eigen::Matrix3d& m);
};

// eps' = R eps R^T for a rotation R by `angle_rad` about the crystal z axis.
StrainTensor rotate_strain(const StrainTensor& eps, double angle_rad);

// Strain-induced change of the zero-field splitting tensor, Hz.
struct ZfsDelta {
  Eigen::Matrix3d dd = Eigen::Matrix3d::Zero();
};

ZfsDelta delta_d(const GTensorC3v& g, const StrainTensor& eps);

enum class SpeciesKind { hh, kk, pl6, custom };

struct DefectSpecies {
  std::string name = "custom";
  SpeciesKind kind = SpeciesKind::custom;
  double d0_ghz = 0.0;             // axial zero-field splitting
  double gamma_mhz_per_g = 2.8;    // electron gyromagnetic ratio
  int contrast_sign = +1;          // sign of the ODMR PL contrast
  GTensorC3v g_params;
};

// Spin constants for the built-in species; G parameters left zero (they are
// configuration inputs).
DefectSpecies make_species(SpeciesKind kind);

struct MagneticField {
  double bx_g = 0.0, by_g = 0.0, bz_g = 0.0;  // Gauss, z along the c axis
};

// S . dd . S with dd in Hz.
Matrix3c zfs_interaction(const Eigen::Matrix3d& dd);

// H/h = gamma B.S + D0 Sz^2 + S.dD.S, in Hz.
Matrix3c hamiltonian(const DefectSpecies& species, const MagneticField& b,
                     const ZfsDelta& dd);

// <+1| S.dD.S |-1> for dD = G : eps. Drives |+1> <-> |-1>.
Complex transition_rate_dm2(const GTensorC3v& g, const StrainTensor& eps);

// <0| S.dD.S |-1> for dD = G : eps. Drives |0> <-> |-1>.
Complex transition_rate_dm1(const GTensorC3v& g, const StrainTensor& eps);

}  // namespace sawspin::spin
