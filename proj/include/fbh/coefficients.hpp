#ifndef FBH_COEFFICIENTS_HPP
#define FBH_COEFFICIENTS_HPP

#include <functional>
#include <string>

#include "fbh/types.hpp"

namespace fbh {

/// 1-periodic coefficient field (a, Q+, Q-) sampled once onto the centers of a
/// cell_resolution^dim lattice of the unit cell. All queries read the stored
/// table; variation below the table resolution is ignored.
struct CoefficientField {
  int dim = 2;
  double lambda = 1.0;  // ellipticity constant, >= 1
  int cell_resolution = 128;

  // Per table-cell samples, row-major (x fastest). a12 only used when dim == 2.
  Arr a11, a22, a12;
  Arr qplus, qminus;

  /// Sample callables at table-cell centers and validate ellipticity.
  static CoefficientField sampled(int dim, double lambda, int resolution,
                                  const std::function<Mat2(double, double)>& a,
                                  const std::function<double(double, double)>& qp,
                                  const std::function<double(double, double)>& qm);

  int table_index(double x, double y) const;

  Mat2 a_at(double x, double y) const;
  double qplus_at(double x, double y) const { return qplus[table_index(x, y)]; }
  double qminus_at(double x, double y) const { return qminus[table_index(x, y)]; }

  /// Cell averages over the unit cell (midpoint rule on the table).
  double mean_qplus_sq() const { return (qplus * qplus).mean(); }
  double mean_qminus_sq() const { return (qminus * qminus).mean(); }

  bool is_diagonal() const { return dim == 1 || (a12.abs() < 1e-300).all(); }

  void validate() const;  // throws EllipticityViolation
};

/// Rescale Q+- so that <Q+^2> - <Q-^2> = 1 exactly (a is left unchanged).
/// Throws NonPositiveGap when <Q+^2> <= <Q-^2>, EllipticityViolation when the
/// rescaled values leave [1/Lambda, Lambda].
CoefficientField normalize_coefficients(const CoefficientField& field);

// Named presets. Q+- default to sqrt(2) and 1, already normalized.
CoefficientField make_constant_field(int dim, int resolution = 128);
/// a(x) = (2 + sin(2 pi x1)) * I, Lambda = 3.
CoefficientField make_laminate_field(int dim, int resolution = 256);
/// 2x2-block checkerboard alternating between contrast and 1/contrast,
/// so the effective matrix is the identity. 2D only.
CoefficientField make_checkerboard_field(double contrast = 2.0, int resolution = 128);

CoefficientField make_preset_field(const std::string& name, int dim, int resolution);

}  // namespace fbh

#endif
