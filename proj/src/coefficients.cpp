#include "fbh/coefficients.hpp"

#include <cmath>

namespace fbh {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_unit(double t) {
  double f = t - std::floor(t);
  if (f >= 1.0) f -= 1.0;  // guard against floor rounding at integers
  return f;
}
}  // namespace

int CoefficientField::table_index(double x, double y) const {
  const int n = cell_resolution;
  int ix = static_cast<int>(wrap_unit(x) * n);
  if (ix >= n) ix = n - 1;
  if (dim == 1) return ix;
  int iy = static_cast<int>(wrap_unit(y) * n);
  if (iy >= n) iy = n - 1;
  return ix + n * iy;
}

Mat2 CoefficientField::a_at(double x, double y) const {
  const int k = table_index(x, y);
  Mat2 m = Mat2::Zero();
  m(0, 0) = a11[k];
  if (dim == 2) {
    m(1, 1) = a22[k];
    m(0, 1) = m(1, 0) = a12[k];
  }
  return m;
}

void CoefficientField::validate() const {
  const double lo = 1.0 / lambda - 1e-12, hi = lambda + 1e-12;
  for (Eigen::Index k = 0; k < a11.size(); ++k) {
    double emin = a11[k], emax = a11[k];
    if (dim == 2) {
      // eigenvalues of the symmetric 2x2 sample
      const double tr = a11[k] + a22[k];
      const double det = a11[k] * a22[k] - a12[k] * a12[k];
      const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
      emin = tr / 2.0 - disc;
      emax = tr / 2.0 + disc;
    }
    if (emin < lo || emax > hi)
      throw EllipticityViolation("coefficient a outside [1/Lambda, Lambda] at sample " +
                                 std::to_string(k));
  }
  for (Eigen::Index k = 0; k < qplus.size(); ++k) {
    if (qplus[k] < lo || qplus[k] > hi || qminus[k] < lo || qminus[k] > hi)
      throw EllipticityViolation("Q outside [1/Lambda, Lambda] at sample " +
                                 std::to_string(k));
  }
}

CoefficientField CoefficientField::sampled(
    int dim, double lambda, int resolution, const std::function<Mat2(double, double)>& a,
    const std::function<double(double, double)>& qp,
    const std::function<double(double, double)>& qm) {
  CoefficientField f;
  f.dim = dim;
  f.lambda = lambda;
  f.cell_resolution = resolution;
  const int count = dim == 1 ? resolution : resolution * resolution;
  f.a11.resize(count);
  f.a22.resize(count);
  f.a12.resize(count);
  f.qplus.resize(count);
  f.qminus.resize(count);
  for (int k = 0; k < count; ++k) {
    const int ix = dim == 1 ? k : k % resolution;
    const int iy = dim == 1 ? 0 : k / resolution;
    const double x = (ix + 0.5) / resolution;
    const double y = (iy + 0.5) / resolution;
    const Mat2 m = a(x, y);
    f.a11[k] = m(0, 0);
    f.a22[k] = dim == 2 ? m(1, 1) : 0.0;
    f.a12[k] = dim == 2 ? m(0, 1) : 0.0;
    f.qplus[k] = qp(x, y);
    f.qminus[k] = qm(x, y);
  }
  f.validate();
  return f;
}

CoefficientField normalize_coefficients(const CoefficientField& field) {
  const double gap = field.mean_qplus_sq() - field.mean_qminus_sq();
  if (gap <= 0.0)
    throw NonPositiveGap("<Q+^2> - <Q-^2> = " + std::to_string(gap) + " <= 0");
  if (std::abs(gap - 1.0) <= 1e-10) return field;
  CoefficientField out = field;
  const double s = 1.0 / std::sqrt(gap);  // Q^2 -> Q^2/gap
  out.qplus *= s;
  out.qminus *= s;
  const double lo = 1.0 / out.lambda - 1e-12, hi = out.lambda + 1e-12;
  if (out.qplus.minCoeff() < lo || out.qplus.maxCoeff() > hi ||
      out.qminus.minCoeff() < lo || out.qminus.maxCoeff() > hi)
    throw EllipticityViolation("normalized Q leaves [1/Lambda, Lambda]");
  return out;
}

CoefficientField make_constant_field(int dim, int resolution) {
  return CoefficientField::sampled(
      dim, 2.0, resolution, [](double, double) { return Mat2::Identity(); },
      [](double, double) { return std::sqrt(2.0); }, [](double, double) { return 1.0; });
}

CoefficientField make_laminate_field(int dim, int resolution) {
  return CoefficientField::sampled(
      dim, 3.0, resolution,
      [](double x, double) {
        return Mat2((2.0 + std::sin(2.0 * kPi * x)) * Mat2::Identity());
      },
      [](double, double) { return std::sqrt(2.0); }, [](double, double) { return 1.0; });
}

CoefficientField make_checkerboard_field(double contrast, int resolution) {
  const double c = contrast;
  return CoefficientField::sampled(
      2, std::max(c, 1.0 / c) * 1.0000001, resolution,
      [c](double x, double y) {
        const bool first = (x < 0.5) == (y < 0.5);
        return Mat2((first ? c : 1.0 / c) * Mat2::Identity());
      },
      [](double, double) { return std::sqrt(2.0); }, [](double, double) { return 1.0; });
}

CoefficientField make_preset_field(const std::string& name, int dim, int resolution) {
  if (name == "constant") return make_constant_field(dim, resolution);
  if (name == "laminate") return make_laminate_field(dim, resolution);
  if (name == "checkerboard") {
    if (dim != 2) throw ConfigInvalid("checkerboard preset is 2D only");
    return make_checkerboard_field(2.0, resolution);
  }
  throw ConfigInvalid("unknown medium preset: " + name);
}

}  // namespace fbh
