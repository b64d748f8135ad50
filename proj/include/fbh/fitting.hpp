#ifndef FBH_FITTING_HPP
#define FBH_FITTING_HPP

#include <cmath>
#include <vector>

#include "fbh/types.hpp"

namespace fbh {

struct LogLogFit {
  double exponent = 0.0;  // slope of log y vs log x
  double constant = 0.0;  // exp(intercept)
  double residual = 0.0;  // rms residual in log space
};

/// Ordinary least squares of log y against log x; values are floored at
/// 1e-300 so exact zeros do not poison the fit.
inline LogLogFit loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  const int n = static_cast<int>(xs.size());
  if (n < 2 || ys.size() != xs.size())
    throw PreconditionViolated("loglog_fit: need >= 2 matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    lx[i] = std::log(std::max(xs[i], 1e-300));
    ly[i] = std::log(std::max(std::abs(ys[i]), 1e-300));
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  LogLogFit f;
  f.exponent = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  const double intercept = (sy - f.exponent * sx) / n;
  f.constant = std::exp(intercept);
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = ly[i] - (intercept + f.exponent * lx[i]);
    rss += e * e;
  }
  f.residual = std::sqrt(rss / n);
  return f;
}

}  // namespace fbh

#endif
