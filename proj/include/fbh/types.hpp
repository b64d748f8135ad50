#ifndef FBH_TYPES_HPP
#define FBH_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace fbh {

using Vec = Eigen::VectorXd;
using Arr = Eigen::ArrayXd;
using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

// Named failure modes. Each maps to one contract violation; callers catch by type.
struct NonPositiveGap : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EllipticityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyBall : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotHarmonic : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateSlope : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidComposition : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroTau : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EtaTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotFlat : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ScaleTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RadiiBelowMicroscale : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoInterface : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoNegativePhase : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double pos_part(double t) { return t > 0.0 ? t : 0.0; }
inline double neg_part(double t) { return t < 0.0 ? -t : 0.0; }  // >= 0
inline double min0(double t) { return t < 0.0 ? t : 0.0; }       // <= 0

}  // namespace fbh

#endif
