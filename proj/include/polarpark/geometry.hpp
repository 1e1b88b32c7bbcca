#pragma once

#include <numbers>

namespace polarpark {

inline constexpr double kPi = std::numbers::pi;

/// Pose of the vehicle in the goal frame. theta is an unwrapped real.
struct CartesianState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Distance to the goal, polar angle of the goal bearing, and line-of-sight
/// angle. delta and gamma are unwrapped reals; only rho >= 0 is enforced.
struct PolarState {
  double rho = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
};

/// rho > 0
bool in_S(const PolarState& s);
/// rho > 0 and |gamma| < pi
bool in_S1(const PolarState& s);

/// Throws SingularOrigin at x = y = 0. delta lands in (0, 2pi].
PolarState cartesian_to_polar(const CartesianState& s);
CartesianState polar_to_cartesian(const PolarState& s);

/// rho + |delta| + |gamma|
double metric_S(const PolarState& s);
/// rho + |delta| + 2 tan(|gamma|/2); throws OutsideS1 when |gamma| >= pi.
double metric_S1(const PolarState& s);

double sinc(double a);

/// Sine integral Si(a) = integral of sinc over [0, a].
double si(double a);

}  // namespace polarpark
