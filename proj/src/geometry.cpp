#include "polarpark/geometry.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "polarpark/error.hpp"

namespace polarpark {

namespace {

constexpr double kSincSeriesThreshold = 1e-4;
constexpr double kSiSeriesLimit = 4.0 * kPi;

// Power series, summed in extended precision: the largest term near 4*pi is
// ~1e4, so double would lose about four digits to cancellation.
double si_series(double a) {
  const long double x = a;
  const long double x2 = x * x;
  long double power_over_factorial = x;  // x^(2k+1) / (2k+1)!
  long double sum = 0.0L;
  for (int k = 0; k < 200; ++k) {
    const long double term = power_over_factorial / (2 * k + 1);
    sum += (k % 2 == 0) ? term : -term;
    if (std::fabs(term) < 1e-16L) break;
    power_over_factorial *= x2 / ((2.0L * k + 2.0L) * (2.0L * k + 3.0L));
  }
  return static_cast<double>(sum);
}

// Si(x) = pi/2 + Im(e^{-ix} E1(ix)), with E1(ix) from its continued fraction
// (modified Lentz). Converges quickly for x > 2.
double si_continued_fraction(double x) {
  using C = std::complex<double>;
  constexpr double kTiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  C b(1.0, x);
  C c(1.0 / kTiny, 0.0);
  C d = 1.0 / b;
  C h = d;
  for (int i = 2; i <= 500; ++i) {
    const double an = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const C del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
  }
  h *= C(std::cos(x), -std::sin(x));
  return kPi / 2.0 + h.imag();
}

}  // namespace

bool in_S(const PolarState& s) { return s.rho > 0.0; }

bool in_S1(const PolarState& s) { return s.rho > 0.0 && std::abs(s.gamma) < kPi; }

PolarState cartesian_to_polar(const CartesianState& s) {
  if (s.x == 0.0 && s.y == 0.0) {
    throw Error(ErrorCode::SingularOrigin, "polar coordinates are undefined at x = y = 0");
  }
  // A signed zero in y would put atan2 at -pi and delta at 0, outside (0, 2pi].
  const double y = (s.y == 0.0) ? 0.0 : s.y;
  PolarState p;
  p.rho = std::hypot(s.x, y);
  p.delta = std::atan2(y, s.x) + kPi;
  p.gamma = p.delta - s.theta;
  return p;
}

CartesianState polar_to_cartesian(const PolarState& s) {
  return {-s.rho * std::cos(s.delta), -s.rho * std::sin(s.delta), s.delta - s.gamma};
}

double metric_S(const PolarState& s) {
  return s.rho + std::abs(s.delta) + std::abs(s.gamma);
}

double metric_S1(const PolarState& s) {
  if (!(std::abs(s.gamma) < kPi)) {
    throw Error(ErrorCode::OutsideS1, "metric_S1 needs |gamma| < pi");
  }
  return s.rho + std::abs(s.delta) + 2.0 * std::tan(std::abs(s.gamma) / 2.0);
}

double sinc(double a) {
  if (std::abs(a) < kSincSeriesThreshold) {
    const double a2 = a * a;
    return 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
  }
  return std::sin(a) / a;
}

double si(double a) {
  const double mag = std::abs(a);
  const double value = (mag <= kSiSeriesLimit) ? si_series(mag) : si_continued_fraction(mag);
  return std::signbit(a) ? -value : value;
}

}  // namespace polarpark
