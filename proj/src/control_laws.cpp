#include "polarpark/control_laws.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "polarpark/error.hpp"

namespace polarpark {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require_deadbeat_domain(const PolarState& s) {
  if (!(s.rho > 0.0)) {
    throw Error(ErrorCode::SingularRho, "deadbeat laws need rho > 0, got " + std::to_string(s.rho));
  }
  if (!(std::abs(s.gamma) < kDeadbeatGammaLimit)) {
    throw Error(ErrorCode::GammaOutOfRange,
                "deadbeat laws need |gamma| < pi/2, got " + std::to_string(s.gamma));
  }
}

void require_power_gains(const DubinsGains& g) {
  if (!(g.c_min() > 2.0)) {
    throw Error(ErrorCode::GainConstraint, "power-rate deadbeat law needs min(c1, c2) > 2");
  }
}

// omega = (v / rho)(sin gamma + cos^3 gamma * inner)
double dubins_wrap(const PolarState& s, double v, double inner) {
  const double c = std::cos(s.gamma);
  return v / s.rho * (std::sin(s.gamma) + c * c * c * inner);
}

double power_inner(const PolarState& s, const DubinsGains& g) {
  const double t = std::tan(s.gamma);
  const double zeta = t + g.c1() * s.delta;
  return g.c1() * t + g.c2() * zeta;
}

}  // namespace

UnicycleGains::UnicycleGains(double k1, double k2, double k3) : k1_(k1), k2_(k2), k3_(k3) {
  if (!positive_finite(k1) || !positive_finite(k2) || !positive_finite(k3)) {
    throw Error(ErrorCode::GainConstraint, "k1, k2, k3 must be positive");
  }
}

double UnicycleGains::q() const { return std::sqrt(k1_ / k3_); }

DubinsGains::DubinsGains(double c1, double c2, double v) : c1_(c1), c2_(c2), v_(v) {
  if (!positive_finite(c1) || !positive_finite(c2)) {
    throw Error(ErrorCode::GainConstraint, "c1, c2 must be positive");
  }
  if (!positive_finite(v)) {
    throw Error(ErrorCode::GainConstraint, "forward speed v must be positive");
  }
}

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::GloFo: return "GloFo";
    case ControllerKind::BoFo: return "BoFo";
    case ControllerKind::DeadbeatPower: return "DeadbeatPower";
    case ControllerKind::DeadbeatExp: return "DeadbeatExp";
    case ControllerKind::DeadbeatBackstep: return "DeadbeatBackstep";
    case ControllerKind::Null: return "Null";
  }
  return "Unknown";
}

ControllerKind controller_kind_from_string(std::string_view name) {
  for (auto k : {ControllerKind::GloFo, ControllerKind::BoFo, ControllerKind::DeadbeatPower,
                 ControllerKind::DeadbeatExp, ControllerKind::DeadbeatBackstep, ControllerKind::Null}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidScenario, "unknown controller '" + std::string(name) + "'");
}

bool is_deadbeat(ControllerKind kind) {
  return kind == ControllerKind::DeadbeatPower || kind == ControllerKind::DeadbeatExp ||
         kind == ControllerKind::DeadbeatBackstep;
}

ControllerSpec ControllerSpec::glofo(const UnicycleGains& g) { return {ControllerKind::GloFo, g}; }
ControllerSpec ControllerSpec::bofo(const UnicycleGains& g) { return {ControllerKind::BoFo, g}; }

ControllerSpec ControllerSpec::deadbeat_power(const DubinsGains& g) {
  require_power_gains(g);
  return {ControllerKind::DeadbeatPower, g};
}

ControllerSpec ControllerSpec::deadbeat_exp(const DubinsGains& g) {
  return {ControllerKind::DeadbeatExp, g};
}

ControllerSpec ControllerSpec::deadbeat_backstep(const DubinsGains& g) {
  require_power_gains(g);
  return {ControllerKind::DeadbeatBackstep, g};
}

ControllerSpec ControllerSpec::null() { return {ControllerKind::Null, std::monostate{}}; }

const UnicycleGains& ControllerSpec::unicycle_gains() const {
  if (const auto* g = std::get_if<UnicycleGains>(&gains_)) return *g;
  throw Error(ErrorCode::WrongController,
              std::string(to_string(kind_)) + " does not carry unicycle gains");
}

const DubinsGains& ControllerSpec::dubins_gains() const {
  if (const auto* g = std::get_if<DubinsGains>(&gains_)) return *g;
  throw Error(ErrorCode::WrongController,
              std::string(to_string(kind_)) + " does not carry Dubins gains");
}

double velocity_law(const PolarState& s, const UnicycleGains& g) {
  return g.k1() * s.rho * std::cos(s.gamma);
}

double omega_from_tilde(double gamma, double tilde_omega, const UnicycleGains& g) {
  return g.k1() / 2.0 * std::sin(2.0 * gamma) + tilde_omega;
}

double glofo_zeta(const PolarState& s, const UnicycleGains& g) {
  return s.delta + g.k1() / (2.0 * g.k2()) * si(2.0 * s.gamma);
}

double glofo_tilde(const PolarState& s, const UnicycleGains& g) {
  return g.k2() * s.gamma + g.k3() * sinc(2.0 * s.gamma) * glofo_zeta(s, g);
}

double bofo_zeta(const PolarState& s, const UnicycleGains& g) {
  return s.delta + g.k1() / g.k2() * std::sin(s.gamma);
}

double bofo_tilde(const PolarState& s, const UnicycleGains& g) {
  if (!(std::abs(s.gamma) < kPi)) {
    throw Error(ErrorCode::OutsideS1, "BoFo needs |gamma| < pi");
  }
  // (1 + tan^2(gamma/2))^-2 == cos^4(gamma/2), which stays finite near |gamma| = pi.
  const double ch = std::cos(s.gamma / 2.0);
  const double ch2 = ch * ch;
  return g.k2() * std::sin(s.gamma) + g.k3() * std::cos(s.gamma) * ch2 * ch2 * bofo_zeta(s, g);
}

double deadbeat_power_zeta(const PolarState& s, const DubinsGains& g) {
  return std::tan(s.gamma) + g.c1() * s.delta;
}

double deadbeat_power_omega(const PolarState& s, const DubinsGains& g) {
  require_power_gains(g);
  require_deadbeat_domain(s);
  return dubins_wrap(s, g.v(), power_inner(s, g));
}

double deadbeat_backstep_omega(const PolarState& s, const DubinsGains& g) {
  require_power_gains(g);
  require_deadbeat_domain(s);
  return dubins_wrap(s, g.v(), power_inner(s, g) + s.delta);
}

double deadbeat_exp_Gamma(const PolarState& s) { return std::tan(s.gamma) + s.delta; }

double deadbeat_exp_zeta(const PolarState& s, const DubinsGains& g) {
  if (!(s.rho > 0.0)) {
    throw Error(ErrorCode::SingularRho, "exponential deadbeat zeta needs rho > 0");
  }
  return deadbeat_exp_Gamma(s) + g.c1() / s.rho * s.delta;
}

double deadbeat_exp_omega(const PolarState& s, const DubinsGains& g) {
  require_deadbeat_domain(s);
  const double t = std::tan(s.gamma);
  const double zeta = deadbeat_exp_zeta(s, g);
  const double inner = (g.c1() * (t + s.delta) + g.c2() * zeta) / s.rho + t;
  return dubins_wrap(s, g.v(), inner);
}

ControlInput evaluate(const ControllerSpec& spec, const PolarState& s) {
  switch (spec.kind()) {
    case ControllerKind::GloFo: {
      const auto& g = spec.unicycle_gains();
      return {velocity_law(s, g), omega_from_tilde(s.gamma, glofo_tilde(s, g), g)};
    }
    case ControllerKind::BoFo: {
      const auto& g = spec.unicycle_gains();
      return {velocity_law(s, g), omega_from_tilde(s.gamma, bofo_tilde(s, g), g)};
    }
    case ControllerKind::DeadbeatPower: {
      const auto& g = spec.dubins_gains();
      return {g.v(), deadbeat_power_omega(s, g)};
    }
    case ControllerKind::DeadbeatExp: {
      const auto& g = spec.dubins_gains();
      return {g.v(), deadbeat_exp_omega(s, g)};
    }
    case ControllerKind::DeadbeatBackstep: {
      const auto& g = spec.dubins_gains();
      return {g.v(), deadbeat_backstep_omega(s, g)};
    }
    case ControllerKind::Null:
      return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

double forwarding_zeta(const ControllerSpec& spec, const PolarState& s) {
  switch (spec.kind()) {
    case ControllerKind::GloFo: return glofo_zeta(s, spec.unicycle_gains());
    case ControllerKind::BoFo: return bofo_zeta(s, spec.unicycle_gains());
    case ControllerKind::DeadbeatPower:
    case ControllerKind::DeadbeatBackstep: return deadbeat_power_zeta(s, spec.dubins_gains());
    case ControllerKind::DeadbeatExp: return deadbeat_exp_zeta(s, spec.dubins_gains());
    case ControllerKind::Null: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace polarpark
