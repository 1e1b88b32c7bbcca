#pragma once

#include <string_view>
#include <variant>

#include "polarpark/geometry.hpp"

namespace polarpark {

/// Deadbeat laws reject |gamma| at or beyond this value instead of saturating.
inline constexpr double kDeadbeatGammaLimit = kPi / 2.0 - 1e-9;

/// Gains of the unicycle laws (velocity feedback plus GloFo/BoFo steering).
/// All three must be strictly positive.
class UnicycleGains {
 public:
  UnicycleGains(double k1, double k2, double k3);

  double k1() const { return k1_; }
  double k2() const { return k2_; }
  double k3() const { return k3_; }
  /// sqrt(k1 / k3), the weight on the LoS-angle term of the CLFs.
  double q() const;

 private:
  double k1_, k2_, k3_;
};

/// Gains of the constant-speed (Dubins) laws. c1, c2, v strictly positive.
class DubinsGains {
 public:
  DubinsGains(double c1, double c2, double v);

  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double v() const { return v_; }
  double c_min() const { return c1_ < c2_ ? c1_ : c2_; }

 private:
  double c1_, c2_, v_;
};

struct ControlInput {
  double v = 0.0;
  double omega = 0.0;
};

enum class ControllerKind { GloFo, BoFo, DeadbeatPower, DeadbeatExp, DeadbeatBackstep, Null };

std::string_view to_string(ControllerKind kind);
/// Throws InvalidScenario for an unknown name.
ControllerKind controller_kind_from_string(std::string_view name);

bool is_deadbeat(ControllerKind kind);

/// A feedback law together with validated gains. Gain constraints are
/// checked here once so the simulation loop does not have to.
class ControllerSpec {
 public:
  /// The null controller.
  ControllerSpec() = default;

  static ControllerSpec glofo(const UnicycleGains& g);
  static ControllerSpec bofo(const UnicycleGains& g);
  /// Requires min(c1, c2) > 2.
  static ControllerSpec deadbeat_power(const DubinsGains& g);
  static ControllerSpec deadbeat_exp(const DubinsGains& g);
  /// Requires min(c1, c2) > 2.
  static ControllerSpec deadbeat_backstep(const DubinsGains& g);
  /// v = omega = 0 everywhere.
  static ControllerSpec null();

  ControllerKind kind() const { return kind_; }
  /// Throws WrongController when the law is not a unicycle law.
  const UnicycleGains& unicycle_gains() const;
  /// Throws WrongController when the law is not a Dubins law.
  const DubinsGains& dubins_gains() const;

 private:
  ControllerSpec(ControllerKind kind, std::variant<std::monostate, UnicycleGains, DubinsGains> gains)
      : kind_(kind), gains_(gains) {}

  ControllerKind kind_ = ControllerKind::Null;
  std::variant<std::monostate, UnicycleGains, DubinsGains> gains_;
};

// Unicycle laws.

/// v = k1 rho cos(gamma); negative values mean reversing.
double velocity_law(const PolarState& s, const UnicycleGains& g);
/// omega = (k1/2) sin(2 gamma) + tilde_omega, cancelling the drift of gamma.
double omega_from_tilde(double gamma, double tilde_omega, const UnicycleGains& g);

double glofo_tilde(const PolarState& s, const UnicycleGains& g);
double glofo_zeta(const PolarState& s, const UnicycleGains& g);
/// Throws OutsideS1 when |gamma| >= pi.
double bofo_tilde(const PolarState& s, const UnicycleGains& g);
double bofo_zeta(const PolarState& s, const UnicycleGains& g);

// Dubins (constant speed) deadbeat laws. All throw SingularRho for rho <= 0
// and GammaOutOfRange for |gamma| >= kDeadbeatGammaLimit.

double deadbeat_power_zeta(const PolarState& s, const DubinsGains& g);
/// Also throws GainConstraint when min(c1, c2) <= 2.
double deadbeat_power_omega(const PolarState& s, const DubinsGains& g);

double deadbeat_exp_zeta(const PolarState& s, const DubinsGains& g);
/// tan(gamma) + delta
double deadbeat_exp_Gamma(const PolarState& s);
double deadbeat_exp_omega(const PolarState& s, const DubinsGains& g);

/// Backstepping counterpart of deadbeat_power_omega: the inner term gains +delta.
double deadbeat_backstep_omega(const PolarState& s, const DubinsGains& g);

/// Full (v, omega) for any controller.
ControlInput evaluate(const ControllerSpec& spec, const PolarState& s);

/// The forwarding variable zeta of the active law; NaN for the null controller.
double forwarding_zeta(const ControllerSpec& spec, const PolarState& s);

}  // namespace polarpark
