#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polarpark/control_laws.hpp"
#include "polarpark/geometry.hpp"
#include "polarpark/trajectory.hpp"

namespace polarpark {

// Envelope checks accept value <= bound * (1 + kEnvelopeRelTol) + kEnvelopeAbsTol.
inline constexpr double kEnvelopeRelTol = 1e-6;
inline constexpr double kEnvelopeAbsTol = 1e-12;

// ---------------------------------------------------------------------------
// Lyapunov functions and their analytic time derivatives along the closed loop.

double v_glofo(const PolarState& s, const UnicycleGains& g);
double vdot_glofo_analytic(const PolarState& s, const UnicycleGains& g);

/// Throws OutsideS1 when |gamma| >= pi.
double v_bofo(const PolarState& s, const UnicycleGains& g);
double vdot_bofo_analytic(const PolarState& s, const UnicycleGains& g);

/// (c2/c1) zeta^2 + tan^2 gamma with zeta = tan gamma + c1 delta.
/// Throws GammaOutOfRange for |gamma| >= pi/2.
double v_deadbeat_power(const PolarState& s, const DubinsGains& g);
double vdot_deadbeat_power_analytic(const PolarState& s, const DubinsGains& g);

/// (c2/c1) zeta^2 + Gamma^2 with the rho-dependent zeta of the exponential law.
/// Throws SingularRho / GammaOutOfRange.
double v_deadbeat_exp(const PolarState& s, const DubinsGains& g);
double vdot_deadbeat_exp_analytic(const PolarState& s, const DubinsGains& g);

/// sqrt(delta^2 + tan^2 gamma)
double angular_error_B(const PolarState& s);

/// Closed-loop polar vector field (rho', delta', gamma') of a controller.
/// Unicycle laws use the reduced form with v/rho = k1 cos(gamma), which stays
/// defined at rho = 0.
PolarState closed_loop_field(const ControllerSpec& spec, const PolarState& s);

/// The Lyapunov function paired with the controller (NaN for Null and where
/// undefined). The backstepping law is paired with the power-law function.
double lyapunov_value(const ControllerSpec& spec, const PolarState& s);
/// Analytic dV/dt; NaN where no closed form is paired with the controller.
double lyapunov_rate_analytic(const ControllerSpec& spec, const PolarState& s);
/// Central finite difference of lyapunov_value along closed_loop_field, with
/// state-space step h = 1e-6 * max(1, |s|).
double lyapunov_rate_numeric(const ControllerSpec& spec, const PolarState& s);

/// Every field of the sample for the state s at time t.
CertificateSample certify(const ControllerSpec& spec, double t, const PolarState& s);

/// Max abs residual of the transformed closed loop (zeta', gamma') against the
/// cascade form, with zeta' obtained by the chain rule from the model.
/// GloFo and BoFo only.
double cascade_residual(const ControllerSpec& spec, const PolarState& s);

// ---------------------------------------------------------------------------
// Comparison lemma envelopes.

struct RhoValue {
  double rho;
  double V;
};

struct Lemma1Result {
  bool pass = true;
  double worst_ratio = 0.0;  ///< max V / envelope (0 when every V is 0)
  std::size_t worst_index = 0;
};

/// V(rho) <= V(rho0) (rho/rho0)^a. Samples ordered by decreasing rho.
/// Throws EmptyTrace on no samples.
Lemma1Result check_lemma1_power(std::span<const RhoValue> samples, double a);
/// V(rho) <= V(rho0) exp(a (1/rho0 - 1/rho)).
Lemma1Result check_lemma1_exp(std::span<const RhoValue> samples, double a);

/// rho0/v * sqrt(1 + 2 c1 c2 B0^2)
double t1_thm3(double rho0, double B0, const DubinsGains& g);

// ---------------------------------------------------------------------------
// Trajectory-level reports.

enum class EnvelopeKind {
  RhoLinear,
  BPower,
  BPowerTight,
  OmegaPower,
  VPower,
  VExp,
  BExpSlope,
  OmegaTerminal,
  ComparisonPower,
  ComparisonExp,
  VMonotone,
};

std::string_view to_string(EnvelopeKind kind);

struct BoundEnvelope {
  EnvelopeKind kind;
  double t1 = 0.0;
  std::vector<std::pair<std::string, double>> params;

  double param(std::string_view name) const;
};

/// Bound value at time t for the time-indexed envelopes (RhoLinear, BPower,
/// BPowerTight, OmegaPower). Past t1 the bound is 0.
double envelope_bound(const BoundEnvelope& env, double t);

struct EnvelopeResult {
  EnvelopeKind kind;
  bool pass = true;
  double worst_margin = 0.0;  ///< min(bound - value); negative means violated
  double worst_time = 0.0;
  bool informational = false;  ///< reported, excluded from the verdict
};

struct CheckReport {
  std::string suite;
  std::vector<EnvelopeResult> records;
  std::vector<BoundEnvelope> envelopes;

  bool passed() const;
  const EnvelopeResult& record(EnvelopeKind kind) const;
};

/// Flat key-value text, one block of lines per record.
std::string format_report(const CheckReport& report);

/// Time envelopes of the power-rate deadbeat law: rho linear decay, B^2 and
/// |omega| power envelopes (plus the tighter 2 c1 B^2 prefactor as an
/// informational record), the power comparison lemma on V, and the
/// finite-difference comparison inequality dV/drho >= c V / rho.
/// Throws WrongController unless the trajectory ran DeadbeatPower.
CheckReport check_thm3_envelopes(const Trajectory& traj, const DubinsGains& g);

/// Exponential deadbeat law. The envelope constants are only known to exist,
/// so t1 is taken with the smallest constant consistent with the trace
/// (sup B^2 / B0^2) and the exponential decay is checked by the sign of a
/// regression slope of log B^2 on 1/(1 - t/t1).
CheckReport check_thm4_envelopes(const Trajectory& traj, const DubinsGains& g);

/// V nonincreasing sample-to-sample (GloFo / BoFo runs).
CheckReport check_monotone_v(const Trajectory& traj);

/// Per-step slack of the comparison-inequality checks for a step of length dt.
double comparison_slack(double dt);

}  // namespace polarpark
