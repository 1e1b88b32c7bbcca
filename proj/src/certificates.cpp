#include "polarpark/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "polarpark/error.hpp"
#include "polarpark/simulator.hpp"

namespace polarpark {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Fraction of the peak |omega| allowed at the cutoff of an exponential run.
constexpr double kOmegaTerminalFraction = 1e-3;

double square(double x) { return x * x; }

PolarState axpy(const PolarState& s, double a, const PolarState& d) {
  return {s.rho + a * d.rho, s.delta + a * d.delta, s.gamma + a * d.gamma};
}

double norm(const PolarState& s) {
  return std::sqrt(s.rho * s.rho + s.delta * s.delta + s.gamma * s.gamma);
}

// [(a)^2 + (b)^2 + (a + b)^2]
double three_square_sum(double a, double b) { return a * a + b * b + square(a + b); }

void require_gamma_below_half_pi(const PolarState& s) {
  if (!(std::abs(s.gamma) < kDeadbeatGammaLimit)) {
    throw Error(ErrorCode::GammaOutOfRange, "deadbeat certificate needs |gamma| < pi/2");
  }
}

void require_samples(const Trajectory& traj) {
  if (traj.samples.empty()) throw Error(ErrorCode::EmptyTrace, "trajectory has no samples");
}

void require_kind(const Trajectory& traj, ControllerKind expected) {
  if (traj.metadata.controller.kind() != expected) {
    throw Error(ErrorCode::WrongController,
                "check expects a " + std::string(to_string(expected)) + " trajectory, got " +
                    std::string(to_string(traj.metadata.controller.kind())));
  }
}

double b_squared_or_inf(const PolarState& s) {
  if (!(std::abs(s.gamma) < kPi / 2.0)) return kInf;
  return square(s.delta) + square(std::tan(s.gamma));
}

template <class ValueFn>
EnvelopeResult run_time_envelope(const BoundEnvelope& env, const Trajectory& traj,
                                 ValueFn value_of) {
  EnvelopeResult r{env.kind};
  r.worst_margin = kInf;
  for (const auto& smp : traj.samples) {
    const double allowed = envelope_bound(env, smp.t) * (1.0 + kEnvelopeRelTol) + kEnvelopeAbsTol;
    const double margin = allowed - value_of(smp);
    if (!(margin >= r.worst_margin)) {
      r.worst_margin = margin;
      r.worst_time = smp.t;
    }
  }
  r.pass = r.worst_margin >= 0.0;
  return r;
}

EnvelopeResult lemma_record(EnvelopeKind kind, const Lemma1Result& lr, const Trajectory& traj) {
  EnvelopeResult r{kind};
  r.pass = lr.pass;
  r.worst_margin = 1.0 - lr.worst_ratio;
  r.worst_time = traj.samples[lr.worst_index].t;
  return r;
}

// Integrated form of dV/drho >= c V / rho (power) or c V / rho^2 (exp) over
// each pair of consecutive samples: log V_i - log V_{i+1} >= required_i.
template <class RequiredFn>
EnvelopeResult run_comparison(EnvelopeKind kind, const Trajectory& traj,
                              const std::vector<double>& V, RequiredFn required_of) {
  EnvelopeResult r{kind};
  r.worst_margin = kInf;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i];
    const auto& b = traj.samples[i + 1];
    if (!(V[i] > 0.0) || !(V[i + 1] > 0.0) || !(b.polar.rho < a.polar.rho)) continue;
    const double log_va = std::log(V[i]);
    const double log_vb = std::log(V[i + 1]);
    const double measured = log_va - log_vb;
    const double required = required_of(a.polar.rho, b.polar.rho);
    const double rounding =
        8.0 * kEps * (1.0 + std::abs(log_va) + std::abs(log_vb) + std::abs(required));
    const double margin = measured - required + comparison_slack(b.t - a.t) + rounding;
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.worst_time = b.t;
    }
  }
  r.pass = r.worst_margin >= 0.0;
  return r;
}

}  // namespace

double v_glofo(const PolarState& s, const UnicycleGains& g) {
  return square(s.rho) + square(glofo_zeta(s, g)) + square(g.q()) * square(s.gamma);
}

double vdot_glofo_analytic(const PolarState& s, const UnicycleGains& g) {
  const double k1 = g.k1(), k2 = g.k2(), k3 = g.k3();
  const double a = k3 / k2 * sinc(2.0 * s.gamma) * glofo_zeta(s, g);
  return -2.0 * k1 * square(s.rho * std::cos(s.gamma)) -
         k1 * k2 / k3 * three_square_sum(a, s.gamma);
}

double v_bofo(const PolarState& s, const UnicycleGains& g) {
  if (!(std::abs(s.gamma) < kPi)) throw Error(ErrorCode::OutsideS1, "v_bofo needs |gamma| < pi");
  return square(s.rho) + square(bofo_zeta(s, g)) +
         4.0 * square(g.q()) * square(std::tan(s.gamma / 2.0));
}

double vdot_bofo_analytic(const PolarState& s, const UnicycleGains& g) {
  if (!(std::abs(s.gamma) < kPi)) {
    throw Error(ErrorCode::OutsideS1, "vdot_bofo_analytic needs |gamma| < pi");
  }
  const double k1 = g.k1(), k2 = g.k2(), k3 = g.k3();
  const double ch = std::cos(s.gamma / 2.0);  // 1 / (1 + tan^2(gamma/2)) == ch^2
  const double a = k3 / k2 * std::cos(s.gamma) * ch * ch * bofo_zeta(s, g);
  return -2.0 * k1 * square(s.rho * std::cos(s.gamma)) -
         k1 * k2 / k3 * three_square_sum(a, 2.0 * std::tan(s.gamma / 2.0));
}

double v_deadbeat_power(const PolarState& s, const DubinsGains& g) {
  require_gamma_below_half_pi(s);
  return g.c2() / g.c1() * square(deadbeat_power_zeta(s, g)) + square(std::tan(s.gamma));
}

double vdot_deadbeat_power_analytic(const PolarState& s, const DubinsGains& g) {
  require_gamma_below_half_pi(s);
  if (!(s.rho > 0.0)) throw Error(ErrorCode::SingularRho, "rate needs rho > 0");
  const double a = g.c2() * deadbeat_power_zeta(s, g);
  const double b = g.c1() * std::tan(s.gamma);
  return -g.v() * std::cos(s.gamma) / (g.c1() * s.rho) * three_square_sum(a, b);
}

double v_deadbeat_exp(const PolarState& s, const DubinsGains& g) {
  require_gamma_below_half_pi(s);
  return g.c2() / g.c1() * square(deadbeat_exp_zeta(s, g)) + square(deadbeat_exp_Gamma(s));
}

double vdot_deadbeat_exp_analytic(const PolarState& s, const DubinsGains& g) {
  require_gamma_below_half_pi(s);
  const double a = g.c2() * deadbeat_exp_zeta(s, g);
  const double b = g.c1() * deadbeat_exp_Gamma(s);
  return -g.v() * std::cos(s.gamma) / (g.c1() * s.rho * s.rho) * three_square_sum(a, b);
}

double angular_error_B(const PolarState& s) { return std::sqrt(b_squared_or_inf(s)); }

PolarState closed_loop_field(const ControllerSpec& spec, const PolarState& s) {
  switch (spec.kind()) {
    case ControllerKind::GloFo:
    case ControllerKind::BoFo: {
      const auto& g = spec.unicycle_gains();
      const double tilde = spec.kind() == ControllerKind::GloFo ? glofo_tilde(s, g) : bofo_tilde(s, g);
      return {-g.k1() * s.rho * square(std::cos(s.gamma)), g.k1() / 2.0 * std::sin(2.0 * s.gamma),
              -tilde};
    }
    case ControllerKind::Null:
      return {0.0, 0.0, 0.0};
    default:
      return rhs(s, evaluate(spec, s));
  }
}

double lyapunov_value(const ControllerSpec& spec, const PolarState& s) {
  try {
    switch (spec.kind()) {
      case ControllerKind::GloFo: return v_glofo(s, spec.unicycle_gains());
      case ControllerKind::BoFo: return v_bofo(s, spec.unicycle_gains());
      case ControllerKind::DeadbeatPower:
      case ControllerKind::DeadbeatBackstep: return v_deadbeat_power(s, spec.dubins_gains());
      case ControllerKind::DeadbeatExp: return v_deadbeat_exp(s, spec.dubins_gains());
      case ControllerKind::Null: break;
    }
  } catch (const Error&) {
  }
  return kNaN;
}

double lyapunov_rate_analytic(const ControllerSpec& spec, const PolarState& s) {
  try {
    switch (spec.kind()) {
      case ControllerKind::GloFo: return vdot_glofo_analytic(s, spec.unicycle_gains());
      case ControllerKind::BoFo: return vdot_bofo_analytic(s, spec.unicycle_gains());
      case ControllerKind::DeadbeatPower:
        return vdot_deadbeat_power_analytic(s, spec.dubins_gains());
      case ControllerKind::DeadbeatExp: return vdot_deadbeat_exp_analytic(s, spec.dubins_gains());
      case ControllerKind::DeadbeatBackstep:
      case ControllerKind::Null: break;
    }
  } catch (const Error&) {
  }
  return kNaN;
}

double lyapunov_rate_numeric(const ControllerSpec& spec, const PolarState& s) {
  try {
    const PolarState f = closed_loop_field(spec, s);
    const double h = 1e-6 * std::max(1.0, norm(s));
    const double tau = h / std::max(1.0, norm(f));
    const double vp = lyapunov_value(spec, axpy(s, tau, f));
    const double vm = lyapunov_value(spec, axpy(s, -tau, f));
    return (vp - vm) / (2.0 * tau);
  } catch (const Error&) {
    return kNaN;
  }
}

CertificateSample certify(const ControllerSpec& spec, double t, const PolarState& s) {
  CertificateSample c;
  c.t = t;
  c.rho = s.rho;
  c.V = lyapunov_value(spec, s);
  c.vdot_analytic = lyapunov_rate_analytic(spec, s);
  c.vdot_numeric = lyapunov_rate_numeric(spec, s);
  c.B = is_deadbeat(spec.kind()) ? angular_error_B(s) : kNaN;
  try {
    c.zeta = forwarding_zeta(spec, s);
  } catch (const Error&) {
    c.zeta = kNaN;
  }
  return c;
}

double cascade_residual(const ControllerSpec& spec, const PolarState& s) {
  const auto& g = spec.unicycle_gains();
  const double k1 = g.k1(), k2 = g.k2(), k3 = g.k3();
  const PolarState f = closed_loop_field(spec, s);
  if (spec.kind() == ControllerKind::GloFo) {
    // d/dgamma [(k1 / 2k2) Si(2 gamma)] = (k1 / k2) sinc(2 gamma)
    const double sc = sinc(2.0 * s.gamma);
    const double zeta = glofo_zeta(s, g);
    const double zeta_dot = f.delta + k1 / k2 * sc * f.gamma;
    const double r1 = zeta_dot + k1 * k3 / k2 * sc * sc * zeta;
    const double r2 = f.gamma + k2 * s.gamma + k3 * sc * zeta;
    return std::max(std::abs(r1), std::abs(r2));
  }
  if (spec.kind() == ControllerKind::BoFo) {
    const double c = std::cos(s.gamma);
    const double w = 1.0 / square(1.0 + square(std::tan(s.gamma / 2.0)));
    const double zeta = bofo_zeta(s, g);
    const double zeta_dot = f.delta + k1 / k2 * c * f.gamma;
    const double r1 = zeta_dot + k1 * k3 / k2 * c * c * w * zeta;
    const double r2 = f.gamma + k2 * std::sin(s.gamma) + k3 * c * w * zeta;
    return std::max(std::abs(r1), std::abs(r2));
  }
  throw Error(ErrorCode::WrongController, "cascade residual is defined for GloFo and BoFo");
}

namespace {

template <class EnvelopeFn>
Lemma1Result check_lemma1(std::span<const RhoValue> samples, EnvelopeFn envelope) {
  if (samples.empty()) throw Error(ErrorCode::EmptyTrace, "comparison lemma needs samples");
  const RhoValue first = samples.front();
  Lemma1Result r;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double env = envelope(first, samples[i].rho);
    const double V = samples[i].V;
    if (!(V <= env * (1.0 + kEnvelopeRelTol) + kEnvelopeAbsTol)) r.pass = false;
    const double ratio = env > 0.0 ? V / env : (V > 0.0 ? kInf : 0.0);
    if (!(ratio <= r.worst_ratio)) {
      r.worst_ratio = ratio;
      r.worst_index = i;
    }
  }
  return r;
}

}  // namespace

Lemma1Result check_lemma1_power(std::span<const RhoValue> samples, double a) {
  return check_lemma1(samples, [a](const RhoValue& first, double rho) {
    return first.V * std::pow(rho / first.rho, a);
  });
}

Lemma1Result check_lemma1_exp(std::span<const RhoValue> samples, double a) {
  return check_lemma1(samples, [a](const RhoValue& first, double rho) {
    return first.V * std::exp(a * (1.0 / first.rho - 1.0 / rho));
  });
}

double t1_thm3(double rho0, double B0, const DubinsGains& g) {
  return rho0 / g.v() * std::sqrt(1.0 + 2.0 * g.c1() * g.c2() * B0 * B0);
}

std::string_view to_string(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::RhoLinear: return "RhoLinear";
    case EnvelopeKind::BPower: return "BPower";
    case EnvelopeKind::BPowerTight: return "BPowerTight";
    case EnvelopeKind::OmegaPower: return "OmegaPower";
    case EnvelopeKind::VPower: return "VPower";
    case EnvelopeKind::VExp: return "VExp";
    case EnvelopeKind::BExpSlope: return "BExpSlope";
    case EnvelopeKind::OmegaTerminal: return "OmegaTerminal";
    case EnvelopeKind::ComparisonPower: return "ComparisonPower";
    case EnvelopeKind::ComparisonExp: return "ComparisonExp";
    case EnvelopeKind::VMonotone: return "VMonotone";
  }
  return "Unknown";
}

double BoundEnvelope::param(std::string_view name) const {
  for (const auto& [key, value] : params) {
    if (key == name) return value;
  }
  throw Error(ErrorCode::MalformedInput, "envelope has no parameter '" + std::string(name) + "'");
}

double envelope_bound(const BoundEnvelope& env, double t) {
  const double x = std::max(0.0, 1.0 - t / env.t1);
  switch (env.kind) {
    case EnvelopeKind::RhoLinear:
      return env.param("rho0") * x;
    case EnvelopeKind::BPower:
    case EnvelopeKind::BPowerTight:
    case EnvelopeKind::OmegaPower:
      return env.param("prefactor") * std::pow(x, env.param("exponent"));
    default:
      throw Error(ErrorCode::MalformedInput,
                  std::string(to_string(env.kind)) + " is not a time-indexed envelope");
  }
}

bool CheckReport::passed() const {
  return std::all_of(records.begin(), records.end(),
                     [](const EnvelopeResult& r) { return r.pass || r.informational; });
}

const EnvelopeResult& CheckReport::record(EnvelopeKind kind) const {
  for (const auto& r : records) {
    if (r.kind == kind) return r;
  }
  throw Error(ErrorCode::MalformedInput, "report has no " + std::string(to_string(kind)) + " record");
}

std::string format_report(const CheckReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "suite=" << report.suite << '\n';
  for (const auto& env : report.envelopes) {
    out << "envelope." << to_string(env.kind) << ".t1=" << env.t1 << '\n';
    for (const auto& [key, value] : env.params) {
      out << "envelope." << to_string(env.kind) << '.' << key << '=' << value << '\n';
    }
  }
  for (const auto& r : report.records) {
    const std::string_view k = to_string(r.kind);
    out << k << ".pass=" << (r.pass ? "true" : "false") << '\n';
    out << k << ".worst_margin=" << r.worst_margin << '\n';
    out << k << ".worst_time=" << r.worst_time << '\n';
    if (r.informational) out << k << ".informational=true\n";
  }
  out << "overall=" << (report.passed() ? "pass" : "fail") << '\n';
  return out.str();
}

double comparison_slack(double dt) { return dt * dt * dt * dt; }

CheckReport check_thm3_envelopes(const Trajectory& traj, const DubinsGains& g) {
  require_kind(traj, ControllerKind::DeadbeatPower);
  require_samples(traj);

  const PolarState& s0 = traj.front().polar;
  const double rho0 = s0.rho;
  const double b0 = angular_error_B(s0);
  const double t1 = t1_thm3(rho0, b0, g);
  const double c1 = g.c1(), c2 = g.c2(), c = g.c_min();

  CheckReport report;
  report.suite = "thm3";
  report.envelopes = {
      {EnvelopeKind::RhoLinear, t1, {{"rho0", rho0}}},
      {EnvelopeKind::BPower, t1, {{"prefactor", 2.0 * c1 * c2 * b0 * b0}, {"exponent", c}}},
      {EnvelopeKind::BPowerTight, t1, {{"prefactor", 2.0 * c1 * b0 * b0}, {"exponent", c}}},
      {EnvelopeKind::OmegaPower,
       t1,
       {{"prefactor", g.v() / rho0 * (1.0 + c1 + c2 + c1 * c2) * std::sqrt(2.0 * c1 * c2) * b0},
        {"exponent", c / 2.0 - 1.0}}},
  };

  report.records.push_back(run_time_envelope(report.envelopes[0], traj,
                                             [](const TrajectorySample& s) { return s.polar.rho; }));
  const auto b2 = [](const TrajectorySample& s) { return b_squared_or_inf(s.polar); };
  report.records.push_back(run_time_envelope(report.envelopes[1], traj, b2));
  auto tight = run_time_envelope(report.envelopes[2], traj, b2);
  tight.informational = true;
  report.records.push_back(tight);
  report.records.push_back(run_time_envelope(
      report.envelopes[3], traj, [](const TrajectorySample& s) { return std::abs(s.input.omega); }));

  std::vector<RhoValue> rv;
  std::vector<double> V;
  rv.reserve(traj.samples.size());
  for (const auto& smp : traj.samples) {
    double v = kInf;
    try {
      v = v_deadbeat_power(smp.polar, g);
    } catch (const Error&) {
    }
    rv.push_back({smp.polar.rho, v});
    V.push_back(v);
  }
  report.records.push_back(lemma_record(EnvelopeKind::VPower, check_lemma1_power(rv, c), traj));
  report.records.push_back(run_comparison(EnvelopeKind::ComparisonPower, traj, V,
                                          [c](double rho_a, double rho_b) {
                                            return c * (std::log(rho_a) - std::log(rho_b));
                                          }));
  return report;
}

CheckReport check_thm4_envelopes(const Trajectory& traj, const DubinsGains& g) {
  require_kind(traj, ControllerKind::DeadbeatExp);
  require_samples(traj);

  const PolarState& s0 = traj.front().polar;
  const double rho0 = s0.rho;
  const double b0_sq = b_squared_or_inf(s0);
  double max_b_sq = 0.0;
  for (const auto& smp : traj.samples) max_b_sq = std::max(max_b_sq, b_squared_or_inf(smp.polar));
  // Smallest N1 exp(-beta1) consistent with B^2 <= N1 exp(-beta1 ...) B0^2 on this trace.
  const double kappa = b0_sq > 0.0 ? max_b_sq / b0_sq : 1.0;
  const double t1 = rho0 / g.v() * std::sqrt(1.0 + kappa * b0_sq);
  const double c = g.c_min();

  CheckReport report;
  report.suite = "thm4";
  report.envelopes = {{EnvelopeKind::RhoLinear, t1, {{"rho0", rho0}, {"kappa", kappa}}}};
  report.records.push_back(run_time_envelope(report.envelopes[0], traj,
                                             [](const TrajectorySample& s) { return s.polar.rho; }));

  std::vector<RhoValue> rv;
  std::vector<double> V;
  for (const auto& smp : traj.samples) {
    double v = kInf;
    try {
      v = v_deadbeat_exp(smp.polar, g);
    } catch (const Error&) {
    }
    rv.push_back({smp.polar.rho, v});
    V.push_back(v);
  }
  report.records.push_back(lemma_record(EnvelopeKind::VExp, check_lemma1_exp(rv, c), traj));

  // Least-squares slope of log B^2 against u = 1 / (1 - t/t1).
  {
    double n = 0, su = 0, sy = 0, suu = 0, suy = 0;
    for (const auto& smp : traj.samples) {
      const double b2 = b_squared_or_inf(smp.polar);
      if (!(smp.t < t1) || !(b2 >= std::numeric_limits<double>::min()) || !std::isfinite(b2)) continue;
      const double u = 1.0 / (1.0 - smp.t / t1);
      const double y = std::log(b2);
      n += 1;
      su += u;
      sy += y;
      suu += u * u;
      suy += u * y;
    }
    EnvelopeResult r{EnvelopeKind::BExpSlope};
    const double denom = n * suu - su * su;
    if (n >= 3 && denom > 0.0) {
      const double slope = (n * suy - su * sy) / denom;
      r.pass = slope < 0.0;
      r.worst_margin = -slope;
      report.envelopes.push_back({EnvelopeKind::BExpSlope, t1, {{"fitted_beta", -slope}}});
    } else {
      r.pass = true;
      r.worst_margin = 0.0;
    }
    r.worst_time = traj.back().t;
    report.records.push_back(r);
  }

  {
    double at_cutoff = std::abs(traj.back().input.omega);
    if (traj.termination == Termination::Cutoff) {
      try {
        at_cutoff = std::abs(deadbeat_exp_omega(traj.back().polar, g));
      } catch (const Error&) {
        at_cutoff = kInf;
      }
    }
    double peak = at_cutoff;
    for (const auto& smp : traj.samples) peak = std::max(peak, std::abs(smp.input.omega));
    EnvelopeResult r{EnvelopeKind::OmegaTerminal};
    r.worst_margin = kOmegaTerminalFraction * peak - at_cutoff;
    r.pass = peak == 0.0 || r.worst_margin >= 0.0;
    r.worst_time = traj.back().t;
    report.records.push_back(r);
  }

  report.records.push_back(run_comparison(EnvelopeKind::ComparisonExp, traj, V,
                                          [c](double rho_a, double rho_b) {
                                            return c * (1.0 / rho_b - 1.0 / rho_a);
                                          }));
  return report;
}

CheckReport check_monotone_v(const Trajectory& traj) {
  require_samples(traj);
  if (traj.metadata.controller.kind() == ControllerKind::Null) {
    throw Error(ErrorCode::WrongController, "the null controller has no Lyapunov function");
  }
  CheckReport report;
  report.suite = "monotone";
  EnvelopeResult r{EnvelopeKind::VMonotone};
  r.worst_margin = kInf;
  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i];
    const auto& b = traj.samples[i + 1];
    const double h = b.t - a.t;
    const double slack = (h * h * h * h + 4.0 * kEps) * std::abs(a.cert.V);
    const double margin = a.cert.V + slack - b.cert.V;
    if (!(margin >= r.worst_margin)) {
      r.worst_margin = margin;
      r.worst_time = b.t;
    }
  }
  if (traj.samples.size() < 2) r.worst_margin = 0.0;
  r.pass = r.worst_margin >= 0.0;
  report.records.push_back(r);
  return report;
}

}  // namespace polarpark
