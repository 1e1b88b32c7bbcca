#include "polarpark/simulator.hpp"

#include <cmath>
#include <string>

#include "polarpark/certificates.hpp"
#include "polarpark/error.hpp"

namespace polarpark {

namespace {

constexpr double kBisectionFraction = 1e-6;
constexpr double kRefineFraction = 0.1;

bool finite(const PolarState& s) {
  return std::isfinite(s.rho) && std::isfinite(s.delta) && std::isfinite(s.gamma);
}

PolarState combine(const PolarState& s, double a, const PolarState& k) {
  return {s.rho + a * k.rho, s.delta + a * k.delta, s.gamma + a * k.gamma};
}

PolarState field(const ControllerSpec& spec, const PolarState& s) {
  if (spec.kind() == ControllerKind::Null) return {0.0, 0.0, 0.0};
  return rhs(s, evaluate(spec, s));
}

TrajectorySample make_sample(const ControllerSpec& spec, double t, const PolarState& s,
                             const ControlInput& u) {
  return {t, s, polar_to_cartesian(s), u, certify(spec, t, s)};
}

BatchItem run_item(const Scenario& scn) {
  BatchItem item;
  try {
    item.trajectory = integrate(scn);
  } catch (const std::exception& e) {
    item.error = e.what();
  }
  return item;
}

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Cutoff: return "Cutoff";
    case Termination::Horizon: return "Horizon";
    case Termination::DomainExit: return "DomainExit";
    case Termination::NumericalFault: return "NumericalFault";
  }
  return "Unknown";
}

void Scenario::validate() const {
  auto fail = [this](const std::string& msg) {
    throw Error(ErrorCode::InvalidScenario, (name.empty() ? "" : name + ": ") + msg);
  };
  if (!finite(initial)) fail("initial state must be finite");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) fail("t_max must be positive");
  if (!(dt <= t_max)) fail("dt must not exceed t_max");
  if (!(cutoff_rho >= 0.0)) fail("cutoff_rho must be non-negative");
  if (!(cutoff_rho < initial.rho)) fail("cutoff_rho must be below the initial rho");
  if (record_stride < 1) fail("record_stride must be at least 1");
  if (is_deadbeat(controller.kind()) && !(std::abs(initial.gamma) < kDeadbeatGammaLimit)) {
    fail("deadbeat laws need |gamma0| < pi/2");
  }
  if (controller.kind() == ControllerKind::BoFo && !(std::abs(initial.gamma) < kPi)) {
    fail("BoFo needs |gamma0| < pi");
  }
}

PolarState rhs(const PolarState& s, const ControlInput& u) {
  if (!(s.rho > 0.0)) throw Error(ErrorCode::SingularRho, "polar kinematics need rho > 0");
  const double turn = u.v * std::sin(s.gamma) / s.rho;
  return {-u.v * std::cos(s.gamma), turn, turn - u.omega};
}

PolarState rk4_step(const ControllerSpec& spec, const PolarState& s, double h) {
  const PolarState k1 = field(spec, s);
  const PolarState k2 = field(spec, combine(s, h / 2.0, k1));
  const PolarState k3 = field(spec, combine(s, h / 2.0, k2));
  const PolarState k4 = field(spec, combine(s, h, k3));
  return {s.rho + h / 6.0 * (k1.rho + 2.0 * (k2.rho + k3.rho) + k4.rho),
          s.delta + h / 6.0 * (k1.delta + 2.0 * (k2.delta + k3.delta) + k4.delta),
          s.gamma + h / 6.0 * (k1.gamma + 2.0 * (k2.gamma + k3.gamma) + k4.gamma)};
}

Trajectory integrate(const Scenario& scn) {
  scn.validate();
  const ControllerSpec& spec = scn.controller;
  const bool deadbeat = is_deadbeat(spec.kind());
  const double rho0 = scn.initial.rho;

  Trajectory traj;
  traj.metadata = scn;
  traj.samples.push_back(make_sample(spec, 0.0, scn.initial, evaluate(spec, scn.initial)));

  PolarState s = scn.initial;
  double t = 0.0;
  long step = 0;
  bool last_recorded = true;

  auto finish = [&](Termination why, std::string message) {
    if (!last_recorded) traj.samples.push_back(make_sample(spec, t, s, evaluate(spec, s)));
    traj.termination = why;
    traj.fault_message = std::move(message);
    return traj;
  };

  while (scn.t_max - t > 1e-9 * scn.dt) {
    double h = scn.dt;
    if (deadbeat && s.rho < kRefineFraction * rho0) h = scn.dt * (s.rho / rho0);
    h = std::min(h, scn.t_max - t);

    PolarState next;
    try {
      next = rk4_step(spec, s, h);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::GammaOutOfRange) return finish(Termination::DomainExit, e.what());
      return finish(Termination::NumericalFault, e.what());
    }
    if (!finite(next)) return finish(Termination::NumericalFault, "non-finite state");

    if (scn.cutoff_rho > 0.0 && next.rho <= scn.cutoff_rho) {
      double lo = 0.0, hi = h;
      PolarState at_hi = next;
      while (hi - lo > scn.dt * kBisectionFraction) {
        const double mid = 0.5 * (lo + hi);
        const PolarState trial = rk4_step(spec, s, mid);
        if (trial.rho <= scn.cutoff_rho) {
          hi = mid;
          at_hi = trial;
        } else {
          lo = mid;
        }
      }
      traj.samples.push_back(make_sample(spec, t + hi, at_hi, ControlInput{0.0, 0.0}));
      traj.termination = Termination::Cutoff;
      return traj;
    }

    if (deadbeat && !(std::abs(next.gamma) < kDeadbeatGammaLimit)) {
      return finish(Termination::DomainExit, "|gamma| reached pi/2");
    }

    s = next;
    t += h;
    ++step;
    last_recorded = (step % scn.record_stride == 0);
    if (last_recorded) traj.samples.push_back(make_sample(spec, t, s, evaluate(spec, s)));
  }
  return finish(Termination::Horizon, {});
}

std::vector<BatchItem> batch_run_serial(std::span<const Scenario> scenarios) {
  std::vector<BatchItem> out;
  out.reserve(scenarios.size());
  for (const auto& scn : scenarios) out.push_back(run_item(scn));
  return out;
}

std::vector<BatchItem> batch_run(std::span<const Scenario> scenarios) {
  std::vector<BatchItem> out(scenarios.size());
  const long n = static_cast<long>(scenarios.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    out[i] = run_item(scenarios[i]);
  }
  return out;
}

}  // namespace polarpark
