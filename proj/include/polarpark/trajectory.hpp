#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "polarpark/control_laws.hpp"
#include "polarpark/geometry.hpp"

namespace polarpark {

/// Lyapunov data attached to one trajectory sample. Quantities that are not
/// defined for the active controller are NaN.
struct CertificateSample {
  double t = 0.0;
  double V = 0.0;
  double vdot_analytic = 0.0;
  double vdot_numeric = 0.0;
  double rho = 0.0;
  double B = 0.0;  ///< sqrt(delta^2 + tan^2 gamma), deadbeat laws only
  double zeta = 0.0;
};

struct Scenario {
  std::string name;
  PolarState initial;
  ControllerSpec controller;
  double dt = 1e-3;
  double t_max = 60.0;
  double cutoff_rho = 0.01;  ///< 0 disables the cutoff
  int record_stride = 1;

  /// Throws InvalidScenario when an invariant is violated.
  void validate() const;
};

enum class Termination { Cutoff, Horizon, DomainExit, NumericalFault };

std::string_view to_string(Termination t);

struct TrajectorySample {
  double t = 0.0;
  PolarState polar;
  CartesianState cartesian;
  ControlInput input;
  CertificateSample cert;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Termination termination = Termination::Horizon;
  Scenario metadata;
  std::string fault_message;

  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
};

}  // namespace polarpark
