#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polarpark/control_laws.hpp"
#include "polarpark/geometry.hpp"
#include "polarpark/trajectory.hpp"

namespace polarpark {

/// Polar kinematics (rho', delta', gamma') for the input u. Throws SingularRho
/// for rho <= 0.
PolarState rhs(const PolarState& s, const ControlInput& u);

/// One classical fourth-order Runge-Kutta step of the closed loop, with the
/// controller evaluated at every stage state.
PolarState rk4_step(const ControllerSpec& spec, const PolarState& s, double h);

/// Fixed-step integration with event handling. A cutoff crossing is localized
/// by bisection to dt * 1e-6 and recorded with zero inputs. Deadbeat runs
/// shrink the step to dt * rho / rho0 once rho < 0.1 rho0.
/// Throws InvalidScenario when the scenario fails validation; domain exits and
/// non-finite states end the trajectory with the matching Termination.
Trajectory integrate(const Scenario& scn);

struct BatchItem {
  std::optional<Trajectory> trajectory;
  std::string error;  ///< set when the scenario was rejected
};

/// Runs every scenario, in parallel when OpenMP is available. Output order
/// matches input order, and each trajectory equals a solo integrate call.
std::vector<BatchItem> batch_run(std::span<const Scenario> scenarios);

/// Single-threaded reference for batch_run.
std::vector<BatchItem> batch_run_serial(std::span<const Scenario> scenarios);

}  // namespace polarpark
