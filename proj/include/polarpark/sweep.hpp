#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polarpark/control_laws.hpp"
#include "polarpark/geometry.hpp"

namespace polarpark {

// Data-parallel certificate kernels. Each has an OpenMP version and a serial
// reference; both produce identical results element by element.

/// Box of states to sample: rho in [0, rho_max], |delta| <= delta_max,
/// |gamma| <= gamma_max.
struct StateBox {
  double rho_max = 10.0;
  double delta_max = 3.0 * kPi;
  double gamma_max = 3.0 * kPi;
};

/// Deterministic uniform samples from the box; states within 1e-9 of the
/// origin are redrawn.
std::vector<PolarState> sample_states(std::uint64_t seed, std::size_t n, const StateBox& box);

struct ClfPoint {
  double vdot_analytic = 0.0;
  double vdot_numeric = 0.0;
};

std::vector<ClfPoint> clf_sweep(const ControllerSpec& spec, std::span<const PolarState> states);
std::vector<ClfPoint> clf_sweep_serial(const ControllerSpec& spec,
                                       std::span<const PolarState> states);

struct ClfSummary {
  std::size_t count = 0;
  std::size_t nonnegative = 0;  ///< analytic rate >= 0 (or NaN)
  std::size_t disagreements = 0;
  double worst_scaled_error = 0.0;  ///< max |a - n| / (1 + |a|)
  double max_rate = -1e300;         ///< largest analytic rate seen
};

/// Agreement tolerance is |a - n| <= rel_tol * (1 + |a|).
ClfSummary summarize(std::span<const ClfPoint> points, double rel_tol);

std::vector<double> cascade_sweep(const ControllerSpec& spec, std::span<const PolarState> states);
std::vector<double> cascade_sweep_serial(const ControllerSpec& spec,
                                         std::span<const PolarState> states);

/// Minimum of the controller's V over a triangular grid of the sphere
/// {|s| = r} in the state-space metric (metric_S for GloFo, metric_S1 for
/// BoFo), for each radius. grid is the number of subdivisions per simplex edge.
std::vector<double> sphere_min_v(const ControllerSpec& spec, std::span<const double> radii,
                                 int grid);
std::vector<double> sphere_min_v_serial(const ControllerSpec& spec,
                                        std::span<const double> radii, int grid);
/// Same grid, maximum of V.
std::vector<double> sphere_max_v(const ControllerSpec& spec, std::span<const double> radii,
                                 int grid);

}  // namespace polarpark
