#include "polarpark/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "polarpark/certificates.hpp"
#include "polarpark/error.hpp"

namespace polarpark {

namespace {

ClfPoint clf_point(const ControllerSpec& spec, const PolarState& s) {
  return {lyapunov_rate_analytic(spec, s), lyapunov_rate_numeric(spec, s)};
}

// Extreme of V over the sphere of radius r; pick(a, b) selects the kept value.
template <class Pick>
double sphere_extreme(const ControllerSpec& spec, double r, int grid, double init, Pick pick) {
  const bool bounded_los = spec.kind() == ControllerKind::BoFo;
  double best = init;
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; i + j <= grid; ++j) {
      const double w_rho = static_cast<double>(i) / grid;
      const double w_delta = static_cast<double>(j) / grid;
      const double w_gamma = 1.0 - w_rho - w_delta;
      const double gamma_mag =
          bounded_los ? 2.0 * std::atan(r * w_gamma / 2.0) : r * w_gamma;
      for (double sd : {1.0, -1.0}) {
        for (double sg : {1.0, -1.0}) {
          const PolarState s{r * w_rho, sd * r * w_delta, sg * gamma_mag};
          best = pick(best, lyapunov_value(spec, s));
        }
      }
    }
  }
  return best;
}

void require_unicycle(const ControllerSpec& spec) {
  if (spec.kind() != ControllerKind::GloFo && spec.kind() != ControllerKind::BoFo) {
    throw Error(ErrorCode::WrongController, "sphere sweeps are defined for GloFo and BoFo");
  }
}

constexpr double kInf = std::numeric_limits<double>::infinity();

double min_pick(double a, double b) { return std::isnan(b) ? a : std::min(a, b); }
double max_pick(double a, double b) { return std::isnan(b) ? kInf : std::max(a, b); }

}  // namespace

std::vector<PolarState> sample_states(std::uint64_t seed, std::size_t n, const StateBox& box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PolarState> out;
  out.reserve(n);
  while (out.size() < n) {
    const PolarState s{box.rho_max * unit(rng), box.delta_max * (2.0 * unit(rng) - 1.0),
                       box.gamma_max * (2.0 * unit(rng) - 1.0)};
    if (metric_S(s) < 1e-9) continue;
    out.push_back(s);
  }
  return out;
}

std::vector<ClfPoint> clf_sweep_serial(const ControllerSpec& spec,
                                       std::span<const PolarState> states) {
  std::vector<ClfPoint> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = clf_point(spec, states[i]);
  return out;
}

std::vector<ClfPoint> clf_sweep(const ControllerSpec& spec, std::span<const PolarState> states) {
  std::vector<ClfPoint> out(states.size());
  const long n = static_cast<long>(states.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[i] = clf_point(spec, states[i]);
  return out;
}

ClfSummary summarize(std::span<const ClfPoint> points, double rel_tol) {
  ClfSummary s;
  s.count = points.size();
  for (const auto& p : points) {
    if (!(p.vdot_analytic < 0.0)) ++s.nonnegative;
    const double err = std::abs(p.vdot_analytic - p.vdot_numeric) / (1.0 + std::abs(p.vdot_analytic));
    if (!(err <= rel_tol)) ++s.disagreements;
    if (!(err <= s.worst_scaled_error)) s.worst_scaled_error = err;
    if (!(p.vdot_analytic <= s.max_rate)) s.max_rate = p.vdot_analytic;
  }
  return s;
}

std::vector<double> cascade_sweep_serial(const ControllerSpec& spec,
                                         std::span<const PolarState> states) {
  std::vector<double> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out[i] = cascade_residual(spec, states[i]);
  return out;
}

std::vector<double> cascade_sweep(const ControllerSpec& spec, std::span<const PolarState> states) {
  std::vector<double> out(states.size());
  const long n = static_cast<long>(states.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) out[i] = cascade_residual(spec, states[i]);
  return out;
}

std::vector<double> sphere_min_v_serial(const ControllerSpec& spec,
                                        std::span<const double> radii, int grid) {
  require_unicycle(spec);
  std::vector<double> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    out[i] = sphere_extreme(spec, radii[i], grid, kInf, min_pick);
  }
  return out;
}

std::vector<double> sphere_min_v(const ControllerSpec& spec, std::span<const double> radii,
                                 int grid) {
  require_unicycle(spec);
  std::vector<double> out(radii.size());
  const long n = static_cast<long>(radii.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) out[i] = sphere_extreme(spec, radii[i], grid, kInf, min_pick);
  return out;
}

std::vector<double> sphere_max_v(const ControllerSpec& spec, std::span<const double> radii,
                                 int grid) {
  require_unicycle(spec);
  std::vector<double> out(radii.size());
  const long n = static_cast<long>(radii.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) out[i] = sphere_extreme(spec, radii[i], grid, -kInf, max_pick);
  return out;
}

}  // namespace polarpark
