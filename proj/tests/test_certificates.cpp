#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "polarpark/certificates.hpp"
#include "polarpark/error.hpp"
#include "polarpark/scenario_file.hpp"
#include "polarpark/simulator.hpp"
#include "polarpark/sweep.hpp"

using namespace polarpark;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected polarpark::Error");
  return ErrorCode::MalformedInput;
}

// Test-side reference closed loops, written from the defining formulas and
// kept apart from the library. Each returns (rho', delta', gamma').
struct Field {
  double rho, delta, gamma;
};

Field kinematics(double rho, double gamma, double v, double omega) {
  return {-v * std::cos(gamma), v * std::sin(gamma) / rho, v * std::sin(gamma) / rho - omega};
}

double ref_si(double a) {
  // Simpson on sin(x)/x, plenty for |a| <= 3.
  const int n = 2000;
  const double h = a / n;
  auto f = [](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; };
  double acc = f(0.0) + f(a);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

double ref_v_glofo(const Field& s, double k1, double k2, double k3) {
  const double zeta = s.delta + k1 / (2.0 * k2) * ref_si(2.0 * s.gamma);
  return s.rho * s.rho + zeta * zeta + k1 / k3 * s.gamma * s.gamma;
}

Field ref_glofo_field(const Field& s, double k1, double k2, double k3) {
  const double v = k1 * s.rho * std::cos(s.gamma);
  const double zeta = s.delta + k1 / (2.0 * k2) * ref_si(2.0 * s.gamma);
  const double sinc2 = s.gamma == 0.0 ? 1.0 : std::sin(2.0 * s.gamma) / (2.0 * s.gamma);
  const double omega = k1 / 2.0 * std::sin(2.0 * s.gamma) + k2 * s.gamma + k3 * sinc2 * zeta;
  return kinematics(s.rho, s.gamma, v, omega);
}

double ref_v_power(const Field& s, double c1, double c2) {
  const double zeta = std::tan(s.gamma) + c1 * s.delta;
  return c2 / c1 * zeta * zeta + std::tan(s.gamma) * std::tan(s.gamma);
}

Field ref_power_field(const Field& s, double c1, double c2, double v) {
  const double t = std::tan(s.gamma);
  const double wbar = c1 * t + c2 * (t + c1 * s.delta);
  const double c = std::cos(s.gamma);
  return kinematics(s.rho, s.gamma, v, v / s.rho * (std::sin(s.gamma) + c * c * c * wbar));
}

template <class VFn, class FFn>
double ref_rate(const Field& s, VFn V, FFn F) {
  const double h = 1e-5;
  const Field f = F(s);
  const Field p{s.rho + h * f.rho, s.delta + h * f.delta, s.gamma + h * f.gamma};
  const Field m{s.rho - h * f.rho, s.delta - h * f.delta, s.gamma - h * f.gamma};
  return (V(p) - V(m)) / (2.0 * h);
}

Trajectory run_preset(const char* name) { return integrate(preset(name).front()); }

}  // namespace

TEST_SUITE("certificates") {
  TEST_CASE("Lyapunov values at simple states") {
    const UnicycleGains g(1.0, 1.0, 1.0);
    CHECK(v_glofo({1.0, 0.0, 0.0}, g) == 1.0);
    CHECK(v_glofo({0.0, 1.0, 0.0}, g) == 1.0);
    CHECK(v_bofo({0.0, 1.0, 0.0}, g) == 1.0);
    CHECK(v_bofo({0.0, 0.0, kPi / 2.0}, UnicycleGains(1.0, 1.0, 1.0)) ==
          doctest::Approx(1.0 + 4.0 * 1.0));
    CHECK(code_of([&] { v_bofo({1.0, 0.0, -kPi}, g); }) == ErrorCode::OutsideS1);

    const DubinsGains d(3.0, 3.0, 1.0);
    CHECK(v_deadbeat_power({1.0, 0.0, kPi / 4.0}, d) == doctest::Approx(2.0));
    CHECK(code_of([&] { v_deadbeat_power({1.0, 0.0, kPi / 2.0}, d); }) == ErrorCode::GammaOutOfRange);
    CHECK(v_deadbeat_exp({1.0, 1.0, 0.0}, DubinsGains(1.0, 1.0, 1.0)) == doctest::Approx(5.0));
    CHECK(angular_error_B({1.0, 3.0, std::atan(4.0)}) == doctest::Approx(5.0));
  }

  TEST_CASE("analytic rates at hand-computed states") {
    const UnicycleGains g(1.0, 1.0, 1.0);
    CHECK(vdot_glofo_analytic({1.0, 0.0, 0.0}, g) == doctest::Approx(-2.0));
    CHECK(vdot_glofo_analytic({0.0, 1.0, 0.0}, g) == doctest::Approx(-2.0));
    CHECK(vdot_bofo_analytic({0.0, 1.0, 0.0}, g) == doctest::Approx(-2.0));
    CHECK(vdot_deadbeat_power_analytic({1.0, 0.0, kPi / 4.0}, DubinsGains(3.0, 3.0, 1.0)) ==
          doctest::Approx(-9.0 * std::sqrt(2.0)));
    CHECK(vdot_glofo_analytic({0.0, 0.0, 0.0}, g) == 0.0);
  }

  TEST_CASE("GloFo rate agrees with an independent closed loop") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> rho(0.05, 5.0), del(-6.0, 6.0), gam(-1.5, 1.5);
    const double k1 = 1.0, k2 = 3.0, k3 = 2.0;
    const UnicycleGains g(k1, k2, k3);
    for (int i = 0; i < 200; ++i) {
      const Field s{rho(rng), del(rng), gam(rng)};
      const double ref = ref_rate(
          s, [&](const Field& x) { return ref_v_glofo(x, k1, k2, k3); },
          [&](const Field& x) { return ref_glofo_field(x, k1, k2, k3); });
      const double got = vdot_glofo_analytic({s.rho, s.delta, s.gamma}, g);
      CHECK(got == doctest::Approx(ref).epsilon(1e-6).scale(1.0));
    }
  }

  TEST_CASE("power deadbeat rate agrees with an independent closed loop") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> rho(0.1, 3.0), del(-2.0, 2.0), gam(-1.3, 1.3);
    const DubinsGains g(2.05, 2.1, 0.5);
    for (int i = 0; i < 200; ++i) {
      const Field s{rho(rng), del(rng), gam(rng)};
      const double ref = ref_rate(
          s, [&](const Field& x) { return ref_v_power(x, 2.05, 2.1); },
          [&](const Field& x) { return ref_power_field(x, 2.05, 2.1, 0.5); });
      const double got = vdot_deadbeat_power_analytic({s.rho, s.delta, s.gamma}, g);
      CHECK(got == doctest::Approx(ref).epsilon(1e-6).scale(1.0));
    }
  }

  TEST_CASE("library finite difference agrees with analytic rates") {
    const std::vector<ControllerSpec> specs = {
        ControllerSpec::glofo(UnicycleGains(1.0, 3.0, 2.0)),
        ControllerSpec::bofo(UnicycleGains(1.0, 3.0, 2.0)),
        ControllerSpec::deadbeat_power(DubinsGains(2.05, 2.1, 0.5)),
        ControllerSpec::deadbeat_exp(DubinsGains(0.7, 1.3, 0.5)),
    };
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> rho(0.1, 5.0), del(-3.0, 3.0), gam(-1.4, 1.4);
    for (const auto& spec : specs) {
      CAPTURE(to_string(spec.kind()));
      for (int i = 0; i < 300; ++i) {
        const PolarState s{rho(rng), del(rng), gam(rng)};
        const double a = lyapunov_rate_analytic(spec, s);
        const double n = lyapunov_rate_numeric(spec, s);
        CHECK(std::abs(a - n) <= 1e-6 * (1.0 + std::abs(a)));
      }
    }
    CHECK(std::isnan(lyapunov_rate_analytic(ControllerSpec::null(), {1.0, 0.0, 0.0})));
    CHECK(std::isnan(lyapunov_rate_analytic(
        ControllerSpec::deadbeat_backstep(DubinsGains(3.0, 3.0, 1.0)), {1.0, 0.0, 0.1})));
  }

  TEST_CASE("CLF rates are negative away from the origin") {
    for (const auto& spec : {ControllerSpec::glofo(UnicycleGains(1.0, 3.0, 2.0)),
                             ControllerSpec::bofo(UnicycleGains(1.0, 3.0, 2.0))}) {
      StateBox box;
      if (spec.kind() == ControllerKind::BoFo) box.gamma_max = kPi - 1e-3;
      const auto states = sample_states(11, 2000, box);
      const auto summary = summarize(clf_sweep(spec, states), 1e-6);
      CHECK(summary.count == 2000);
      CHECK(summary.nonnegative == 0);
      CHECK(summary.disagreements == 0);
    }
  }

  TEST_CASE("cascade residuals vanish") {
    for (const auto& spec : {ControllerSpec::glofo(UnicycleGains(1.0, 3.0, 2.0)),
                             ControllerSpec::bofo(UnicycleGains(1.3, 0.7, 2.5))}) {
      StateBox box;
      if (spec.kind() == ControllerKind::BoFo) box.gamma_max = kPi - 1e-3;
      for (const double r : cascade_sweep(spec, sample_states(13, 500, box))) CHECK(r < 1e-10);
    }
    CHECK(code_of([] {
            cascade_residual(ControllerSpec::deadbeat_exp(DubinsGains(1.0, 1.0, 1.0)), {1.0, 0.0, 0.0});
          }) == ErrorCode::WrongController);
  }

  TEST_CASE("sphere minima grow with the radius") {
    const std::vector<double> radii = {0.1, 0.3, 1.0, 3.0, 10.0};
    for (const auto& spec : {ControllerSpec::glofo(UnicycleGains(1.0, 3.0, 2.0)),
                             ControllerSpec::bofo(UnicycleGains(1.0, 3.0, 2.0))}) {
      const auto lo = sphere_min_v(spec, radii, 24);
      const auto hi = sphere_max_v(spec, radii, 24);
      for (std::size_t i = 0; i < radii.size(); ++i) {
        CHECK(lo[i] > 0.0);
        CHECK(lo[i] <= hi[i]);
        if (i > 0) CHECK(lo[i] > lo[i - 1]);
      }
    }
  }

  TEST_CASE("comparison lemma on sampled values") {
    const std::vector<RhoValue> exact = {{1.0, 1.0}, {0.5, 0.25}, {0.25, 0.0625}};
    CHECK(check_lemma1_power(exact, 2.0).pass);
    const std::vector<RhoValue> bad = {{1.0, 1.0}, {0.5, 0.3}, {0.25, 0.01}};
    const auto r = check_lemma1_power(bad, 2.0);
    CHECK_FALSE(r.pass);
    CHECK(r.worst_index == 1);
    CHECK(r.worst_ratio == doctest::Approx(1.2));

    const std::vector<RhoValue> expo = {{1.0, 1.0}, {0.5, std::exp(-1.0)}};
    CHECK(check_lemma1_exp(expo, 1.0).pass);
    const std::vector<RhoValue> expo_bad = {{1.0, 1.0}, {0.5, 0.5}};
    CHECK_FALSE(check_lemma1_exp(expo_bad, 1.0).pass);

    const std::vector<RhoValue> zeros = {{1.0, 0.0}, {0.5, 0.0}};
    CHECK(check_lemma1_power(zeros, 2.0).pass);
    CHECK(code_of([] { check_lemma1_power({}, 2.0); }) == ErrorCode::EmptyTrace);
    CHECK(code_of([] { check_lemma1_exp({}, 2.0); }) == ErrorCode::EmptyTrace);
  }

  TEST_CASE("settling-time bound for the first parking maneuver") {
    const double b0 = std::tan(kPi / 2.5);
    const double expected = 2.0 * std::sqrt(1.0 + 2.0 * 2.05 * 2.1 * b0 * b0);
    CHECK(expected == doctest::Approx(18.171966384796817).epsilon(1e-13));
    CHECK(t1_thm3(1.0, b0, DubinsGains(2.05, 2.1, 0.5)) == doctest::Approx(expected).epsilon(1e-14));
  }

  TEST_CASE("power-rate envelopes hold on the parking maneuvers") {
    for (const char* name : {"fig3-red", "fig3-blue", "fig3-cyan"}) {
      CAPTURE(name);
      const auto traj = run_preset(name);
      REQUIRE(traj.termination == Termination::Cutoff);
      const auto report = check_thm3_envelopes(traj, traj.metadata.controller.dubins_gains());
      CHECK(report.passed());
      CHECK(report.record(EnvelopeKind::BPowerTight).informational);
      CHECK(traj.back().t < report.envelopes.front().t1);
    }
  }

  TEST_CASE("power-rate envelopes detect corrupted traces") {
    const auto clean = run_preset("fig3-red");
    const auto& g = clean.metadata.controller.dubins_gains();

    auto inflated = clean;
    for (std::size_t i = 1; i < inflated.samples.size(); ++i) inflated.samples[i].polar.rho *= 1.5;
    auto report = check_thm3_envelopes(inflated, g);
    CHECK_FALSE(report.passed());
    CHECK_FALSE(report.record(EnvelopeKind::RhoLinear).pass);

    auto drifted = clean;
    for (std::size_t i = drifted.samples.size() / 2; i < drifted.samples.size(); ++i) {
      drifted.samples[i].polar.delta += 1.0;
    }
    report = check_thm3_envelopes(drifted, g);
    CHECK_FALSE(report.passed());
    CHECK_FALSE(report.record(EnvelopeKind::ComparisonPower).pass);
  }

  TEST_CASE("straight-in approach passes trivially") {
    Scenario scn;
    scn.name = "straight";
    scn.initial = {1.0, 0.0, 0.0};
    scn.controller = ControllerSpec::deadbeat_power(DubinsGains(2.05, 2.1, 0.5));
    scn.t_max = 5.0;
    const auto traj = integrate(scn);
    CHECK(traj.termination == Termination::Cutoff);
    CHECK(check_thm3_envelopes(traj, scn.controller.dubins_gains()).passed());
    CHECK(traj.back().t == doctest::Approx(0.99 / 0.5).epsilon(1e-6));

    scn.controller = ControllerSpec::deadbeat_exp(DubinsGains(0.7, 1.3, 0.5));
    const auto expo = integrate(scn);
    CHECK(check_thm4_envelopes(expo, scn.controller.dubins_gains()).passed());
  }

  TEST_CASE("exponential-rate checks hold on the parking maneuver") {
    const auto traj = run_preset("fig4");
    REQUIRE(traj.termination == Termination::Cutoff);
    const auto report = check_thm4_envelopes(traj, traj.metadata.controller.dubins_gains());
    CHECK(report.passed());
    CHECK(report.record(EnvelopeKind::BExpSlope).worst_margin > 0.0);

    auto inflated = traj;
    for (std::size_t i = 1; i < inflated.samples.size(); ++i) inflated.samples[i].polar.rho *= 1.5;
    CHECK_FALSE(check_thm4_envelopes(inflated, traj.metadata.controller.dubins_gains()).passed());
  }

  TEST_CASE("reports reject the wrong controller") {
    const auto traj = run_preset("fig4");
    CHECK(code_of([&] { check_thm3_envelopes(traj, DubinsGains(2.05, 2.1, 0.5)); }) ==
          ErrorCode::WrongController);
    const auto red = run_preset("fig3-red");
    CHECK(code_of([&] { check_thm4_envelopes(red, DubinsGains(0.7, 1.3, 0.5)); }) ==
          ErrorCode::WrongController);
    Trajectory empty;
    empty.metadata.controller = ControllerSpec::deadbeat_power(DubinsGains(2.05, 2.1, 0.5));
    CHECK(code_of([&] { check_thm3_envelopes(empty, DubinsGains(2.05, 2.1, 0.5)); }) ==
          ErrorCode::EmptyTrace);
  }

  TEST_CASE("report text") {
    const auto red = run_preset("fig3-red");
    const auto text = format_report(check_thm3_envelopes(red, red.metadata.controller.dubins_gains()));
    CHECK(text.find("suite=thm3\n") == 0);
    CHECK(text.find("RhoLinear.pass=true\n") != std::string::npos);
    CHECK(text.find("BPowerTight.informational=true\n") != std::string::npos);
    CHECK(text.substr(text.size() - 13) == "overall=pass\n");
  }

  TEST_CASE("backstepping adds the LoS angle to the inner term") {
    const DubinsGains g(2.5, 3.0, 0.8);
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> rho(0.01, 5.0), del(-3.0, 3.0), gam(-1.5, 1.5);
    for (int i = 0; i < 1000; ++i) {
      const PolarState s{rho(rng), del(rng), gam(rng)};
      const double c = std::cos(s.gamma);
      const double expected = g.v() / s.rho * c * c * c * s.delta;
      const double diff = deadbeat_backstep_omega(s, g) - deadbeat_power_omega(s, g);
      const double scale = std::abs(deadbeat_power_omega(s, g)) + std::abs(expected) + 1.0;
      CHECK(std::abs(diff - expected) <= 8.0 * std::numeric_limits<double>::epsilon() * scale);
    }
  }
}
