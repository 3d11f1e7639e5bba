#include <doctest.h>

#include <cmath>
#include <vector>

#include "chemotax/subsolution.hpp"

using namespace chemotax;

namespace {

ModelParams p0() { return make_model_params(3, 1.0, 1.1, 1.1, 1.0, 1.0, 1.0, 1.0); }

Exponents p0_exponents() {
  Exponents e;
  e.alpha = e.beta = 0.1;
  e.delta = 0.45;
  return e;
}

// long double evaluation of the amplitude formula, independent of the
// log-space chain
long double l_oracle(int n, long double R, long double mu_lo) {
  const long double Rn = std::pow(R, (long double)n);
  return mu_lo * Rn / (n * std::exp(1.0L / std::exp(1.0L)) * (Rn + 1.0L));
}

// adaptive step-doubling RK4 for y' = Lambda y^{1+delta}
double rk_y(double t_target, double y0, double delta, double Lambda, double tol) {
  auto f = [&](double y) { return Lambda * std::pow(y, 1.0 + delta); };
  auto rk4 = [&](double y, double h) {
    const double k1 = f(y);
    const double k2 = f(y + 0.5 * h * k1);
    const double k3 = f(y + 0.5 * h * k2);
    const double k4 = f(y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  double t = 0.0, y = y0, h = t_target / 64.0;
  while (t < t_target) {
    h = std::min(h, t_target - t);
    const double big = rk4(y, h);
    const double half = rk4(rk4(y, 0.5 * h), 0.5 * h);
    const double err = std::abs(big - half) / std::max(1.0, std::abs(half));
    if (err < tol) {
      y = half;
      t += h;
      if (err < tol / 32.0) h *= 2.0;
    } else {
      h *= 0.5;
    }
  }
  return y;
}

}  // namespace

TEST_SUITE("subsolution") {

TEST_CASE("constant chain anchors for the reference set") {
  const SubsolutionParams sp = derive_constants(p0(), p0_exponents());
  CHECK(!sp.toy);
  const double l_ref = double(l_oracle(3, 1.0L, 1.0L));
  CHECK(sp.l == doctest::Approx(l_ref).epsilon(1e-13));
  CHECK(std::abs(sp.l - 0.1153667) < 1e-6);
  CHECK(sp.c1 == 1.0);
  CHECK(sp.c2 == 1.0);
  const double lam_ref = 3.0 * l_ref / (2.0 * std::exp(2.0) * 0.9);
  CHECK(sp.Lambda == doctest::Approx(lam_ref).epsilon(1e-13));
  CHECK(std::abs(sp.Lambda - 0.026022) < 1e-5);
  // the transition-diffusion bound is the binding one and forces s0 ~ e^{-64}
  CHECK(sp.log_s0 == doctest::Approx(-63.9942).epsilon(1e-5));
  CHECK(sp.log_theta0 > 100.0);
  CHECK(sp.log_y0 > 300.0);
  // every log companion is finite even though the chain spans 300 e-folds
  for (double lg : {sp.log_l, sp.log_s0, sp.log_theta0, sp.log_theta, sp.log_y_star,
                    sp.log_y0, sp.log_T, sp.log_D1max, sp.log_D2max, sp.log_Lambda})
    CHECK(std::isfinite(lg));
  for (double lg : sp.log_s0_bounds) CHECK(std::isfinite(lg));
}

TEST_CASE("asymmetric theory chain overflows linear space but not log space") {
  const ModelParams params = make_model_params(3, 1.0, 1.4, 1.05, 1.0, 1.0, 1.0, 1.0);
  const Exponents e = select_exponents(1.4, 1.05, 3);
  const SubsolutionParams sp = derive_constants(params, e);
  for (double lg : {sp.log_s0, sp.log_theta0, sp.log_y0, sp.log_T})
    CHECK(std::isfinite(lg));
  // linear companions saturate to the infinity markers
  CHECK(sp.y0 == std::numeric_limits<double>::infinity());
  CHECK(sp.theta0 == std::numeric_limits<double>::infinity());
  CHECK(sp.T == 0.0);  // underflow marker on the other side
  CHECK(sp.log_y0 > 709.0);
}

TEST_CASE("alpha = beta collapses the ratio constants") {
  const SubsolutionParams sp = derive_constants(p0(), p0_exponents());
  CHECK(sp.c1 == doctest::Approx(1.0));
  CHECK(sp.c2 == doctest::Approx(1.0));
  Exponents e = p0_exponents();
  e.alpha = 0.2;
  e.beta = 0.05;
  const SubsolutionParams sp2 = derive_constants(p0(), e);
  CHECK(sp2.c1 == doctest::Approx(1.0));
  CHECK(sp2.c2 == doctest::Approx(0.25));
  CHECK(sp2.c1 * sp2.c2 == doctest::Approx(0.05 / 0.2));
}

TEST_CASE("toy overrides keep the trajectory in linear range") {
  ConstantOverrides ov;
  ov.y0 = 1000.0;
  ov.theta = 1.0;
  const SubsolutionParams sp = derive_constants(p0(), p0_exponents(), ov);
  CHECK(sp.toy);
  CHECK(sp.y0 == 1000.0);
  CHECK(sp.theta == 1.0);
  CHECK(sp.T == doctest::Approx(std::pow(1000.0, -0.45) / (0.45 * sp.Lambda))
                    .epsilon(1e-13));
  CHECK(std::abs(sp.T - 3.8145) < 1e-3);
}

TEST_CASE("closed-form trajectory solves its own ODE") {
  const ModelParams params = p0();
  const Exponents e = p0_exponents();
  SubsolutionParams sp = toy_shape_params(params, e, 1000.0, 1.0);
  // criterion uses the rounded coefficient
  sp.Lambda = 0.026022;
  sp.log_Lambda = std::log(sp.Lambda);
  sp.log_T = -e.delta * sp.log_y0 - std::log(e.delta) - sp.log_Lambda;
  sp.T = std::exp(sp.log_T);
  const Trajectory tr = make_trajectory(sp, e);
  CHECK(std::abs(tr.T - 3.8145) < 1e-3);

  CHECK(y_of_t(tr, 0.0).y == doctest::Approx(1000.0).epsilon(1e-14));

  // finite-difference derivative check at interior times
  for (double frac : {0.1, 0.5, 0.9}) {
    const double t = frac * tr.T;
    const double h = 1e-6 * tr.T;
    const double dnum = (y_of_t(tr, t + h).y - y_of_t(tr, t - h).y) / (2.0 * h);
    const double dana = sp.Lambda * std::pow(y_of_t(tr, t).y, 1.0 + e.delta);
    CHECK(dnum == doctest::Approx(dana).epsilon(1e-7));
  }

  // against the adaptive integrator
  for (double frac : {0.25, 0.75, 0.99}) {
    const double t = frac * tr.T;
    const double ynum = rk_y(t, 1000.0, e.delta, sp.Lambda, 1e-11);
    CHECK(std::abs(y_of_t(tr, t).y - ynum) / ynum < 1e-6);
  }

  CHECK_THROWS_AS(y_of_t(tr, tr.T), std::domain_error);
  CHECK_THROWS_AS(y_of_t(tr, 2.0 * tr.T), std::domain_error);
}

TEST_CASE("kink continuity of value and slope") {
  const ModelParams params = p0();
  const Exponents e = p0_exponents();
  const SubsolutionParams sp = toy_shape_params(params, e, 1000.0, 1.0);
  const Trajectory tr = make_trajectory(sp, e);

  for (int k = 0; k < 100; ++k) {
    const double t = (0.001 + 0.989 * k / 99.0) * tr.T;
    const auto [y, log_y] = y_of_t(tr, t);
    const double kink = 1.0 / y;
    const double decay = std::exp(-sp.theta * t);

    // both closed-form branches at s = 1/y, evaluated directly
    const double inner_v = decay * sp.l * std::pow(y, 1.0 - e.alpha) * kink;
    const double outer_v = decay * sp.l * std::pow(e.alpha, -e.alpha) *
                           std::pow(kink - (1.0 - e.alpha) / y, e.alpha);
    CHECK(std::abs(inner_v - outer_v) / inner_v < 1e-10);

    const double inner_s = decay * sp.l * std::pow(y, 1.0 - e.alpha);
    const double outer_s = decay * sp.l * std::pow(e.alpha, 1.0 - e.alpha) *
                           std::pow(kink - (1.0 - e.alpha) / y, e.alpha - 1.0);
    CHECK(std::abs(inner_s - outer_s) / inner_s < 1e-10);

    // the evaluator agrees with both from either side of the kink
    const double v = eval_subsolution(kink, t, Species::U, Part::value, sp, e);
    CHECK(v == doctest::Approx(inner_v).epsilon(1e-12));
    const double v_up = eval_subsolution(kink * (1.0 + 1e-9), t, Species::U,
                                         Part::value, sp, e);
    CHECK(std::abs(v_up - v) / v < 1e-8);
  }
}

TEST_CASE("time scaling is exactly the decay factor") {
  const ModelParams params = p0();
  const Exponents e = p0_exponents();
  const SubsolutionParams sp = toy_shape_params(params, e, 1000.0, 1.0);
  const SubsolutionParams sp_hat = toy_shape_params(params, e, 1000.0, 0.0);
  const double t = 0.5 / sp.theta;  // theta t = 1/2
  for (double s : {1e-5, 1e-3, 0.02, 0.5, 1.0}) {
    const double lhs = eval_subsolution(s, t, Species::U, Part::value, sp, e);
    const double rhs = std::exp(-0.5) *
                       eval_subsolution(s, t, Species::U, Part::value, sp_hat, e);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("pair is nondecreasing in s and bounded at the right edge") {
  const ModelParams params = p0();
  const Exponents e = p0_exponents();
  const SubsolutionParams sp = toy_shape_params(params, e, 1000.0, 1.0);
  const Trajectory tr = make_trajectory(sp, e);
  const double cap = params.mu_star_lo * params.sn() / params.n;
  for (double frac : {0.0, 0.3, 0.7, 0.95}) {
    const double t = frac * tr.T;
    for (double s : {0.0, 1e-4, 1e-3, 0.1, 0.9, 1.0}) {
      CHECK(eval_subsolution(s, t, Species::U, Part::ds, sp, e) >= 0.0);
      CHECK(eval_subsolution(s, t, Species::W, Part::ds, sp, e) >= 0.0);
    }
    CHECK(eval_subsolution(params.sn(), t, Species::U, Part::value, sp, e) <=
          cap * (1.0 + 1e-12));
    CHECK(eval_subsolution(params.sn(), t, Species::W, Part::value, sp, e) <=
          cap * (1.0 + 1e-12));
  }
}

TEST_CASE("center slope diverges toward the blow-up time") {
  const ModelParams params = p0();
  const Exponents e = p0_exponents();
  const SubsolutionParams sp = toy_shape_params(params, e, 1000.0, 0.25);
  const Trajectory tr = make_trajectory(sp, e);
  double prev = 0.0;
  for (double frac : {0.0, 0.5, 0.9, 0.99, 0.9999}) {
    const double t = frac * tr.T;
    const double slope = eval_subsolution(0.0, t, Species::U, Part::ds, sp, e);
    CHECK(slope > prev);
    prev = slope;
    if (sp.theta * t <= 1.0) {
      const double floor_bound =
          sp.l / std::numbers::e * std::pow(y_of_t(tr, t).y, 1.0 - e.alpha);
      CHECK(slope >= floor_bound * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("initial mass thresholds") {
  const ModelParams params = p0();
  const Exponents e = p0_exponents();
  const SubsolutionParams sp = toy_shape_params(params, e, 1000.0, 1.0);

  const auto [M10, M20] = initial_mass_threshold(0.0, sp, e, params);
  CHECK(M10 == 0.0);
  CHECK(M20 == 0.0);

  const auto [M1R, M2R] = initial_mass_threshold(1.0, sp, e, params);
  const double cap = params.omega_n * params.mu_star_lo * params.sn() / params.n;
  CHECK(M1R <= cap);
  CHECK(M2R <= cap);
  CHECK(M1R > 0.0);

  double prev1 = -1.0, prev2 = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const auto [M1, M2] = initial_mass_threshold(i / 100.0, sp, e, params);
    CHECK(M1 >= prev1);
    CHECK(M2 >= prev2);
    prev1 = M1;
    prev2 = M2;
  }
}

TEST_CASE("generated initial data realize the pair") {
  const ModelParams params = p0();
  const Exponents e = p0_exponents();
  const SubsolutionParams sp = toy_shape_params(params, e, 1000.0, 1.0);
  const ArrayXd grid = subsolution_adapted_s_grid(sp, e, 200, 4000);
  auto [u0, w0] = generate_initial_profiles(sp, e, params, grid);

  // center density n l y0^{1-alpha}; the long double oracle gives 173.4611
  const double center_ref =
      double(3.0L * l_oracle(3, 1.0L, 1.0L) * std::pow(1000.0L, 0.9L));
  CHECK(u0.values[0] == doctest::Approx(center_ref).epsilon(1e-12));
  CHECK(center_ref == doctest::Approx(173.4611).epsilon(1e-6));

  // symmetric exponents give identical species
  CHECK((u0.values - w0.values).abs().maxCoeff() == 0.0);

  // mass distributions reproduce the pair at t = 0 within quadrature error
  const ArrayXd U = mass_from_profile(u0, grid, 3);
  const double scale = eval_subsolution(1.0, 0.0, Species::U, Part::value, sp, e);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); i += 37) {
    const double exact =
        eval_subsolution(grid[i], 0.0, Species::U, Part::value, sp, e);
    worst = std::max(worst, std::abs(U[i] - exact));
  }
  CHECK(worst <= 1e-6 * scale);
}

TEST_CASE("theory-grade densities refuse linear generation once they overflow") {
  // the asymmetric chain pushes y0 past e^700, so the center density
  // n l y0^{1-alpha} has no linear representation
  const ModelParams params = make_model_params(3, 1.0, 1.4, 1.05, 1.0, 1.0, 1.0, 1.0);
  const Exponents e = select_exponents(1.4, 1.05, 3);
  const SubsolutionParams sp = derive_constants(params, e);
  ArrayXd s(3);
  s << 0.0, 0.5, 1.0;
  CHECK_THROWS_AS(generate_initial_profiles(sp, e, params, s), not_representable);
}

TEST_CASE("evaluation respects the s and t domains") {
  const SubsolutionParams sp = toy_shape_params(p0(), p0_exponents(), 1000.0, 1.0);
  const Exponents e = p0_exponents();
  CHECK_THROWS_AS(eval_subsolution(-0.1, 0.0, Species::U, Part::value, sp, e),
                  std::domain_error);
  CHECK_THROWS_AS(eval_subsolution(2.0, 0.0, Species::U, Part::value, sp, e),
                  std::domain_error);
  CHECK_THROWS_AS(eval_subsolution(0.5, sp.T, Species::U, Part::value, sp, e),
                  std::domain_error);
  CHECK_THROWS_AS(initial_mass_threshold(1.5, sp, e, p0()), std::domain_error);
}

TEST_CASE("derive_constants rejects broken exponent sets") {
  Exponents bad = p0_exponents();
  bad.delta = 0.95;  // alpha+delta-1 >= 0
  CHECK_THROWS_AS(derive_constants(p0(), bad), infeasible_error);
  Exponents bad2 = p0_exponents();
  bad2.alpha = 0.99;
  bad2.beta = 0.99;  // coupling inequalities fail
  CHECK_THROWS_AS(derive_constants(p0(), bad2), infeasible_error);
}

}  // TEST_SUITE
