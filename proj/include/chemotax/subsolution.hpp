#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>

#include "chemotax/exponents.hpp"
#include "chemotax/model.hpp"
#include "chemotax/signed_log.hpp"

namespace chemotax {

struct ConstantOverrides {
  std::optional<double> y0;
  std::optional<double> theta;
};

// The derived-constant chain behind the comparison pair. Every field has a
// natural-log companion; linear fields saturate to +-infinity outside double
// range, so downstream code must prefer the logs. theta0 and the s0 bounds
// for realistic models are of order exp(1e2)..exp(1e3), and y0 can exceed
// exp(3e3): nothing here survives linear arithmetic.
struct SubsolutionParams {
  int n = 3;
  double Rn = 1.0;  // R^n

  double l = 0, c1 = 0, c2 = 0;
  double s0 = 0, D1max = 0, D2max = 0;
  double theta0 = 0, theta = 0;
  double Lambda = 0, y_star = 0, y0 = 0, T = 0;

  double log_l = 0, log_s0 = 0, log_theta0 = 0, log_theta = 0;
  double log_y_star = 0, log_y0 = 0, log_T = 0;
  double log_D1max = 0, log_D2max = 0, log_Lambda = 0;
  std::array<double, 8> log_s0_bounds{};  // upper bounds, transition constraints

  bool toy = false;          // y0/theta overridden; decay/threshold bounds ignored
  bool chain_valid = true;   // false when built shape-only (no s0/theta0 chain)
};

// Full chain. Overrides for y0/theta switch the result to toy grade while the
// rest of the chain is still derived (and must be derivable).
SubsolutionParams derive_constants(const ModelParams& params, const Exponents& exp,
                                   const ConstantOverrides& ov = {});

// Shape-only parameters: l, c1/c2, Lambda, y0, theta, T. No transition/outer
// constants, so the result cannot be verified, only evaluated. This is what
// the standardized concentrated initial data are built from, independently of
// whether the model's exponents admit the full chain.
SubsolutionParams toy_shape_params(const ModelParams& params, const Exponents& exp,
                                   double y0, double theta);

// Solution of y' = Lambda y^{1+delta}, y(0) = y0; blows up at T.
struct Trajectory {
  double y0 = 0, delta = 0, Lambda = 0, T = 0;
  double log_y0 = 0, log_T = 0;
};
Trajectory make_trajectory(const SubsolutionParams& sp, const Exponents& exp);

double log_y_at_log_t(const Trajectory& tr, double log_t);

struct YValue {
  double y, log_y;
};
YValue y_of_t(const Trajectory& tr, double t);  // throws std::domain_error at t >= T

enum class Species { U, W };
enum class Part { value, dt, ds, dss };

// Comparison-pair evaluation. Part::dss is undefined exactly at the kink
// s = 1/y(t) (weak second derivative); callers must not request it there.
SignedLog eval_subsolution_log(double log_s, double log_t, Species which, Part part,
                               const SubsolutionParams& sp, const Exponents& exp);
double eval_subsolution(double s, double t, Species which, Part part,
                        const SubsolutionParams& sp, const Exponents& exp);

// Mass thresholds (M1, M2) at radius r: omega_n times the pair at (r^n, 0).
std::pair<double, double> initial_mass_threshold(double r, const SubsolutionParams& sp,
                                                 const Exponents& exp,
                                                 const ModelParams& params);

// Radial densities whose mass distributions equal the comparison pair at
// t = 0. Throws not_representable when the center density overflows
// (theory-grade constants); toy overrides keep it finite.
std::pair<RadialProfile, RadialProfile> generate_initial_profiles(
    const SubsolutionParams& sp, const Exponents& exp, const ModelParams& params,
    const ArrayXd& s_grid);

// s-grid refined around the t = 0 kink of both species; for quadrature
// against the closed form.
ArrayXd subsolution_adapted_s_grid(const SubsolutionParams& sp, const Exponents& exp,
                                   int linear_nodes, int kink_nodes);

// Structured text report: linear and log fields, feasibility, grade label.
std::string params_report(const SubsolutionParams& sp, const Exponents& exp,
                          const ModelParams& params);

}  // namespace chemotax
