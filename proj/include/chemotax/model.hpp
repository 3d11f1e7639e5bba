#pragma once

#include <Eigen/Core>
#include <functional>

#include "chemotax/errors.hpp"

namespace chemotax {

using Eigen::ArrayXd;

// Nonlinear diffusion D(x) = k ((x^2 + reg)/(1 + reg))^{(m-1)/2}.
//
// Smooth and strictly positive on the whole line, D(1) = k, and
// D(x) <= k x^{m-1} for x >= 1. The verifier needs D at arguments whose
// logs run to hundreds, which is why the parametric form carries a
// dedicated log-argument evaluation. A custom positive function can be
// attached instead; it is restricted to linear-range arguments.
struct Diffusion {
  double k = 1.0;
  double m = 2.0;
  double reg = 1.0;
  std::function<double(double)> custom;  // optional override

  bool parametric() const { return !custom; }
  double operator()(double x) const;
  double log_at(double log_x) const;  // log D(exp(log_x)), overflow-safe
};

Diffusion build_diffusion(double k, double m, double reg = 1.0);
Diffusion wrap_diffusion(std::function<double(double)> f);

// Radially symmetric density samples on [0, R].
struct RadialProfile {
  ArrayXd r;       // strictly increasing, r[0] = 0
  ArrayXd values;  // nonnegative
};
void validate_profile(const RadialProfile& p);

// Discrete snapshot of the mass-distribution pair on an s-grid in [0, R^n].
struct MassState {
  ArrayXd s;
  ArrayXd U, W;
  double t = 0.0;
};
void validate_mass_state(const MassState& m, double tol_rel = 1e-9);

struct ModelParams {
  int n = 3;       // spatial dimension, >= 3
  double R = 1.0;  // ball radius
  double m1 = 0, m2 = 0;
  double k1 = 0, k2 = 0;
  Diffusion D1, D2;
  double mu1 = 0, mu2 = 0;  // mean initial masses over the ball
  double mu_star_up = 0;    // max(mu1, mu2)
  double mu_star_lo = 0;    // min(mu1, mu2)
  double omega_n = 0;       // surface area of the unit sphere

  double sn() const;  // R^n, the s-domain length
};

ModelParams make_model_params(int n, double R, double m1, double m2, double k1,
                              double k2, double mu1, double mu2,
                              double diffusion_reg = 1.0);

// Replace the mean masses (and derived max/min) on a copy.
ModelParams with_masses(ModelParams p, double mu1, double mu2);

struct MuBounds {
  double mu1, mu2, up, lo;
};
MuBounds mu_bounds(const RadialProfile& u0, const RadialProfile& w0,
                   const ModelParams& params);

// U(s) = int_0^{s^{1/n}} r^{n-1} p(r) dr via composite trapezoid in the
// s variable (exact for constant densities, second order otherwise).
ArrayXd mass_from_profile(const RadialProfile& p, const ArrayXd& s_grid, int n);

struct DensityRecovery {
  RadialProfile u, w;
  long clipped = 0;  // negative values zeroed by differentiation noise
};
DensityRecovery density_from_mass(const MassState& m, int n);

// Chemical potentials from the instantaneous masses; shifted to zero mean
// over the ball.
struct Potentials {
  RadialProfile v, z;
};
Potentials recover_potentials(const MassState& m, const ModelParams& params);

// --- quadrature helpers ---------------------------------------------------

double trapezoid(const ArrayXd& x, const ArrayXd& f);
ArrayXd cumtrapezoid(const ArrayXd& x, const ArrayXd& f);
double interp_linear(const ArrayXd& x, const ArrayXd& f, double xq);

// (n / R^n) int_0^R r^{n-1} p dr
double ball_mean(const RadialProfile& p, int n);

}  // namespace chemotax
