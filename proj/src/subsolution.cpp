#include "chemotax/subsolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "chemotax/config.hpp"

namespace chemotax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(std::min(a, b) - mx));
}

}  // namespace

SubsolutionParams derive_constants(const ModelParams& params, const Exponents& exp,
                                   const ConstantOverrides& ov) {
  const int n = params.n;
  const double Rn = params.sn();
  const double a = exp.alpha, b = exp.beta, d = exp.delta;
  if (!(a > 0 && a < 1 && b > 0 && b < 1 && d > 0 && d < 1))
    throw invalid_input("exponents must lie in (0,1)");

  SubsolutionParams sp;
  sp.n = n;
  sp.Rn = Rn;
  sp.toy = ov.y0.has_value() || ov.theta.has_value();

  const double log_n = std::log(double(n));
  const double log_R = std::log(params.R);

  // amplitude l = mu_lo R^n / (n e^{1/e} (R^n + 1))
  sp.log_l = std::log(params.mu_star_lo) + n * log_R -
             (log_n + 1.0 / std::numbers::e + std::log(Rn + 1.0));
  sp.c1 = std::max(b / a, 1.0);
  sp.c2 = std::min(b / a, 1.0);

  // s0 must sit below eight explicit bounds: log s0 <= log C / eps for each
  // (C, eps) pair; the last four exponents are the strictly negative
  // combinations guaranteed by the exponent selection.
  const double e_pa = (params.m1 - 1.0) * (1.0 - a) + b - 1.0 + 2.0 / n;
  const double e_qb = (params.m2 - 1.0) * (1.0 - b) + a - 1.0 + 2.0 / n;
  const double e_bd = b + d - 1.0;
  const double e_ad = a + d - 1.0;
  if (!(e_bd < 0.0))
    throw infeasible_error("constant chain infeasible: beta+delta-1 >= 0");
  if (!(e_ad < 0.0))
    throw infeasible_error("constant chain infeasible: alpha+delta-1 >= 0");
  if (!(e_pa < 0.0))
    throw infeasible_error(
        "constant chain infeasible: (m1-1)(1-alpha)+beta-1+2/n >= 0");
  if (!(e_qb < 0.0))
    throw infeasible_error(
        "constant chain infeasible: (m2-1)(1-beta)+alpha-1+2/n >= 0");

  const double log4e2 = std::log(4.0) + 2.0;
  const double logC1 = (1.0 - a) * std::log(a) + log_n + sp.log_l - 1.0;
  const double logC2 = logC1 - std::log(2.0 * params.mu_star_up);
  const double logC3 = (1.0 - b) * std::log(b) + log_n + sp.log_l - 1.0;
  const double logC4 = logC3 - std::log(2.0 * params.mu_star_up);
  const double logC5 = log4e2 + b * std::log(b) + (d - 1.0) * std::log(a) -
                       b * std::log(sp.c2) - log_n - sp.log_l;
  const double logC6 = log4e2 + b * std::log(b) + std::log(params.k1) +
                       params.m1 * log_n + (params.m1 - 2.0) * sp.log_l +
                       ((params.m1 - 1.0) * (1.0 - a) - 2.0 + 2.0 / n) * std::log(a) -
                       b * std::log(sp.c2);
  const double logC7 = log4e2 + a * std::log(sp.c1) + a * std::log(a) +
                       (d - 1.0) * std::log(b) - log_n - sp.log_l;
  const double logC8 = log4e2 + a * std::log(sp.c1) + a * std::log(a) +
                       std::log(params.k2) + params.m2 * log_n +
                       (params.m2 - 2.0) * sp.log_l +
                       ((params.m2 - 1.0) * (1.0 - b) - 2.0 + 2.0 / n) * std::log(b);

  sp.log_s0_bounds = {logC1 / (1.0 - a), logC2 / (1.0 - a), logC3 / (1.0 - b),
                      logC4 / (1.0 - b), logC5 / e_bd,      logC6 / e_pa,
                      logC7 / e_ad,      logC8 / e_qb};
  static const char* kBoundNames[8] = {
      "inner slope floor (alpha)",     "advective floor (alpha)",
      "inner slope floor (beta)",      "advective floor (beta)",
      "transition balance (alpha)",    "transition diffusion (alpha)",
      "transition balance (beta)",     "transition diffusion (beta)"};
  double log_bound = std::log(Rn / 2.0);
  for (int i = 0; i < 8; ++i) {
    if (std::isnan(sp.log_s0_bounds[i]))
      throw infeasible_error(std::string("constant chain infeasible: bound '") +
                             kBoundNames[i] + "' is not finite");
    log_bound = std::min(log_bound, sp.log_s0_bounds[i]);
  }
  sp.log_s0 = std::log(0.99) + log_bound;
  if (std::isnan(sp.log_s0) || sp.log_s0 == kInf)
    throw infeasible_error("constant chain infeasible: no admissible s0");

  // diffusion maxima over the outer-region argument intervals; the default
  // family is monotone, so endpoint evaluation suffices
  auto diff_max = [&](const Diffusion& D, double ex) {
    const double log_hi = log_n + sp.log_l + (ex - 1.0) * sp.log_s0;
    const double log_lo =
        log_n + sp.log_l - 1.0 + (1.0 - ex) * std::log(ex) + n * (ex - 1.0) * log_R;
    if (D.parametric()) return std::max(D.log_at(log_lo), D.log_at(log_hi));
    if (log_hi > 700.0 || log_lo < -700.0)
      throw not_representable(
          "custom diffusion maxima need linear-range arguments; use the "
          "parametric family or toy overrides");
    const double xlo = std::exp(log_lo), xhi = std::exp(log_hi);
    double best = -kInf;
    for (int i = 0; i <= 1023; ++i) {
      const double x = xlo + (xhi - xlo) * (double(i) / 1023.0);
      best = std::max(best, std::log(D(x)));
    }
    return best;
  };
  sp.log_D1max = diff_max(params.D1, a);
  sp.log_D2max = diff_max(params.D2, b);

  // decay-rate threshold: max of the two outer-region bounds
  const double log_mu_up = std::log(params.mu_star_up);
  auto theta_bound = [&](double ex, double log_Dmax) {
    const double t1 = -d * sp.log_s0;
    const double t2 = 2.0 * log_n + (2.0 * n - 2.0) * log_R + log_Dmax -
                      2.0 * sp.log_s0 - std::log(ex);
    const double t3 = log_mu_up + n * log_R - sp.log_s0;
    return 1.0 + logaddexp(t1, logaddexp(t2, t3));
  };
  sp.log_theta0 = std::max(theta_bound(a, sp.log_D1max), theta_bound(b, sp.log_D2max));

  if (ov.theta && *ov.theta < 0.0) throw invalid_input("theta override must be >= 0");
  sp.log_theta = ov.theta ? (*ov.theta > 0.0 ? std::log(*ov.theta) : -kInf)
                          : std::log(1.01) + sp.log_theta0;

  // trajectory floor
  const double q = std::log(2.0 * params.mu_star_up) + 1.0 - log_n - sp.log_l;
  sp.log_y_star = std::max({0.0, q / (1.0 - b), q / (1.0 - a), -double(n) * log_R});

  sp.log_Lambda = std::min({0.0, log_n + sp.log_l - std::log(2.0) - 2.0 - std::log1p(-a),
                            log_n + sp.log_l - std::log(2.0) - 2.0 - std::log1p(-b)});

  if (ov.y0) {
    if (!(*ov.y0 > 0.0)) throw invalid_input("y0 override must be > 0");
    sp.log_y0 = std::log(*ov.y0);
  } else {
    sp.log_y0 = std::log(1.01) +
                std::max({(sp.log_theta - std::log(d) - sp.log_Lambda) / d,
                          sp.log_y_star, -sp.log_s0});
  }
  sp.log_T = -d * sp.log_y0 - std::log(d) - sp.log_Lambda;

  sp.l = to_double(slog_pos(sp.log_l));
  sp.s0 = to_double(slog_pos(sp.log_s0));
  sp.D1max = to_double(slog_pos(sp.log_D1max));
  sp.D2max = to_double(slog_pos(sp.log_D2max));
  sp.theta0 = to_double(slog_pos(sp.log_theta0));
  sp.theta = sp.log_theta == -kInf ? 0.0 : to_double(slog_pos(sp.log_theta));
  sp.Lambda = to_double(slog_pos(sp.log_Lambda));
  sp.y_star = to_double(slog_pos(sp.log_y_star));
  sp.y0 = to_double(slog_pos(sp.log_y0));
  sp.T = to_double(slog_pos(sp.log_T));
  // overrides are user-facing values; keep them exact in linear space
  if (ov.y0) sp.y0 = *ov.y0;
  if (ov.theta) sp.theta = *ov.theta;
  return sp;
}

SubsolutionParams toy_shape_params(const ModelParams& params, const Exponents& exp,
                                   double y0, double theta) {
  if (!(y0 > 0.0)) throw invalid_input("y0 must be > 0");
  if (theta < 0.0) throw invalid_input("theta must be >= 0");
  const int n = params.n;
  const double Rn = params.sn();
  const double a = exp.alpha, b = exp.beta, d = exp.delta;

  SubsolutionParams sp;
  sp.n = n;
  sp.Rn = Rn;
  sp.toy = true;
  sp.chain_valid = false;

  sp.log_l = std::log(params.mu_star_lo) + n * std::log(params.R) -
             (std::log(double(n)) + 1.0 / std::numbers::e + std::log(Rn + 1.0));
  sp.c1 = std::max(b / a, 1.0);
  sp.c2 = std::min(b / a, 1.0);
  sp.log_Lambda =
      std::min({0.0, std::log(double(n)) + sp.log_l - std::log(2.0) - 2.0 - std::log1p(-a),
                std::log(double(n)) + sp.log_l - std::log(2.0) - 2.0 - std::log1p(-b)});
  sp.log_y0 = std::log(y0);
  sp.log_theta = theta > 0.0 ? std::log(theta) : -kInf;
  sp.log_T = -d * sp.log_y0 - std::log(d) - sp.log_Lambda;

  sp.l = std::exp(sp.log_l);
  sp.Lambda = std::exp(sp.log_Lambda);
  sp.y0 = y0;
  sp.theta = theta;
  sp.T = std::exp(sp.log_T);
  sp.s0 = sp.D1max = sp.D2max = sp.theta0 = sp.y_star = kNaN;
  sp.log_s0 = sp.log_D1max = sp.log_D2max = sp.log_theta0 = sp.log_y_star = kNaN;
  sp.log_s0_bounds.fill(kNaN);
  return sp;
}

Trajectory make_trajectory(const SubsolutionParams& sp, const Exponents& exp) {
  Trajectory tr;
  tr.y0 = sp.y0;
  tr.delta = exp.delta;
  tr.Lambda = sp.Lambda;
  tr.T = sp.T;
  tr.log_y0 = sp.log_y0;
  tr.log_T = sp.log_T;
  return tr;
}

double log_y_at_log_t(const Trajectory& tr, double log_t) {
  if (!(log_t < tr.log_T))
    throw std::domain_error("trajectory evaluated at or past the blow-up time");
  // y(t) = y0 (1 - t/T)^{-1/delta}
  const double frac = std::exp(log_t - tr.log_T);
  return tr.log_y0 - std::log1p(-frac) / tr.delta;
}

YValue y_of_t(const Trajectory& tr, double t) {
  if (t < 0.0) throw std::domain_error("negative time");
  const double log_t = t == 0.0 ? -kInf : std::log(t);
  const double ly = log_y_at_log_t(tr, log_t);
  return {to_double(slog_pos(ly)), ly};
}

namespace {

// Hatted (undecayed) pair and derivatives at (log_s, log_y), as signed logs.
SignedLog hat_eval(double log_s, double log_y, double a, double delta,
                   double log_l, double log_Lambda, Part part) {
  const bool inner = log_s <= -log_y;
  if (inner) {
    switch (part) {
      case Part::value: return slog_pos(log_l + (1.0 - a) * log_y + log_s);
      case Part::ds: return slog_pos(log_l + (1.0 - a) * log_y);
      case Part::dss: return SignedLog::zero();
      case Part::dt:
        // l (1-a) y^{-a} y' s with y' = Lambda y^{1+delta}
        return slog_pos(log_l + log_Lambda + std::log1p(-a) +
                        (1.0 + delta - a) * log_y + log_s);
    }
  }
  // xi = s - (1-a)/y, strictly positive past the kink
  const double u = std::exp(-log_y - log_s);  // 1/(y s) <= 1 here
  const double log_xi = log_s + std::log1p(-(1.0 - a) * u);
  const double log_a = std::log(a);
  switch (part) {
    case Part::value: return slog_pos(log_l - a * log_a + a * log_xi);
    case Part::ds: return slog_pos(log_l + (1.0 - a) * log_a + (a - 1.0) * log_xi);
    case Part::dss:
      return slog_signed(-1, log_l + (1.0 - a) * log_a + std::log1p(-a) +
                                 (a - 2.0) * log_xi);
    case Part::dt:
      // l a^{1-a} (1-a) xi^{a-1} y'/y^2
      return slog_pos(log_l + (1.0 - a) * log_a + std::log1p(-a) +
                      (a - 1.0) * log_xi + log_Lambda + (delta - 1.0) * log_y);
  }
  return SignedLog::zero();
}

}  // namespace

SignedLog eval_subsolution_log(double log_s, double log_t, Species which, Part part,
                               const SubsolutionParams& sp, const Exponents& exp) {
  const double a = which == Species::U ? exp.alpha : exp.beta;
  const Trajectory tr = make_trajectory(sp, exp);
  const double log_y = log_y_at_log_t(tr, log_t);

  // decaying prefactor e^{-theta t}
  const double log_tt = sp.log_theta + log_t;
  const double theta_t = log_tt > 709.0 ? kInf : std::exp(log_tt);
  const SignedLog decay = slog_pos(-theta_t);

  const SignedLog hat =
      hat_eval(log_s, log_y, a, exp.delta, sp.log_l, sp.log_Lambda, part);
  if (part != Part::dt) return decay * hat;

  // d/dt of the decayed pair picks up the -theta term
  const SignedLog hat_val =
      hat_eval(log_s, log_y, a, exp.delta, sp.log_l, sp.log_Lambda, Part::value);
  return decay * (hat - slog_pos(sp.log_theta) * hat_val);
}

double eval_subsolution(double s, double t, Species which, Part part,
                        const SubsolutionParams& sp, const Exponents& exp) {
  if (s < 0.0 || s > sp.Rn * (1.0 + 1e-12))
    throw std::domain_error("s outside [0, R^n]");
  if (t < 0.0) throw std::domain_error("negative time");
  const double log_s = s == 0.0 ? -kInf : std::log(s);
  const double log_t = t == 0.0 ? -kInf : std::log(t);
  return to_double(eval_subsolution_log(log_s, log_t, which, part, sp, exp));
}

std::pair<double, double> initial_mass_threshold(double r, const SubsolutionParams& sp,
                                                 const Exponents& exp,
                                                 const ModelParams& params) {
  if (r < 0.0 || r > params.R * (1.0 + 1e-12))
    throw std::domain_error("r outside [0, R]");
  const double s = std::pow(r, params.n);
  const double M1 =
      params.omega_n * eval_subsolution(s, 0.0, Species::U, Part::value, sp, exp);
  const double M2 =
      params.omega_n * eval_subsolution(s, 0.0, Species::W, Part::value, sp, exp);
  return {M1, M2};
}

std::pair<RadialProfile, RadialProfile> generate_initial_profiles(
    const SubsolutionParams& sp, const Exponents& exp, const ModelParams& params,
    const ArrayXd& s_grid) {
  const double log_center =
      std::log(double(params.n)) + sp.log_l + (1.0 - std::min(exp.alpha, exp.beta)) * sp.log_y0;
  if (log_center > 700.0)
    throw not_representable(
        "theory-grade center density overflows; rerun with toy-mode overrides "
        "(y0/theta)");
  const Eigen::Index N = s_grid.size();
  ArrayXd r(N), u(N), w(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double s = s_grid[i];
    r[i] = std::pow(s, 1.0 / params.n);
    u[i] = params.n * eval_subsolution(s, 0.0, Species::U, Part::ds, sp, exp);
    w[i] = params.n * eval_subsolution(s, 0.0, Species::W, Part::ds, sp, exp);
  }
  return {RadialProfile{r, u}, RadialProfile{r, w}};
}

ArrayXd subsolution_adapted_s_grid(const SubsolutionParams& sp, const Exponents& exp,
                                   int linear_nodes, int kink_nodes) {
  if (linear_nodes < 2 || kink_nodes < 2) throw invalid_input("need >= 2 nodes per zone");
  const double kink = 1.0 / sp.y0;
  if (!(kink > 0.0) || !std::isfinite(kink))
    throw not_representable("adapted grid needs a linear-range kink; use toy overrides");
  std::vector<double> nodes;
  nodes.reserve(size_t(linear_nodes) + 2 * size_t(kink_nodes) + 2);
  for (int i = 0; i < linear_nodes; ++i)
    nodes.push_back(kink * double(i) / double(linear_nodes));
  // geometric in the shifted variable for each species' own singular point
  for (double a : {exp.alpha, exp.beta}) {
    const double sing = (1.0 - a) / sp.y0;
    const double xi0 = kink - sing;          // = a / y0
    const double xi1 = sp.Rn - sing;
    const double ratio = std::log(xi1 / xi0);
    for (int i = 0; i <= kink_nodes; ++i)
      nodes.push_back(sing + xi0 * std::exp(ratio * double(i) / double(kink_nodes)));
  }
  nodes.push_back(sp.Rn);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  while (!nodes.empty() && nodes.back() > sp.Rn) nodes.pop_back();
  if (nodes.back() != sp.Rn) nodes.push_back(sp.Rn);
  return Eigen::Map<const ArrayXd>(nodes.data(), Eigen::Index(nodes.size()));
}

std::string params_report(const SubsolutionParams& sp, const Exponents& exp,
                          const ModelParams& params) {
  std::ostringstream os;
  os << "[params]\n";
  os << "grade = " << (sp.toy ? "toy" : "theory") << "\n";
  os << "chain = " << (sp.chain_valid ? "full" : "shape-only") << "\n";
  os << "n = " << params.n << "\n";
  os << "R = " << g17(params.R) << "\n";
  os << "m1 = " << g17(params.m1) << "\n";
  os << "m2 = " << g17(params.m2) << "\n";
  os << "mu1 = " << g17(params.mu1) << "\n";
  os << "mu2 = " << g17(params.mu2) << "\n";
  os << "alpha = " << g17(exp.alpha) << "\n";
  os << "beta = " << g17(exp.beta) << "\n";
  os << "delta = " << g17(exp.delta) << "\n";
  os << "provenance = " << to_string(exp.provenance) << "\n";
  if (exp.star_pair)
    os << "star_pair = " << g17(exp.star_pair->first) << ","
       << g17(exp.star_pair->second) << "\n";
  os << "\n[constants]\n";
  auto field = [&](const char* name, double lin, double lg) {
    os << name << " = " << g17(lin) << "\n";
    os << "log_" << name << " = " << g17(lg) << "\n";
  };
  field("l", sp.l, sp.log_l);
  os << "c1 = " << g17(sp.c1) << "\n";
  os << "c2 = " << g17(sp.c2) << "\n";
  field("s0", sp.s0, sp.log_s0);
  for (int i = 0; i < 8; ++i)
    os << "log_s0_bound_" << (i + 1) << " = " << g17(sp.log_s0_bounds[i]) << "\n";
  field("D1max", sp.D1max, sp.log_D1max);
  field("D2max", sp.D2max, sp.log_D2max);
  field("theta0", sp.theta0, sp.log_theta0);
  field("theta", sp.theta, sp.log_theta);
  field("Lambda", sp.Lambda, sp.log_Lambda);
  field("y_star", sp.y_star, sp.log_y_star);
  field("y0", sp.y0, sp.log_y0);
  field("T", sp.T, sp.log_T);
  os << "representable_linear = "
     << (std::isfinite(sp.theta0) && std::isfinite(sp.y0) && sp.T > 0.0 ? "true"
                                                                        : "false")
     << "\n";
  return os.str();
}

}  // namespace chemotax
