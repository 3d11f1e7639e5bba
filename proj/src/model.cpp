#include "chemotax/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace chemotax {

double Diffusion::operator()(double x) const {
  if (custom) return custom(x);
  return k * std::pow((x * x + reg) / (1.0 + reg), 0.5 * (m - 1.0));
}

double Diffusion::log_at(double log_x) const {
  if (custom) {
    if (log_x > 700.0)
      throw not_representable(
          "custom diffusion cannot be evaluated at out-of-range argument");
    const double v = custom(std::exp(log_x));
    if (!(v > 0.0)) throw invalid_input("diffusion must be positive");
    return std::log(v);
  }
  // log(x^2 + reg) = logaddexp(2 log x, log reg), exact for this family
  const double a = 2.0 * log_x;
  const double b = std::log(reg);
  const double mx = std::max(a, b);
  const double l2 = mx + std::log1p(std::exp(std::min(a, b) - mx));
  return std::log(k) + 0.5 * (m - 1.0) * (l2 - std::log1p(reg));
}

Diffusion build_diffusion(double k, double m, double reg) {
  if (!(k > 0.0)) throw invalid_input("diffusion coefficient k must be > 0");
  if (!(m > 1.0)) throw invalid_input("diffusion exponent m must be > 1");
  if (!(reg > 0.0)) throw invalid_input("diffusion regularizer must be > 0");
  return Diffusion{k, m, reg, nullptr};
}

Diffusion wrap_diffusion(std::function<double(double)> f) {
  Diffusion d;
  d.custom = std::move(f);
  return d;
}

void validate_profile(const RadialProfile& p) {
  if (p.r.size() != p.values.size() || p.r.size() < 2)
    throw invalid_input("profile needs matching r/value arrays, >= 2 nodes");
  if (p.r[0] != 0.0) throw invalid_input("profile grid must start at r = 0");
  for (Eigen::Index i = 1; i < p.r.size(); ++i)
    if (!(p.r[i] > p.r[i - 1]))
      throw invalid_input("profile grid must be strictly increasing");
  if ((p.values < 0.0).any()) throw invalid_input("profile values must be >= 0");
}

void validate_mass_state(const MassState& m, double tol_rel) {
  if (m.s.size() < 2 || m.s.size() != m.U.size() || m.s.size() != m.W.size())
    throw invalid_input("mass state needs matching s/U/W arrays");
  for (Eigen::Index i = 1; i < m.s.size(); ++i)
    if (!(m.s[i] > m.s[i - 1]))
      throw invalid_input("mass state grid must be strictly increasing");
  const double scaleU = std::max(1.0, m.U.abs().maxCoeff());
  const double scaleW = std::max(1.0, m.W.abs().maxCoeff());
  for (Eigen::Index i = 1; i < m.s.size(); ++i) {
    if (m.U[i] < m.U[i - 1] - tol_rel * scaleU)
      throw invalid_input("mass values U must be nondecreasing");
    if (m.W[i] < m.W[i - 1] - tol_rel * scaleW)
      throw invalid_input("mass values W must be nondecreasing");
  }
}

double ModelParams::sn() const { return std::pow(R, n); }

ModelParams make_model_params(int n, double R, double m1, double m2, double k1,
                              double k2, double mu1, double mu2,
                              double diffusion_reg) {
  if (n < 3) throw invalid_input("dimension n must be >= 3");
  if (!(R > 0.0)) throw invalid_input("radius R must be > 0");
  if (!(m1 > 1.0) || !(m2 > 1.0)) throw invalid_input("exponents m1, m2 must be > 1");
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw invalid_input("coefficients k1, k2 must be > 0");
  if (!(mu1 > 0.0) || !(mu2 > 0.0))
    throw invalid_input("mean masses mu1, mu2 must be > 0");
  ModelParams p;
  p.n = n;
  p.R = R;
  p.m1 = m1;
  p.m2 = m2;
  p.k1 = k1;
  p.k2 = k2;
  p.D1 = build_diffusion(k1, m1, diffusion_reg);
  p.D2 = build_diffusion(k2, m2, diffusion_reg);
  p.mu1 = mu1;
  p.mu2 = mu2;
  p.mu_star_up = std::max(mu1, mu2);
  p.mu_star_lo = std::min(mu1, mu2);
  p.omega_n = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  if (!std::isfinite(p.sn())) throw invalid_input("R^n out of range");
  return p;
}

ModelParams with_masses(ModelParams p, double mu1, double mu2) {
  if (!(mu1 > 0.0) || !(mu2 > 0.0))
    throw invalid_input("mean masses mu1, mu2 must be > 0");
  p.mu1 = mu1;
  p.mu2 = mu2;
  p.mu_star_up = std::max(mu1, mu2);
  p.mu_star_lo = std::min(mu1, mu2);
  return p;
}

double trapezoid(const ArrayXd& x, const ArrayXd& f) {
  double acc = 0.0;
  for (Eigen::Index i = 1; i < x.size(); ++i)
    acc += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
  return acc;
}

ArrayXd cumtrapezoid(const ArrayXd& x, const ArrayXd& f) {
  ArrayXd out(x.size());
  out[0] = 0.0;
  for (Eigen::Index i = 1; i < x.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
  return out;
}

double interp_linear(const ArrayXd& x, const ArrayXd& f, double xq) {
  if (xq <= x[0]) return f[0];
  const Eigen::Index n = x.size();
  if (xq >= x[n - 1]) return f[n - 1];
  const double* begin = x.data();
  const double* it = std::upper_bound(begin, begin + n, xq);
  const Eigen::Index i = it - begin;  // x[i-1] <= xq < x[i]
  const double w = (xq - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - w) * f[i - 1] + w * f[i];
}

double ball_mean(const RadialProfile& p, int n) {
  const double R = p.r[p.r.size() - 1];
  ArrayXd s_end(1);
  s_end[0] = std::pow(R, n);
  const double U_end = mass_from_profile(p, s_end, n)[0];
  return n * U_end / s_end[0];
}

MuBounds mu_bounds(const RadialProfile& u0, const RadialProfile& w0,
                   const ModelParams& params) {
  validate_profile(u0);
  validate_profile(w0);
  const double mu1 = ball_mean(u0, params.n);
  const double mu2 = ball_mean(w0, params.n);
  if (!(mu1 > 0.0) || !(mu2 > 0.0))
    throw infeasible_error("zero total mass: the comparison amplitude would vanish");
  return {mu1, mu2, std::max(mu1, mu2), std::min(mu1, mu2)};
}

// Integration runs in the s variable: U(s) = (1/n) int_0^s p(sigma^{1/n}) dsigma.
// Trapezoid over the union of the target nodes and the profile-node images, so
// constant densities integrate exactly and the result is nondecreasing.
ArrayXd mass_from_profile(const RadialProfile& p, const ArrayXd& s_grid, int n) {
  validate_profile(p);
  if (s_grid.size() < 1) throw invalid_input("empty s grid");
  for (Eigen::Index i = 1; i < s_grid.size(); ++i)
    if (!(s_grid[i] > s_grid[i - 1]))
      throw invalid_input("s grid must be strictly increasing");
  const double s_max = s_grid[s_grid.size() - 1];
  const double sn_prof = std::pow(p.r[p.r.size() - 1], n);
  if (s_grid[0] < 0.0 || s_max > sn_prof * (1.0 + 1e-12))
    throw invalid_input("s grid outside the profile domain");

  std::vector<double> sigma(s_grid.data(), s_grid.data() + s_grid.size());
  if (s_grid[0] > 0.0) sigma.insert(sigma.begin(), 0.0);
  for (Eigen::Index j = 0; j < p.r.size(); ++j) {
    const double sj = std::pow(p.r[j], n);
    if (sj > 0.0 && sj < s_max) sigma.push_back(sj);
  }
  std::sort(sigma.begin(), sigma.end());
  sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());

  std::vector<double> cum(sigma.size(), 0.0);
  double prev_f = p.values[0];
  for (size_t j = 1; j < sigma.size(); ++j) {
    const double rq = std::pow(sigma[j], 1.0 / n);
    const double f = interp_linear(p.r, p.values, rq);
    cum[j] = cum[j - 1] + 0.5 * (f + prev_f) * (sigma[j] - sigma[j - 1]) / n;
    prev_f = f;
  }

  ArrayXd out(s_grid.size());
  size_t j = 0;
  for (Eigen::Index i = 0; i < s_grid.size(); ++i) {
    while (j + 1 < sigma.size() && sigma[j] < s_grid[i]) ++j;
    out[i] = cum[j];
  }
  return out;
}

namespace {

// second-order first derivative on three (possibly nonuniform) nodes,
// evaluated at x0
double deriv3(double x0, double x1, double x2, double f0, double f1, double f2) {
  const double g1 = x1 - x0, g2 = x2 - x0;
  return f0 * (-(g1 + g2) / (g1 * g2)) + f1 * (g2 / (g1 * (g2 - g1))) +
         f2 * (-g1 / (g2 * (g2 - g1)));
}

}  // namespace

DensityRecovery density_from_mass(const MassState& m, int n) {
  if (m.s.size() < 3) throw invalid_input("need at least 3 nodes to recover densities");
  if (m.s.size() != m.U.size() || m.s.size() != m.W.size())
    throw invalid_input("mass state needs matching s/U/W arrays");
  for (Eigen::Index i = 1; i < m.s.size(); ++i)
    if (!(m.s[i] > m.s[i - 1]))
      throw invalid_input("mass state grid must be strictly increasing");
  // mid-run states may wiggle; negative slopes are clipped and counted, so
  // monotonicity is not a precondition here
  const Eigen::Index N = m.s.size();
  DensityRecovery out;
  ArrayXd r(N), u(N), w(N);
  for (Eigen::Index i = 0; i < N; ++i) r[i] = std::pow(m.s[i], 1.0 / n);

  auto slope = [&](const ArrayXd& F, Eigen::Index i) {
    if (i == 0) return deriv3(m.s[0], m.s[1], m.s[2], F[0], F[1], F[2]);
    if (i == N - 1)
      return deriv3(m.s[N - 1], m.s[N - 2], m.s[N - 3], F[N - 1], F[N - 2], F[N - 3]);
    return deriv3(m.s[i], m.s[i - 1], m.s[i + 1], F[i], F[i - 1], F[i + 1]);
  };

  for (Eigen::Index i = 0; i < N; ++i) {
    u[i] = n * slope(m.U, i);
    w[i] = n * slope(m.W, i);
    if (u[i] < 0.0) { u[i] = 0.0; ++out.clipped; }
    if (w[i] < 0.0) { w[i] = 0.0; ++out.clipped; }
  }
  out.u = RadialProfile{r, u};
  out.w = RadialProfile{r, w};
  return out;
}

Potentials recover_potentials(const MassState& m, const ModelParams& params) {
  validate_mass_state(m);
  const Eigen::Index N = m.s.size();
  const int n = params.n;
  ArrayXd r(N);
  for (Eigen::Index i = 0; i < N; ++i) r[i] = std::pow(m.s[i], 1.0 / n);

  // radial flux balance: r^{n-1} v_r = mu2 r^n / n - W(r^n); v_r(0) = 0
  ArrayXd vr(N), zr(N);
  vr[0] = zr[0] = 0.0;
  for (Eigen::Index i = 1; i < N; ++i) {
    const double rp = r[i];
    vr[i] = params.mu2 * rp / n - std::pow(rp, 1.0 - n) * m.W[i];
    zr[i] = params.mu1 * rp / n - std::pow(rp, 1.0 - n) * m.U[i];
  }
  ArrayXd v = cumtrapezoid(r, vr);
  ArrayXd z = cumtrapezoid(r, zr);

  // shift to zero mean over the ball, with the weight integrated by the same
  // rule so the discrete mean vanishes exactly
  ArrayXd weight = r.pow(n - 1);
  const double wsum = trapezoid(r, weight);
  v -= trapezoid(r, (weight * v).eval()) / wsum;
  z -= trapezoid(r, (weight * z).eval()) / wsum;

  Potentials out;
  out.v = RadialProfile{r, v};
  out.z = RadialProfile{r, z};
  return out;
}

}  // namespace chemotax
