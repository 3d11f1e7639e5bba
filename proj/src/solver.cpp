#include "chemotax/solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace chemotax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(Trigger t) {
  switch (t) {
    case Trigger::None: return "none";
    case Trigger::Density: return "density";
    case Trigger::DtCollapse: return "dt-collapse";
    case Trigger::Horizon: return "horizon";
  }
  return "?";
}

ArrayXd graded_s_grid(double sn, const GridSpec& grid) {
  if (grid.N < 16) throw invalid_input("grid needs N >= 16");
  if (!(grid.gamma >= 1.0)) throw invalid_input("grading exponent must be >= 1");
  ArrayXd s(grid.N + 1);
  for (int i = 0; i <= grid.N; ++i)
    s[i] = sn * std::pow(double(i) / grid.N, grid.gamma);
  return s;
}

namespace {

struct Workspace {
  const ArrayXd& s;
  const ModelParams& p;
  double mu1, mu2;

  // first derivative at node i from three arbitrary nodes (j0, j1, j2)
  static double d1(const ArrayXd& s, const ArrayXd& F, Eigen::Index at,
                   Eigen::Index j1, Eigen::Index j2) {
    const double g1 = s[j1] - s[at], g2 = s[j2] - s[at];
    return F[at] * (-(g1 + g2) / (g1 * g2)) + F[j1] * (g2 / (g1 * (g2 - g1))) +
           F[j2] * (-g1 / (g2 * (g2 - g1)));
  }

  // RHS of both equations; also returns the stability bound for dt
  double rhs(const ArrayXd& U, const ArrayXd& W, ArrayXd& dU, ArrayXd& dW) const {
    const Eigen::Index N = s.size() - 1;
    const double n = p.n;
    double dt_bound = kInf;
    dU[0] = dW[0] = dU[N] = dW[N] = 0.0;

    for (Eigen::Index i = 1; i < N; ++i) {
      const double hm = s[i] - s[i - 1];
      const double hp = s[i + 1] - s[i];
      const double hmin = std::min(hm, hp);
      const double degen = n * n * std::pow(s[i], 2.0 - 2.0 / n);

      const double Us_c = d1(s, U, i, i - 1, i + 1);
      const double Ws_c = d1(s, W, i, i - 1, i + 1);
      const double Uss = 2.0 * (hm * U[i + 1] - (hm + hp) * U[i] + hp * U[i - 1]) /
                         (hm * hp * (hm + hp));
      const double Wss = 2.0 * (hm * W[i + 1] - (hm + hp) * W[i] + hp * W[i - 1]) /
                         (hm * hp * (hm + hp));

      const double D1v = p.D1(n * Us_c);
      const double D2v = p.D2(n * Ws_c);

      const double a = n * (W[i] - mu2 * s[i] / n);
      const double b = n * (U[i] - mu1 * s[i] / n);

      // upwind-biased second-order slope: one-sided into the flow when a
      // neighbour pair exists, central at the last interior node
      auto up_slope = [&](const ArrayXd& F, double vel) {
        if (vel >= 0.0)
          return i + 2 <= N ? d1(s, F, i, i + 1, i + 2) : d1(s, F, i, i - 1, i + 1);
        return i >= 2 ? d1(s, F, i, i - 1, i - 2) : d1(s, F, i, i - 1, i + 1);
      };

      dU[i] = degen * D1v * Uss + a * up_slope(U, a);
      dW[i] = degen * D2v * Wss + b * up_slope(W, b);

      const double diff_scale = std::max(degen * D1v, degen * D2v);
      if (diff_scale > 0.0)
        dt_bound = std::min(dt_bound, hmin * hmin / (2.0 * diff_scale));
      const double vel = std::max(std::abs(a), std::abs(b));
      if (vel > 0.0) dt_bound = std::min(dt_bound, hmin / vel);
    }
    return dt_bound;
  }
};

// pool-adjacent-violators in place; then clamp into the Dirichlet range
void isotonic_project(ArrayXd& F, double lo, double hi) {
  const Eigen::Index n = F.size();
  std::vector<double> val(n), wgt(n);
  std::vector<Eigen::Index> len(n);
  Eigen::Index m = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    val[m] = F[i];
    wgt[m] = 1.0;
    len[m] = 1;
    ++m;
    while (m > 1 && val[m - 2] > val[m - 1]) {
      const double w = wgt[m - 2] + wgt[m - 1];
      val[m - 2] = (wgt[m - 2] * val[m - 2] + wgt[m - 1] * val[m - 1]) / w;
      wgt[m - 2] = w;
      len[m - 2] += len[m - 1];
      --m;
    }
  }
  Eigen::Index k = 0;
  for (Eigen::Index blk = 0; blk < m; ++blk)
    for (Eigen::Index r = 0; r < len[blk]; ++r) F[k++] = val[blk];
  F = F.max(lo).min(hi);
}

double max_slope(const ArrayXd& s, const ArrayXd& F) {
  double mx = 0.0;
  for (Eigen::Index i = 0; i + 1 < s.size(); ++i)
    mx = std::max(mx, (F[i + 1] - F[i]) / (s[i + 1] - s[i]));
  return mx;
}

SeriesRow make_row(const MassState& st, const ModelParams& p, double dt) {
  SeriesRow row;
  row.t = st.t;
  row.dt = dt;
  row.sup_u = p.n * max_slope(st.s, st.U);
  row.sup_w = p.n * max_slope(st.s, st.W);
  // in the mass formulation the total is the boundary value itself
  const Eigen::Index N = st.s.size() - 1;
  row.mass_u = p.omega_n * st.U[N];
  row.mass_w = p.omega_n * st.W[N];
  return row;
}

}  // namespace

SimResult run(const SimConfig& cfg) {
  validate_mass_state(cfg.initial);
  const ArrayXd& s = cfg.initial.s;
  const Eigen::Index N = s.size() - 1;
  const double sn = s[N];
  if (N + 1 < 17) throw invalid_input("grid needs N >= 16");

  // means come from the data; the elliptic coupling conserves them
  const double mu1 = cfg.params.n * cfg.initial.U[N] / sn;
  const double mu2 = cfg.params.n * cfg.initial.W[N] / sn;
  const ModelParams params = with_masses(cfg.params, mu1, mu2);

  ArrayXd U = cfg.initial.U, W = cfg.initial.W;
  ArrayXd Uh(N + 1), Wh(N + 1), k1u(N + 1), k1w(N + 1), k2u(N + 1), k2w(N + 1);
  Workspace ws{s, params, mu1, mu2};

  const double sup0 =
      std::max(params.n * max_slope(s, U), params.n * max_slope(s, W));
  const double rho_max = cfg.blowup.rho_max > 0.0 ? cfg.blowup.rho_max : 1e6 * sup0;
  if (!(rho_max > sup0))
    throw invalid_input("density threshold must exceed the initial sup");
  const double dt_min =
      cfg.time.dt_min > 0.0 ? cfg.time.dt_min : 1e-12 * cfg.time.t_end;

  auto pin = [&](ArrayXd& Uv, ArrayXd& Wv) {
    Uv[0] = 0.0;
    Wv[0] = 0.0;
    Uv[N] = mu1 * sn / params.n;
    Wv[N] = mu2 * sn / params.n;
  };
  pin(U, W);

  SimResult res;
  res.blowup.T_ref = cfg.subsolution_T;
  double t = 0.0;
  double last_dt = 0.0;
  const double cadence = cfg.time.cadence > 0.0 ? cfg.time.cadence : cfg.time.t_end;
  double next_out = cadence;

  auto snap = [&](double dt) {
    MassState st{s, U, W, t};
    res.series.push_back(make_row(st, params, dt));
    res.snapshots.push_back(std::move(st));
  };
  snap(0.0);

  while (true) {
    if (t >= cfg.time.t_end * (1.0 - 1e-14)) {
      res.blowup.trigger = Trigger::Horizon;
      break;
    }
    if (res.steps >= cfg.max_steps) {
      res.blowup.trigger = Trigger::Horizon;
      break;
    }

    double bound = ws.rhs(U, W, k1u, k1w);
    double dt = cfg.time.cfl * bound;
    dt = std::min({dt, cfg.time.t_end - t, next_out - t});
    if (!(dt > 0.0) || !std::isfinite(dt)) dt = dt_min;
    if (dt < dt_min) {
      res.blowup.fired = true;
      res.blowup.trigger = Trigger::DtCollapse;
      res.blowup.t_detect = t;
      break;
    }

    // explicit midpoint, Dirichlet rows pinned after each stage
    Uh = U + 0.5 * dt * k1u;
    Wh = W + 0.5 * dt * k1w;
    pin(Uh, Wh);
    ws.rhs(Uh, Wh, k2u, k2w);
    U += dt * k2u;
    W += dt * k2w;
    pin(U, W);

    if (!U.allFinite() || !W.allFinite()) {
      res.status = RunStatus::AbortedNaN;
      // roll back to the last good state
      U = res.snapshots.empty() ? cfg.initial.U : res.snapshots.back().U;
      W = res.snapshots.empty() ? cfg.initial.W : res.snapshots.back().W;
      t = res.snapshots.empty() ? 0.0 : res.snapshots.back().t;
      break;
    }

    if (cfg.enforce_monotone) {
      isotonic_project(U, 0.0, U[N]);
      isotonic_project(W, 0.0, W[N]);
      pin(U, W);
    }

    t += dt;
    last_dt = dt;
    ++res.steps;

    const double slope_u = max_slope(s, U);
    const double slope_w = max_slope(s, W);
    const double sup = params.n * std::max(slope_u, slope_w);
    if (sup >= rho_max || std::max(slope_u, slope_w) >= cfg.blowup.slope_max) {
      res.blowup.fired = true;
      res.blowup.trigger = Trigger::Density;
      res.blowup.t_detect = t;
      break;
    }

    if (t >= next_out * (1.0 - 1e-14)) {
      snap(dt);
      while (next_out <= t * (1.0 + 1e-14)) next_out += cadence;
    }
  }

  if (res.snapshots.empty() || res.snapshots.back().t != t) snap(last_dt);
  res.last = MassState{s, U, W, t};
  return res;
}

OrderingReport ordering_experiment(const SimConfig& cfg, const MassState& lo,
                                   const MassState& hi, double tol_rel) {
  validate_mass_state(lo);
  validate_mass_state(hi);
  if (lo.s.size() != hi.s.size() || (lo.s != hi.s).any())
    throw invalid_input("ordered pair must share one grid");
  if ((lo.U > hi.U).any() || (lo.W > hi.W).any())
    throw invalid_input("initial data not componentwise ordered");

  SimConfig clo = cfg, chi = cfg;
  clo.initial = lo;
  chi.initial = hi;
  const SimResult rlo = run(clo);
  const SimResult rhi = run(chi);

  OrderingReport rep;
  const double scale =
      std::max({hi.U.maxCoeff(), hi.W.maxCoeff(), 1e-300});
  const size_t m = std::min(rlo.snapshots.size(), rhi.snapshots.size());
  for (size_t k = 0; k < m; ++k) {
    const MassState& a = rlo.snapshots[k];
    const MassState& b = rhi.snapshots[k];
    if (std::abs(a.t - b.t) > 1e-12 * std::max(1.0, a.t)) break;
    ++rep.compared;
    const double gap =
        std::min((b.U - a.U).minCoeff(), (b.W - a.W).minCoeff());
    if (gap < -tol_rel * scale) {
      if (rep.ok) rep.first_violation_t = a.t;
      rep.ok = false;
      rep.max_violation = std::max(rep.max_violation, -gap);
    }
  }
  return rep;
}

DominanceReport dominance_experiment(const SimConfig& cfg, const SubsolutionParams& sp,
                                     const Exponents& exp) {
  if (!sp.toy)
    throw not_representable(
        "dominance experiment needs toy-mode parameters (y0/theta overrides); "
        "theory-grade magnitudes cannot be placed on a simulation grid");
  auto [u0, w0] = generate_initial_profiles(sp, exp, cfg.params, cfg.initial.s);
  SimConfig c = cfg;
  c.initial.U = mass_from_profile(u0, cfg.initial.s, cfg.params.n);
  c.initial.W = mass_from_profile(w0, cfg.initial.s, cfg.params.n);
  c.initial.t = 0.0;
  c.subsolution_T = sp.T;
  const SimResult r = run(c);

  DominanceReport rep;
  rep.label = "empirical (toy parameters)";
  const double t_cap = 0.99 * sp.T;
  for (const MassState& st : r.snapshots) {
    if (st.t > t_cap) {
      rep.truncated_at_T = true;
      break;
    }
    for (Eigen::Index i = 0; i < st.s.size(); ++i) {
      const double ub =
          eval_subsolution(st.s[i], st.t, Species::U, Part::value, sp, exp);
      const double wb =
          eval_subsolution(st.s[i], st.t, Species::W, Part::value, sp, exp);
      const double gap = std::min(st.U[i] - ub, st.W[i] - wb);
      if (gap < rep.min_gap) {
        rep.min_gap = gap;
        rep.min_gap_t = st.t;
      }
      if (rep.compared == 0) rep.initial_gap = std::min(rep.initial_gap, gap);
    }
    ++rep.compared;
  }
  return rep;
}

}  // namespace chemotax
