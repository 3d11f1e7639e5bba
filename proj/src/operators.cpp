#include "chemotax/operators.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "chemotax/config.hpp"

namespace chemotax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Vacuous: return "vacuous";
  }
  return "?";
}

static double comparison_residual(const OperatorInput& in) {
  if (!(in.s > 0.0)) throw std::domain_error("operator needs s > 0");
  if (in.D == nullptr) throw invalid_input("operator needs a diffusion");
  const double n = in.n;
  const double degen = n * n * std::pow(in.s, 2.0 - 2.0 / n);
  return in.phi_t - degen * in.phi_ss * (*in.D)(n * in.phi_s) -
         n * in.phi_s * (in.psi - in.mu_star_up * in.s / n);
}

double eval_P(const OperatorInput& in) { return comparison_residual(in); }
double eval_Q(const OperatorInput& in) { return comparison_residual(in); }

long VerifierReport::total_violations() const {
  return inner.violations_P + inner.violations_Q + transition.violations_P +
         transition.violations_Q + outer.violations_P + outer.violations_Q +
         inner.nonfinite + transition.nonfinite + outer.nonfinite;
}

namespace {

struct PointResidual {
  SignedLog res;
  double max_term;  // log of the largest term magnitude
};

// Residual of one operator at (log_s, log_t), split into the five signed
// pieces of the expanded formula so the relative slack has a natural base.
PointResidual operator_residual(double log_s, double log_t, Species primary,
                                const SubsolutionParams& sp, const Exponents& exp,
                                const ModelParams& params) {
  const Species secondary = primary == Species::U ? Species::W : Species::U;
  const Diffusion& D = primary == Species::U ? params.D1 : params.D2;
  const double n = params.n;
  const double log_n = std::log(n);

  const SignedLog phi_t =
      eval_subsolution_log(log_s, log_t, primary, Part::dt, sp, exp);
  const SignedLog phi_s =
      eval_subsolution_log(log_s, log_t, primary, Part::ds, sp, exp);
  const SignedLog phi_ss =
      eval_subsolution_log(log_s, log_t, primary, Part::dss, sp, exp);
  const SignedLog psi =
      eval_subsolution_log(log_s, log_t, secondary, Part::value, sp, exp);

  // - n^2 s^{2-2/n} phi_ss D(n phi_s)
  SignedLog diff = SignedLog::zero();
  if (!phi_ss.is_zero()) {
    const double logD = D.log_at(log_n + phi_s.lg);
    diff = slog_signed(-phi_ss.sgn,
                       2.0 * log_n + (2.0 - 2.0 / n) * log_s + phi_ss.lg + logD);
  }
  // - n phi_s psi  and  + phi_s mu_up s
  const SignedLog adv1 = slog_signed(-phi_s.sgn * psi.sgn, log_n + phi_s.lg + psi.lg);
  const SignedLog adv2 =
      slog_signed(phi_s.sgn, phi_s.lg + std::log(params.mu_star_up) + log_s);

  const std::array<SignedLog, 4> terms = {phi_t, diff, adv1, adv2};
  PointResidual out;
  out.res = sum(terms);
  out.max_term = max_magnitude(terms);
  return out;
}

void record(RegionReport& rr, const PointResidual& p, bool is_P, double rel_slack) {
  SignedLog& mx = is_P ? rr.max_P : rr.max_Q;
  long& viol = is_P ? rr.violations_P : rr.violations_Q;
  double& mrel = is_P ? rr.max_rel_P : rr.max_rel_Q;
  if (std::isnan(p.res.lg) || std::isnan(p.max_term)) {
    ++rr.nonfinite;
    return;
  }
  if (sl_less(mx, p.res)) mx = p.res;
  if (p.res.sgn > 0) {
    mrel = std::max(mrel, p.res.lg - p.max_term);
    if (p.res.lg > p.max_term + std::log(rel_slack)) ++viol;
  }
}

}  // namespace

VerifierReport verify_subsolution(const SubsolutionParams& sp, const Exponents& exp,
                                  const ModelParams& params, const SamplingSpec& spec) {
  if (!sp.chain_valid)
    throw invalid_input("verification needs the full constant chain (s0, theta0)");
  VerifierReport rep;
  rep.toy = sp.toy;
  // extrema start at -infinity as real numbers, i.e. sign -1 with +inf log
  rep.inner.max_P = rep.inner.max_Q = SignedLog{kInf, -1};
  rep.transition = rep.outer = rep.inner;
  if (spec.samples_per_region <= 0 || spec.time_samples <= 0) {
    rep.verdict = Verdict::Vacuous;
    return rep;
  }

  const int nt = spec.time_samples;
  const int ns = (spec.samples_per_region + nt - 1) / nt;
  const double log_Rn = std::log(sp.Rn);
  // times run logarithmically below the analytic window cap min(T, 1/theta)
  const double log_t_hi = std::min(sp.log_T, -sp.log_theta) + std::log(0.999);
  const double log_t_lo = log_t_hi - spec.time_decades * std::log(10.0);
  const Trajectory tr = make_trajectory(sp, exp);
  const double gap = 1e-6;  // log-units off the region edges; kink excluded

  for (int j = 0; j < nt; ++j) {
    const double log_t =
        nt == 1 ? log_t_hi : log_t_lo + (log_t_hi - log_t_lo) * double(j) / (nt - 1);
    const double log_kink = -log_y_at_log_t(tr, log_t);

    struct Region {
      RegionReport* rr;
      double lo, hi;
    };
    const std::array<Region, 3> regions = {
        Region{&rep.inner, log_kink - spec.inner_decades * std::log(10.0),
               log_kink - gap},
        Region{&rep.transition, log_kink + gap, sp.log_s0},
        Region{&rep.outer, sp.log_s0 + gap, log_Rn - gap}};

    for (const auto& reg : regions) {
      if (!(reg.lo < reg.hi)) continue;  // e.g. toy kink past s0
      for (int i = 0; i < ns; ++i) {
        const double log_s =
            ns == 1 ? reg.hi : reg.lo + (reg.hi - reg.lo) * double(i) / (ns - 1);
        ++reg.rr->samples;
        record(*reg.rr, operator_residual(log_s, log_t, Species::U, sp, exp, params),
               true, spec.rel_slack);
        record(*reg.rr, operator_residual(log_s, log_t, Species::W, sp, exp, params),
               false, spec.rel_slack);
      }
    }
  }

  const long total = rep.inner.samples + rep.transition.samples + rep.outer.samples;
  if (total == 0)
    rep.verdict = Verdict::Vacuous;
  else
    rep.verdict = rep.total_violations() == 0 ? Verdict::Pass : Verdict::Fail;
  return rep;
}

std::string VerifierReport::to_text() const {
  std::ostringstream os;
  os << "[verifier]\n";
  os << "grade = " << (toy ? "toy" : "theory") << "\n";
  os << "verdict = " << to_string(verdict) << "\n";
  auto region = [&](const char* name, const RegionReport& r) {
    os << "\n[region " << name << "]\n";
    os << "samples = " << r.samples << "\n";
    os << "violations_P = " << r.violations_P << "\n";
    os << "violations_Q = " << r.violations_Q << "\n";
    os << "nonfinite = " << r.nonfinite << "\n";
    os << "max_P_sign = " << r.max_P.sgn << "\n";
    os << "max_P_log = " << g17(r.max_P.lg) << "\n";
    os << "max_Q_sign = " << r.max_Q.sgn << "\n";
    os << "max_Q_log = " << g17(r.max_Q.lg) << "\n";
    os << "max_rel_P_log = " << g17(r.max_rel_P) << "\n";
    os << "max_rel_Q_log = " << g17(r.max_rel_Q) << "\n";
  };
  region("inner", inner);
  region("transition", transition);
  region("outer", outer);
  return os.str();
}

MassResidualReport check_mass_system_residual(const std::vector<MassState>& history,
                                              const ModelParams& params, double tol) {
  if (history.size() < 3)
    throw invalid_input("residual check needs at least 3 consecutive snapshots");
  const Eigen::Index N = history.front().s.size();
  for (const auto& st : history)
    if (st.s.size() != N || (st.s != history.front().s).any())
      throw invalid_input("snapshots on mismatched grids");

  MassResidualReport rep;
  const ArrayXd& s = history.front().s;

  auto d1 = [](double xm, double x0, double xp, double fm, double f0, double fp) {
    const double hm = x0 - xm, hp = xp - x0;
    return (-hp / (hm * (hm + hp))) * fm + ((hp - hm) / (hm * hp)) * f0 +
           (hm / (hp * (hm + hp))) * fp;
  };
  auto d2 = [](double xm, double x0, double xp, double fm, double f0, double fp) {
    const double hm = x0 - xm, hp = xp - x0;
    return 2.0 * (hm * fp - (hm + hp) * f0 + hp * fm) / (hm * hp * (hm + hp));
  };

  for (size_t j = 1; j + 1 < history.size(); ++j) {
    const MassState& prev = history[j - 1];
    const MassState& cur = history[j];
    const MassState& next = history[j + 1];
    for (Eigen::Index i = 1; i + 1 < N; ++i) {
      OperatorInput in;
      in.s = s[i];
      in.t = cur.t;
      in.n = params.n;
      in.mu_star_up = params.mu_star_up;

      in.phi = cur.U[i];
      in.phi_t = d1(prev.t, cur.t, next.t, prev.U[i], cur.U[i], next.U[i]);
      in.phi_s = d1(s[i - 1], s[i], s[i + 1], cur.U[i - 1], cur.U[i], cur.U[i + 1]);
      in.phi_ss = d2(s[i - 1], s[i], s[i + 1], cur.U[i - 1], cur.U[i], cur.U[i + 1]);
      in.psi = cur.W[i];
      in.D = &params.D1;
      const double rp = eval_P(in);

      in.phi = cur.W[i];
      in.phi_t = d1(prev.t, cur.t, next.t, prev.W[i], cur.W[i], next.W[i]);
      in.phi_s = d1(s[i - 1], s[i], s[i + 1], cur.W[i - 1], cur.W[i], cur.W[i + 1]);
      in.phi_ss = d2(s[i - 1], s[i], s[i + 1], cur.W[i - 1], cur.W[i], cur.W[i + 1]);
      in.psi = cur.U[i];
      in.D = &params.D2;
      const double rq = eval_Q(in);

      ++rep.samples;
      rep.min_P = std::min(rep.min_P, rp);
      rep.min_Q = std::min(rep.min_Q, rq);
      if (rp < -tol) ++rep.below_tol_P;
      if (rq < -tol) ++rep.below_tol_Q;
    }
  }
  return rep;
}

}  // namespace chemotax
