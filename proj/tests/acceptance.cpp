// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "chemotax/harness.hpp"
#include "chemotax/operators.hpp"

using namespace chemotax;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int num, std::string name) : num_(num), name_(std::move(name)) {
    start_ = std::chrono::steady_clock::now();
  }
  void finish(bool ok, const std::string& detail) {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", num_,
                name_.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
  }

 private:
  int num_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

ModelParams params_at(double m1, double m2) {
  return make_model_params(3, 1.0, m1, m2, 1.0, 1.0, 1.0, 1.0);
}

Exponents fixed_exponents(double a, double b, double d) {
  Exponents e;
  e.alpha = a;
  e.beta = b;
  e.delta = d;
  return e;
}

double max_mass_drift(const SimResult& res) {
  const double mu0 = res.series.front().mass_u;
  const double mw0 = res.series.front().mass_w;
  double worst = 0.0;
  for (const auto& row : res.series) {
    worst = std::max(worst, std::abs(row.mass_u - mu0) / mu0);
    worst = std::max(worst, std::abs(row.mass_w - mw0) / mw0);
  }
  return worst;
}

MassState standardized_toy_state(const ArrayXd& s, double amplitude) {
  const ModelParams shape = make_model_params(3, 1.0, 1.1, 1.1, 1.0, 1.0,
                                              amplitude, amplitude);
  const Exponents e = fixed_exponents(0.1, 0.1, 0.45);
  const SubsolutionParams sp = toy_shape_params(shape, e, 1000.0, 1.0);
  auto [u0, w0] = generate_initial_profiles(sp, e, shape, s);
  MassState st;
  st.s = s;
  st.U = mass_from_profile(u0, s, 3);
  st.W = mass_from_profile(w0, s, 3);
  return st;
}

// adaptive step-doubling RK4 oracle for y' = Lambda y^{1+delta}
double rk_y(double t_target, double y0, double delta, double Lambda, double tol) {
  auto f = [&](double y) { return Lambda * std::pow(y, 1.0 + delta); };
  auto rk4 = [&](double y, double h) {
    const double k1 = f(y);
    const double k2 = f(y + 0.5 * h * k1);
    const double k3 = f(y + 0.5 * h * k2);
    const double k4 = f(y + h * k3);
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  double t = 0.0, y = y0, h = t_target / 128.0;
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

void criterion_1() {
  Criterion c(1, "closed-form exponent identities at (1.4, 1.1, 3)");
  bool ok = true;
  std::ostringstream d;
  try {
    const auto [alpha, beta] = case3_exponents(1.4, 1.1, 3);
    ok = ok && std::abs(alpha - 17.0 / 72.0) < 1e-12;
    ok = ok && std::abs(beta - 1.0 / 36.0) < 1e-12;
    ok = ok && std::abs(alpha - 0.2361111) < 1e-6;
    ok = ok && std::abs(beta - 0.0277777) < 1e-6;
    const double r1 = (1.4 - 1.0) * (1.0 - alpha) + beta - 1.0 + 2.0 / 3.0;
    const double r2 = (1.1 - 1.0) * (1.0 - beta) + alpha - 1.0 + 2.0 / 3.0;
    ok = ok && std::abs(r1) < 1e-12 && std::abs(r2) < 1e-12;
    d << "alpha=" << alpha << " beta=" << beta << " residuals " << r1 << "," << r2;
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_2() {
  Criterion c(2, "exponent soundness sweep, 500 random admissible pairs");
  bool ok = true;
  std::ostringstream d;
  try {
    std::mt19937 rng(0);
    std::uniform_real_distribution<double> m(1.0 + 1e-6, 3.0);
    int found = 0, failures = 0;
    while (found < 500) {
      const int n = 3 + int(rng() % 3);
      const double m1 = m(rng), m2 = m(rng);
      if (!blowup_condition(m1, m2, n)) continue;
      ++found;
      try {
        check_exponents(select_exponents(m1, m2, n), m1, m2, n);
      } catch (const std::exception&) {
        ++failures;
      }
    }
    ok = failures == 0;
    d << found << " pairs, " << failures << " failures";
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_3() {
  Criterion c(3, "theory-grade inequality verification, 3 parameter sets");
  bool ok = true;
  std::ostringstream d;
  try {
    SamplingSpec spec;
    spec.samples_per_region = 10000;
    spec.time_samples = 100;
    struct Set {
      double m1, m2;
      bool fixed;
    };
    for (const Set& set : {Set{1.1, 1.1, true}, Set{1.4, 1.05, false},
                           Set{1.05, 1.4, false}}) {
      const ModelParams params = params_at(set.m1, set.m2);
      const Exponents e = set.fixed ? fixed_exponents(0.1, 0.1, 0.45)
                                    : select_exponents(set.m1, set.m2, 3);
      const SubsolutionParams sp = derive_constants(params, e);
      const VerifierReport rep = verify_subsolution(sp, e, params, spec);
      const bool enough = rep.inner.samples >= 10000 &&
                          rep.transition.samples >= 10000 &&
                          rep.outer.samples >= 10000;
      const bool clean = rep.verdict == Verdict::Pass && rep.total_violations() == 0;
      ok = ok && enough && clean;
      d << "(" << set.m1 << "," << set.m2 << "): " << to_string(rep.verdict) << " "
        << rep.total_violations() << " violations; ";
    }
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_4() {
  Criterion c(4, "constant chain anchors l and Lambda on the reference set");
  bool ok = true;
  std::ostringstream d;
  try {
    const SubsolutionParams sp =
        derive_constants(params_at(1.1, 1.1), fixed_exponents(0.1, 0.1, 0.45));
    // independent high-precision evaluation of the amplitude and rate formulas
    const long double l_hp = 1.0L / (3.0L * std::exp(1.0L / std::exp(1.0L)) * 2.0L);
    const long double lam_hp = 3.0L * l_hp / (2.0L * std::exp(2.0L) * 0.9L);
    ok = ok && std::abs(sp.l - double(l_hp)) < 1e-12;
    ok = ok && std::abs(sp.Lambda - double(lam_hp)) < 1e-12;
    ok = ok && std::abs(sp.l - 0.1153667) < 1e-6;
    ok = ok && std::abs(sp.Lambda - 0.026022) < 1e-5;
    d << "l=" << sp.l << " Lambda=" << sp.Lambda;
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_5() {
  Criterion c(5, "trajectory exactness vs adaptive integration");
  bool ok = true;
  std::ostringstream d;
  try {
    const Exponents e = fixed_exponents(0.1, 0.1, 0.45);
    SubsolutionParams sp = toy_shape_params(params_at(1.1, 1.1), e, 1000.0, 1.0);
    sp.Lambda = 0.026022;
    sp.log_Lambda = std::log(sp.Lambda);
    sp.log_T = -e.delta * sp.log_y0 - std::log(e.delta) - sp.log_Lambda;
    sp.T = std::exp(sp.log_T);
    const Trajectory tr = make_trajectory(sp, e);
    ok = ok && std::abs(tr.T - 3.8145) < 1e-3;
    double worst = 0.0;
    for (int k = 1; k <= 33; ++k) {
      const double t = 0.99 * tr.T * k / 33.0;
      const double ynum = rk_y(t, 1000.0, e.delta, sp.Lambda, 1e-11);
      worst = std::max(worst, std::abs(y_of_t(tr, t).y - ynum) / ynum);
    }
    ok = ok && worst < 1e-6;
    d << "T=" << tr.T << " max rel err=" << worst;
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_6() {
  Criterion c(6, "kink regularity at 100 sampled times");
  bool ok = true;
  std::ostringstream d;
  try {
    const Exponents e = fixed_exponents(0.1, 0.1, 0.45);
    const SubsolutionParams sp = toy_shape_params(params_at(1.1, 1.1), e, 1000.0, 1.0);
    const Trajectory tr = make_trajectory(sp, e);
    double worst_v = 0.0, worst_s = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double t = (0.001 + 0.989 * k / 99.0) * tr.T;
      const double y = y_of_t(tr, t).y;
      const double kink = 1.0 / y;
      const double dec = std::exp(-sp.theta * t);
      const double in_v = dec * sp.l * std::pow(y, 1.0 - e.alpha) * kink;
      const double out_v = dec * sp.l * std::pow(e.alpha, -e.alpha) *
                           std::pow(kink - (1.0 - e.alpha) / y, e.alpha);
      worst_v = std::max(worst_v, std::abs(in_v - out_v) / in_v);
      const double in_s = dec * sp.l * std::pow(y, 1.0 - e.alpha);
      const double out_s = dec * sp.l * std::pow(e.alpha, 1.0 - e.alpha) *
                           std::pow(kink - (1.0 - e.alpha) / y, e.alpha - 1.0);
      worst_s = std::max(worst_s, std::abs(in_s - out_s) / in_s);
    }
    ok = worst_v < 1e-10 && worst_s < 1e-10;
    d << "value mismatch " << worst_v << ", slope mismatch " << worst_s;
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_7() {
  Criterion c(7, "steady-state preservation and mass conservation");
  bool ok = true;
  std::ostringstream d;
  try {
    SimConfig cfg;
    cfg.params = make_model_params(3, 1.0, 1.1, 1.1, 1.0, 1.0, 1.0, 2.0);
    cfg.grid = {64, 2.0};
    const ArrayXd s = graded_s_grid(1.0, cfg.grid);
    MassState st;
    st.s = s;
    st.U = 1.0 / 3.0 * s;
    st.W = 2.0 / 3.0 * s;
    cfg.initial = st;
    cfg.time.t_end = 1e9;
    cfg.time.cadence = 1e9;
    cfg.time.dt_min = 1e-15;
    cfg.max_steps = 10000;
    const SimResult res = run(cfg);
    const double drift =
        std::abs(res.series.back().sup_u - res.series.front().sup_u) /
        res.series.front().sup_u;
    ok = ok && res.steps == 10000 && drift < 1e-10;
    ok = ok && max_mass_drift(res) < 1e-6;
    d << "sup drift " << drift << ", mass drift " << max_mass_drift(res);
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_8() {
  Criterion c(8, "phase-plane anchors with identical concentrated data");
  bool ok = true;
  std::ostringstream d;
  try {
    const GridSpec grid{256, 2.0};
    const ArrayXd s = graded_s_grid(1.0, grid);
    const MassState data = standardized_toy_state(s, 12.0);
    double sup0 = 0.0;
    for (Eigen::Index i = 0; i + 1 < s.size(); ++i)
      sup0 = std::max(sup0, 3.0 * (data.U[i + 1] - data.U[i]) / (s[i + 1] - s[i]));

    SimConfig a;
    a.params = params_at(1.1, 1.1);
    a.initial = data;
    a.grid = grid;
    a.time.t_end = 1.0;
    a.time.cadence = 0.05;
    a.blowup.rho_max = 10.0 * sup0;
    const SimResult ra = run(a);
    ok = ok && ra.blowup.fired && ra.status == RunStatus::Completed;
    d << "(1.1,1.1) " << (ra.blowup.fired ? "fired" : "did not fire") << " at t="
      << ra.blowup.t_detect << " via " << to_string(ra.blowup.trigger) << "; ";

    SimConfig b = a;
    b.params = params_at(2.0, 2.0);
    const SimResult rb = run(b);
    double worst = 0.0;
    for (const auto& row : rb.series) worst = std::max(worst, row.sup_u);
    ok = ok && !rb.blowup.fired && worst < 2.0 * rb.series.front().sup_u;
    ok = ok && max_mass_drift(rb) < 1e-6 && max_mass_drift(ra) < 1e-6;
    d << "(2,2) max sup " << worst << " vs initial " << rb.series.front().sup_u;
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_9() {
  Criterion c(9, "discrete comparison principle on 20 randomized ordered pairs");
  bool ok = true;
  std::ostringstream d;
  try {
    std::mt19937 rng(0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    SimConfig cfg;
    cfg.params = params_at(1.1, 1.1);
    cfg.grid = {48, 2.0};
    const ArrayXd s = graded_s_grid(1.0, cfg.grid);
    MassState base;
    base.s = s;
    base.U = s / 3.0;
    base.W = s / 3.0;
    cfg.initial = base;
    cfg.time.t_end = 0.04;
    cfg.time.cadence = 0.01;
    int violations = 0;
    for (int rep = 0; rep < 20; ++rep) {
      const double mu1 = 0.5 + uni(rng), mu2 = 0.5 + uni(rng);
      MassState lo;
      lo.s = s;
      lo.U = mu1 / 3.0 * s + 0.05 * uni(rng) * s * (1.0 - s);
      lo.W = mu2 / 3.0 * s + 0.05 * uni(rng) * s * (1.0 - s);
      MassState hi = lo;
      hi.U += 0.04 * uni(rng) * s * (1.0 - s);
      hi.W += 0.04 * uni(rng) * s * (1.0 - s) * (2.0 * s).cos().square();
      const OrderingReport r = ordering_experiment(cfg, lo, hi, 1e-8);
      if (!r.ok) ++violations;
    }
    ok = violations == 0;
    d << violations << " of 20 pairs violated";
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_10() {
  Criterion c(10, "Richardson convergence order on a smooth window");
  bool ok = true;
  std::ostringstream d;
  try {
    auto solve = [](int N) {
      SimConfig cfg;
      cfg.params = params_at(2.0, 2.0);
      cfg.grid = {N, 2.0};
      const ArrayXd s = graded_s_grid(1.0, cfg.grid);
      RadialProfile u0, w0;
      u0.r = s.pow(1.0 / 3.0);
      u0.values = 1.0 + 0.5 * (std::numbers::pi * u0.r).cos();
      w0.r = u0.r;
      w0.values = 1.0 + 0.3 * (2.0 * std::numbers::pi * w0.r).cos();
      MassState st;
      st.s = s;
      st.U = mass_from_profile(u0, s, 3);
      st.W = mass_from_profile(w0, s, 3);
      cfg.initial = st;
      cfg.time.t_end = 0.02;
      cfg.time.cadence = 0.02;
      return run(cfg).last;
    };
    const MassState a = solve(48), b = solve(96), cc = solve(192);
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i <= 48; ++i) {
      e1 = std::max(e1, std::abs(a.U[i] - b.U[2 * i]));
      e1 = std::max(e1, std::abs(a.W[i] - b.W[2 * i]));
    }
    for (int i = 0; i <= 96; ++i) {
      e2 = std::max(e2, std::abs(b.U[i] - cc.U[2 * i]));
      e2 = std::max(e2, std::abs(b.W[i] - cc.W[2 * i]));
    }
    const double order = std::log2(e1 / e2);
    ok = order >= 1.5;
    d << "errors " << e1 << " -> " << e2 << ", observed order " << order;
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

void criterion_11() {
  Criterion c(11, "scan determinism, repeated runs byte-identical");
  bool ok = true;
  std::ostringstream d;
  try {
    RunConfig cfg;
    cfg.scan.steps = 4;
    cfg.scan.mode = "theory";
    const std::string t1 = scan_table(run_scan(cfg));
    const std::string t2 = scan_table(run_scan(cfg));
    ok = ok && t1 == t2;

    // and through the CLI, including the files on disk
    const fs::path dir = fs::temp_directory_path() / "chemotax_acceptance_scan";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string base = std::string(CHEMOTAX_CLI_PATH) +
                             " scan --m1 1.1 --m2 1.1 --out ";
    const int r1 = std::system(
        (base + (dir / "a").string() + " > /dev/null 2>&1").c_str());
    const int r2 = std::system(
        (base + (dir / "b").string() + " > /dev/null 2>&1").c_str());
    ok = ok && WEXITSTATUS(r1) == 0 && WEXITSTATUS(r2) == 0;
    auto slurp = [](const fs::path& p) {
      std::ifstream f(p);
      std::ostringstream os;
      os << f.rdbuf();
      return os.str();
    };
    const std::string sa = slurp(dir / "a" / "scan.tsv");
    ok = ok && !sa.empty() && sa == slurp(dir / "b" / "scan.tsv");
    d << (ok ? "tables and files identical" : "mismatch");
  } catch (const std::exception& e) {
    ok = false;
    d << e.what();
  }
  c.finish(ok, d.str());
}

}  // namespace

int main() {
  std::printf("acceptance suite, library version %s\n", kVersion);
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures;
}
