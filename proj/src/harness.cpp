#include "chemotax/harness.hpp"

#include <Eigen/Core>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "chemotax/operators.hpp"

namespace fs = std::filesystem;

namespace chemotax {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Fixed shape for concentrated initial data. Keeping the shape independent
// of the model's exponents makes scan records comparable across the plane:
// every point gets literally identical data.
Exponents standard_shape_exponents() {
  Exponents e;
  e.alpha = 0.1;
  e.beta = 0.1;
  e.delta = 0.45;
  e.provenance = RegionClass::S1;
  return e;
}

double max_slope_of(const MassState& st) {
  double mx = 0.0;
  for (Eigen::Index i = 0; i + 1 < st.s.size(); ++i)
    mx = std::max(mx, std::max(st.U[i + 1] - st.U[i], st.W[i + 1] - st.W[i]) /
                          (st.s[i + 1] - st.s[i]));
  return mx;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw invalid_input("cannot write " + path.string());
  f << text;
}

void write_metadata(const fs::path& dir, const std::string& command,
                    const RunConfig& cfg) {
  std::ostringstream os;
  os << "version = " << kVersion << "\n";
  os << "command = " << command << "\n";
  os << "eigen = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
     << EIGEN_MINOR_VERSION << "\n";
  os << "seed = " << cfg.output.seed << "\n\n";
  os << serialize_config(cfg);
  write_text(dir / "metadata.txt", os.str());
}

std::string series_table(const std::vector<SeriesRow>& rows) {
  std::ostringstream os;
  os << "t\tsup_u\tsup_w\tmass_u\tmass_w\tdt\n";
  for (const auto& r : rows)
    os << g17(r.t) << "\t" << g17(r.sup_u) << "\t" << g17(r.sup_w) << "\t"
       << g17(r.mass_u) << "\t" << g17(r.mass_w) << "\t" << g17(r.dt) << "\n";
  return os.str();
}

std::string snapshot_table(const std::vector<MassState>& snaps, int n) {
  std::ostringstream os;
  os << "t\ts-index\ts\tU\tW\tu\tw\n";
  for (const auto& st : snaps) {
    const DensityRecovery rec = density_from_mass(st, n);
    for (Eigen::Index i = 0; i < st.s.size(); ++i)
      os << g17(st.t) << "\t" << i << "\t" << g17(st.s[i]) << "\t" << g17(st.U[i])
         << "\t" << g17(st.W[i]) << "\t" << g17(rec.u.values[i]) << "\t"
         << g17(rec.w.values[i]) << "\n";
  }
  return os.str();
}

std::pair<RadialProfile, RadialProfile> load_profiles(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw invalid_input("cannot open profile file: " + path);
  std::string header;
  std::getline(f, header);
  std::vector<double> r, u, w;
  double a, b, c;
  while (f >> a >> b >> c) {
    r.push_back(a);
    u.push_back(b);
    w.push_back(c);
  }
  if (r.size() < 2) throw invalid_input("profile file needs >= 2 rows");
  const Eigen::Index m = Eigen::Index(r.size());
  RadialProfile up{Eigen::Map<const ArrayXd>(r.data(), m),
                   Eigen::Map<const ArrayXd>(u.data(), m)};
  RadialProfile wp{up.r, Eigen::Map<const ArrayXd>(w.data(), m)};
  validate_profile(up);
  validate_profile(wp);
  return {up, wp};
}

SimConfig sim_config_from(const RunConfig& cfg, const ModelParams& params,
                          MassState initial) {
  SimConfig sc;
  sc.params = params;
  sc.initial = std::move(initial);
  sc.grid = {cfg.solver.N, cfg.solver.gamma};
  sc.time.t_end = cfg.solver.t_end;
  sc.time.cfl = cfg.solver.cfl;
  sc.time.dt_min = cfg.solver.dt_min;
  sc.time.cadence = cfg.output.cadence;
  sc.blowup.rho_max = cfg.solver.rho_max;
  sc.enforce_monotone = cfg.solver.enforce_monotone;
  return sc;
}

double toy_T(const RunConfig& cfg, const ModelParams& params) {
  const ModelParams shape =
      with_masses(params, cfg.initial.amplitude, cfg.initial.amplitude);
  return toy_shape_params(shape, standard_shape_exponents(), cfg.initial.y0_override,
                          cfg.initial.theta_override)
      .T;
}

}  // namespace

RunConfig apply_overrides(RunConfig cfg, const CliOverrides& ov) {
  if (ov.m1) cfg.model.m1 = *ov.m1;
  if (ov.m2) cfg.model.m2 = *ov.m2;
  if (ov.n) cfg.model.n = *ov.n;
  if (ov.out) cfg.output.directory = *ov.out;
  validate_config(cfg);
  return cfg;
}

Exponents choose_exponents(const RunConfig& cfg, const CliOverrides& ov) {
  if (ov.alpha || ov.beta || ov.delta) {
    if (!ov.alpha || !ov.beta)
      throw invalid_input("--alpha and --beta must be given together");
    Exponents e;
    e.alpha = *ov.alpha;
    e.beta = *ov.beta;
    e.delta = ov.delta ? *ov.delta
                       : std::min(0.45, std::min(0.5 * (1.0 - e.alpha),
                                                 0.5 * (1.0 - e.beta)));
    e.provenance = classify_region(cfg.model.m1, cfg.model.m2, cfg.model.n);
    return e;
  }
  return select_exponents(cfg.model.m1, cfg.model.m2, cfg.model.n);
}

ModelParams model_from_config(const RunConfig& cfg) {
  return make_model_params(cfg.model.n, cfg.model.R, cfg.model.m1, cfg.model.m2,
                           cfg.model.k1, cfg.model.k2, cfg.initial.amplitude,
                           cfg.initial.amplitude, cfg.model.diffusion_reg);
}

MassState build_initial_state(const RunConfig& cfg, const ModelParams& params) {
  const ArrayXd s = graded_s_grid(params.sn(), {cfg.solver.N, cfg.solver.gamma});
  MassState st;
  st.s = s;
  st.t = 0.0;
  if (cfg.initial.kind == "constant") {
    st.U = cfg.initial.amplitude / params.n * s;
    st.W = st.U;
  } else if (cfg.initial.kind == "toy_subsolution") {
    const ModelParams shape =
        with_masses(params, cfg.initial.amplitude, cfg.initial.amplitude);
    const Exponents e = standard_shape_exponents();
    const SubsolutionParams sp = toy_shape_params(
        shape, e, cfg.initial.y0_override, cfg.initial.theta_override);
    auto [u0, w0] = generate_initial_profiles(sp, e, shape, s);
    st.U = mass_from_profile(u0, s, params.n);
    st.W = mass_from_profile(w0, s, params.n);
  } else if (cfg.initial.kind == "file") {
    auto [u0, w0] = load_profiles(cfg.initial.path);
    st.U = mass_from_profile(u0, s, params.n);
    st.W = mass_from_profile(w0, s, params.n);
  } else {
    throw invalid_input("unknown initial.kind: " + cfg.initial.kind);
  }
  return st;
}

std::vector<ScanRecord> run_scan(const RunConfig& cfg) {
  validate_config(cfg);
  const int K = cfg.scan.steps;
  const bool simulate = cfg.scan.mode != "theory";
  std::vector<ScanRecord> recs;
  recs.reserve(size_t(K) * size_t(K));

  MassState data0;
  double T_ref = kNaN;
  double sup0 = 0.0;
  if (simulate) {
    RunConfig c0 = cfg;
    c0.initial.kind = "toy_subsolution";
    const ModelParams base = model_from_config(cfg);
    data0 = build_initial_state(c0, base);
    T_ref = toy_T(cfg, base);
    sup0 = cfg.model.n * max_slope_of(data0);
  }

  auto coord = [K](const ScanRange& r, int i) {
    return K == 1 ? r.lo : r.lo + (r.hi - r.lo) * double(i) / double(K - 1);
  };

  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      ScanRecord rec;
      rec.m1 = coord(cfg.scan.m1_range, i);
      rec.m2 = coord(cfg.scan.m2_range, j);
      rec.theory = classify_point(rec.m1, rec.m2, cfg.model.n);
      rec.region = classify_region(rec.m1, rec.m2, cfg.model.n);
      if (simulate) {
        try {
          const ModelParams pt = make_model_params(
              cfg.model.n, cfg.model.R, rec.m1, rec.m2, cfg.model.k1, cfg.model.k2,
              cfg.initial.amplitude, cfg.initial.amplitude, cfg.model.diffusion_reg);
          SimConfig sc = sim_config_from(cfg, pt, data0);
          sc.time.t_end = std::min(1.0, 0.99 * T_ref);
          sc.time.cadence = sc.time.t_end;
          sc.blowup.rho_max = 10.0 * sup0;
          sc.subsolution_T = T_ref;
          const SimResult res = run(sc);
          rec.sim = res.blowup.fired ? ScanRecord::Sim::Blowup
                                     : ScanRecord::Sim::NoBlowup;
          rec.t_detect = res.blowup.t_detect;
        } catch (const std::exception&) {
          rec.sim = ScanRecord::Sim::Skipped;
        }
      }
      recs.push_back(rec);
    }
  }
  return recs;
}

std::string scan_table(const std::vector<ScanRecord>& records) {
  std::ostringstream os;
  os << "m1\tm2\ttheory_class\tregion\tsim_class\tt_detect\n";
  for (const auto& r : records) {
    os << g17(r.m1) << "\t" << g17(r.m2) << "\t" << to_string(r.theory) << "\t"
       << to_string(r.region) << "\t";
    switch (r.sim) {
      case ScanRecord::Sim::Blowup: os << "blowup"; break;
      case ScanRecord::Sim::NoBlowup: os << "no-blowup"; break;
      case ScanRecord::Sim::Skipped: os << "skipped"; break;
      case ScanRecord::Sim::NotRun: os << "-"; break;
    }
    os << "\t" << (std::isnan(r.t_detect) ? std::string("-") : g17(r.t_detect))
       << "\n";
  }
  return os.str();
}

int cmd_classify(const RunConfig& cfg, std::ostream& os) {
  const double m1 = cfg.model.m1, m2 = cfg.model.m2;
  const int n = cfg.model.n;
  os << "m1 = " << g17(m1) << "\n";
  os << "m2 = " << g17(m2) << "\n";
  os << "n = " << n << "\n";
  os << "region = " << to_string(classify_region(m1, m2, n)) << "\n";
  os << "blowup = " << (blowup_condition(m1, m2, n) ? "true" : "false") << "\n";
  os << "bounded = " << (bounded_condition(m1, m2, n) ? "true" : "false") << "\n";
  os << "class = " << to_string(classify_point(m1, m2, n)) << "\n";
  return 0;
}

int cmd_params(const RunConfig& cfg, const CliOverrides& ov, std::ostream& os) {
  const ModelParams params = model_from_config(cfg);
  const Exponents e = choose_exponents(cfg, ov);
  ConstantOverrides co;
  if (ov.toy_verify) {
    co.y0 = cfg.initial.y0_override;
    co.theta = cfg.initial.theta_override;
  }
  const SubsolutionParams sp = derive_constants(params, e, co);
  const std::string report = params_report(sp, e, params);
  os << report;
  fs::create_directories(cfg.output.directory);
  write_text(fs::path(cfg.output.directory) / "params.txt", report);
  write_metadata(cfg.output.directory, "params", cfg);
  return 0;
}

int cmd_verify(const RunConfig& cfg, const CliOverrides& ov, std::ostream& os) {
  const ModelParams params = model_from_config(cfg);
  const Exponents e = choose_exponents(cfg, ov);
  ConstantOverrides co;
  if (ov.toy_verify) {
    co.y0 = cfg.initial.y0_override;
    co.theta = cfg.initial.theta_override;
  }
  const SubsolutionParams sp = derive_constants(params, e, co);
  SamplingSpec spec;
  spec.samples_per_region = cfg.verify.samples_per_region;
  spec.time_samples = cfg.verify.time_samples;
  const VerifierReport rep = verify_subsolution(sp, e, params, spec);
  const std::string report = rep.to_text();
  os << report;
  fs::create_directories(cfg.output.directory);
  write_text(fs::path(cfg.output.directory) / "verify.txt", report);
  write_metadata(cfg.output.directory, "verify", cfg);
  return rep.verdict == Verdict::Pass ? 0 : 1;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& os) {
  const ModelParams params = model_from_config(cfg);
  MassState initial = build_initial_state(cfg, params);
  SimConfig sc = sim_config_from(cfg, params, std::move(initial));
  if (cfg.initial.kind == "toy_subsolution") sc.subsolution_T = toy_T(cfg, params);
  const SimResult res = run(sc);

  fs::create_directories(cfg.output.directory);
  const fs::path dir(cfg.output.directory);
  write_text(dir / "series.tsv", series_table(res.series));
  write_text(dir / "snapshots.tsv", snapshot_table(res.snapshots, params.n));
  write_metadata(dir, "simulate", cfg);

  os << "status = "
     << (res.status == RunStatus::Completed ? "completed" : "aborted-nan") << "\n";
  os << "steps = " << res.steps << "\n";
  os << "fired = " << (res.blowup.fired ? "true" : "false") << "\n";
  os << "trigger = " << to_string(res.blowup.trigger) << "\n";
  if (res.blowup.fired) os << "t_detect = " << g17(res.blowup.t_detect) << "\n";
  if (!std::isnan(res.blowup.T_ref)) os << "T_ref = " << g17(res.blowup.T_ref) << "\n";
  return res.status == RunStatus::Completed ? 0 : 1;
}

int cmd_scan(const RunConfig& cfg, std::ostream& os) {
  const std::vector<ScanRecord> recs = run_scan(cfg);
  const std::string table = scan_table(recs);
  fs::create_directories(cfg.output.directory);
  write_text(fs::path(cfg.output.directory) / "scan.tsv", table);
  write_metadata(cfg.output.directory, "scan", cfg);
  os << table;
  return 0;
}

int cmd_compare(const RunConfig& cfg, const CliOverrides& ov, std::ostream& os) {
  const ModelParams params = model_from_config(cfg);
  const MassState base = build_initial_state(cfg, params);
  SimConfig sc = sim_config_from(cfg, params, base);

  // ordered pair: base plus an interior bump vanishing at both ends
  MassState hi = base;
  const double Rn = params.sn();
  const ArrayXd bump =
      0.01 * cfg.initial.amplitude / (Rn * Rn) * base.s * (Rn - base.s);
  hi.U += bump;
  hi.W += bump;
  const OrderingReport ord = ordering_experiment(sc, base, hi);

  std::ostringstream ores;
  ores << "[ordering]\n";
  ores << "ok = " << (ord.ok ? "true" : "false") << "\n";
  ores << "compared = " << ord.compared << "\n";
  ores << "max_violation = " << g17(ord.max_violation) << "\n";
  if (!ord.ok) ores << "first_violation_t = " << g17(ord.first_violation_t) << "\n";

  // dominance against the pair built at this model point (toy overrides)
  const Exponents e = choose_exponents(cfg, ov);
  ConstantOverrides co;
  co.y0 = cfg.initial.y0_override;
  co.theta = cfg.initial.theta_override;
  const SubsolutionParams sp = derive_constants(params, e, co);
  const DominanceReport dom = dominance_experiment(sc, sp, e);

  std::ostringstream dres;
  dres << "[dominance]\n";
  dres << "label = " << dom.label << "\n";
  dres << "compared = " << dom.compared << "\n";
  dres << "min_gap = " << g17(dom.min_gap) << "\n";
  dres << "min_gap_t = " << g17(dom.min_gap_t) << "\n";
  dres << "truncated_at_T = " << (dom.truncated_at_T ? "true" : "false") << "\n";

  fs::create_directories(cfg.output.directory);
  write_text(fs::path(cfg.output.directory) / "ordering.txt", ores.str());
  write_text(fs::path(cfg.output.directory) / "dominance.txt", dres.str());
  write_metadata(cfg.output.directory, "compare", cfg);
  os << ores.str() << "\n" << dres.str();
  return ord.ok ? 0 : 1;
}

}  // namespace chemotax
