#pragma once

#include <limits>
#include <string>
#include <vector>

#include "chemotax/model.hpp"
#include "chemotax/subsolution.hpp"

namespace chemotax {

struct GridSpec {
  int N = 256;         // cells; N+1 nodes
  double gamma = 2.0;  // grading exponent, nodes cluster at s = 0
};

// s_i = R^n (i/N)^gamma
ArrayXd graded_s_grid(double sn, const GridSpec& grid);

struct TimeSpec {
  double t_end = 1.0;
  double cfl = 0.4;
  double dt_min = 0.0;    // 0: defaults to 1e-12 t_end
  double cadence = 0.01;  // output interval
};

struct BlowupSpec {
  double rho_max = 0.0;  // density threshold; 0: defaults to 1e6 x initial sup
  double slope_max = std::numeric_limits<double>::infinity();
};

struct SimConfig {
  ModelParams params;
  MassState initial;
  GridSpec grid;
  TimeSpec time;
  BlowupSpec blowup;
  bool enforce_monotone = false;
  long max_steps = 400000000;
  double subsolution_T = std::numeric_limits<double>::quiet_NaN();  // optional reference
};

enum class RunStatus { Completed, AbortedNaN };
enum class Trigger { None, Density, DtCollapse, Horizon };
std::string to_string(Trigger t);

struct SeriesRow {
  double t, sup_u, sup_w, mass_u, mass_w, dt;
};

struct BlowupReport {
  bool fired = false;
  double t_detect = std::numeric_limits<double>::quiet_NaN();
  Trigger trigger = Trigger::None;
  double T_ref = std::numeric_limits<double>::quiet_NaN();
};

struct SimResult {
  std::vector<SeriesRow> series;
  std::vector<MassState> snapshots;
  BlowupReport blowup;
  RunStatus status = RunStatus::Completed;
  long steps = 0;
  MassState last;  // final state (or last good state when aborted)
};

// Method of lines for the mass-formulation system on the graded grid:
// central second derivatives, upwind-biased advection, explicit midpoint
// stepping under a CFL bound, Dirichlet rows pinned every stage.
SimResult run(const SimConfig& cfg);

struct OrderingReport {
  bool ok = true;
  double max_violation = 0.0;
  double first_violation_t = std::numeric_limits<double>::quiet_NaN();
  long compared = 0;
};

// Runs both initial states through identical configs and checks the
// componentwise order at every output time.
OrderingReport ordering_experiment(const SimConfig& cfg, const MassState& lo,
                                   const MassState& hi, double tol_rel = 1e-8);

struct DominanceReport {
  double min_gap = std::numeric_limits<double>::infinity();
  double min_gap_t = 0.0;
  double initial_gap = std::numeric_limits<double>::infinity();  // t = 0 row
  long compared = 0;
  bool truncated_at_T = false;
  std::string label;  // always "empirical (toy parameters)"
};

// Simulates from the pair's own initial data and reports min(U - U_pair)
// over the grid and output times below min(T, horizon). Reports only; toy
// overrides void the analytic hypotheses, so no sign is asserted.
DominanceReport dominance_experiment(const SimConfig& cfg, const SubsolutionParams& sp,
                                     const Exponents& exp);

}  // namespace chemotax
