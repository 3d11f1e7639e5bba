#pragma once

#include <string>
#include <vector>

#include "chemotax/model.hpp"
#include "chemotax/signed_log.hpp"
#include "chemotax/subsolution.hpp"

namespace chemotax {

// Point values feeding one comparison-operator evaluation.
struct OperatorInput {
  double phi = 0, phi_t = 0, phi_s = 0, phi_ss = 0;
  double psi = 0;
  double s = 0, t = 0;
  int n = 3;
  double mu_star_up = 0;
  const Diffusion* D = nullptr;
};

// phi_t - n^2 s^{2-2/n} phi_ss D(n phi_s) - n phi_s (psi - mu_up s / n).
// eval_Q is the same residual with the roles swapped: pass the second
// species' derivatives in the phi slots, the first species' value in psi,
// and the second diffusion in D.
double eval_P(const OperatorInput& in);
double eval_Q(const OperatorInput& in);

struct SamplingSpec {
  int samples_per_region = 10000;  // total per region (split across times)
  int time_samples = 100;
  double rel_slack = 1e-12;   // tolerance relative to the largest term
  double inner_decades = 30;  // geometric span below the kink
  double time_decades = 6;    // log span of sampled times below the cap
};

struct RegionReport {
  long samples = 0;
  long violations_P = 0, violations_Q = 0;
  long nonfinite = 0;
  SignedLog max_P, max_Q;  // extreme (most positive) residuals
  // sup over samples of log(residual) - log(largest term), positive residuals
  double max_rel_P = -std::numeric_limits<double>::infinity();
  double max_rel_Q = -std::numeric_limits<double>::infinity();
};

enum class Verdict { Pass, Fail, Vacuous };
std::string to_string(Verdict v);

struct VerifierReport {
  RegionReport inner, transition, outer;
  Verdict verdict = Verdict::Vacuous;
  bool toy = false;
  std::string to_text() const;
  long total_violations() const;
};

// Samples both operators on the closed-form pair over the three regions
// (kink excluded), entirely in log space. Deterministic for fixed inputs.
VerifierReport verify_subsolution(const SubsolutionParams& sp, const Exponents& exp,
                                  const ModelParams& params, const SamplingSpec& spec);

struct MassResidualReport {
  long samples = 0;
  long below_tol_P = 0, below_tol_Q = 0;
  double min_P = std::numeric_limits<double>::infinity();
  double min_Q = std::numeric_limits<double>::infinity();
};

// Finite-difference residuals of the relaxed operators on a simulated
// history: the numerical solution should be a discrete supersolution, so
// residuals stay above -tol (truncation).
MassResidualReport check_mass_system_residual(const std::vector<MassState>& history,
                                              const ModelParams& params, double tol);

}  // namespace chemotax
