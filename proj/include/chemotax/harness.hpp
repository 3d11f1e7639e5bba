#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chemotax/config.hpp"
#include "chemotax/exponents.hpp"
#include "chemotax/model.hpp"
#include "chemotax/solver.hpp"
#include "chemotax/subsolution.hpp"

namespace chemotax {

// CLI-level overrides layered on top of a config file.
struct CliOverrides {
  std::optional<double> m1, m2;
  std::optional<int> n;
  std::optional<std::string> out;
  std::optional<double> alpha, beta, delta;
  bool toy_verify = false;
};

RunConfig apply_overrides(RunConfig cfg, const CliOverrides& ov);

// Exponents from CLI overrides when given (delta optional), otherwise the
// constructive selection.
Exponents choose_exponents(const RunConfig& cfg, const CliOverrides& ov);

ModelParams model_from_config(const RunConfig& cfg);

// Initial mass state per the config's initial section, on the solver grid.
// toy_subsolution uses the fixed standardized shape (alpha = beta = 0.1,
// delta = 0.45) so the data do not depend on the model's exponents.
MassState build_initial_state(const RunConfig& cfg, const ModelParams& params);

struct ScanRecord {
  double m1 = 0, m2 = 0;
  PointClass theory = PointClass::Critical;
  RegionClass region = RegionClass::S1;
  enum class Sim { Blowup, NoBlowup, Skipped, NotRun } sim = Sim::NotRun;
  double t_detect = std::numeric_limits<double>::quiet_NaN();
};

std::vector<ScanRecord> run_scan(const RunConfig& cfg);
std::string scan_table(const std::vector<ScanRecord>& records);

// Exit codes: 0 success, 1 analytic/verification failure, 2 invalid input.
int cmd_classify(const RunConfig& cfg, std::ostream& os);
int cmd_params(const RunConfig& cfg, const CliOverrides& ov, std::ostream& os);
int cmd_verify(const RunConfig& cfg, const CliOverrides& ov, std::ostream& os);
int cmd_simulate(const RunConfig& cfg, std::ostream& os);
int cmd_scan(const RunConfig& cfg, std::ostream& os);
int cmd_compare(const RunConfig& cfg, const CliOverrides& ov, std::ostream& os);

}  // namespace chemotax
