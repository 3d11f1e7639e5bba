#pragma once

#include <string>

namespace chemotax {

inline constexpr const char* kVersion = "0.1.0";

// %.17g, round-trip exact for doubles; all writers use it so repeated runs
// are byte-identical.
std::string g17(double v);

struct ScanRange {
  double lo = 0, hi = 0;
};

// Sectioned key=value run configuration. parse/serialize round-trip is the
// identity on the parsed value.
struct RunConfig {
  struct Model {
    int n = 3;
    double R = 1.0;
    double m1 = 1.1, m2 = 1.1;
    double k1 = 1.0, k2 = 1.0;
    double diffusion_reg = 1.0;
  } model;

  struct Initial {
    std::string kind = "toy_subsolution";  // constant | toy_subsolution | file
    double y0_override = 1000.0;
    double theta_override = 1.0;
    double amplitude = 1.0;
    std::string path;  // used by kind = file
  } initial;

  struct Solver {
    int N = 256;
    double gamma = 2.0;
    double cfl = 0.4;
    double t_end = 1.0;
    double rho_max = 0.0;  // 0 = auto
    double dt_min = 0.0;   // 0 = auto
    bool enforce_monotone = false;
  } solver;

  struct Verify {
    int samples_per_region = 10000;
    int time_samples = 100;
  } verify;

  struct Scan {
    ScanRange m1_range{1.05, 2.0};
    ScanRange m2_range{1.05, 2.0};
    int steps = 4;
    std::string mode = "theory";  // theory | simulate | both
  } scan;

  struct Output {
    std::string directory = "out";
    double cadence = 0.01;
    long seed = 0;
  } output;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);
void validate_config(const RunConfig& cfg);

}  // namespace chemotax
