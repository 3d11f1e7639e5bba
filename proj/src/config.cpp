#include "chemotax/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chemotax/errors.hpp"

namespace chemotax {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw invalid_input("config: bad numeric value for '" + key + "': " + v);
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw invalid_input("config: bad integer value for '" + key + "': " + v);
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw invalid_input("config: bad integer value for '" + key + "': " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw invalid_input("config: bad boolean value for '" + key + "': " + v);
}

ScanRange parse_range(const std::string& key, const std::string& v) {
  const size_t c = v.find(':');
  if (c == std::string::npos)
    throw invalid_input("config: range '" + key + "' must look like lo:hi");
  return {parse_double(key, trim(v.substr(0, c))),
          parse_double(key, trim(v.substr(c + 1)))};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw invalid_input("config: bad section header at line " +
                            std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "initial" && section != "solver" &&
          section != "verify" && section != "scan" && section != "output")
        throw invalid_input("config: unknown section '" + section + "'");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw invalid_input("config: expected key=value at line " +
                          std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (section == "model") {
      if (key == "n") cfg.model.n = parse_int(qual, val);
      else if (key == "R") cfg.model.R = parse_double(qual, val);
      else if (key == "m1") cfg.model.m1 = parse_double(qual, val);
      else if (key == "m2") cfg.model.m2 = parse_double(qual, val);
      else if (key == "k1") cfg.model.k1 = parse_double(qual, val);
      else if (key == "k2") cfg.model.k2 = parse_double(qual, val);
      else if (key == "diffusion_reg") cfg.model.diffusion_reg = parse_double(qual, val);
      else throw invalid_input("config: unknown key '" + qual + "'");
    } else if (section == "initial") {
      if (key == "kind") cfg.initial.kind = val;
      else if (key == "y0_override") cfg.initial.y0_override = parse_double(qual, val);
      else if (key == "theta_override") cfg.initial.theta_override = parse_double(qual, val);
      else if (key == "amplitude") cfg.initial.amplitude = parse_double(qual, val);
      else if (key == "path") cfg.initial.path = val;
      else throw invalid_input("config: unknown key '" + qual + "'");
    } else if (section == "solver") {
      if (key == "N") cfg.solver.N = parse_int(qual, val);
      else if (key == "gamma") cfg.solver.gamma = parse_double(qual, val);
      else if (key == "cfl") cfg.solver.cfl = parse_double(qual, val);
      else if (key == "t_end") cfg.solver.t_end = parse_double(qual, val);
      else if (key == "rho_max") cfg.solver.rho_max = parse_double(qual, val);
      else if (key == "dt_min") cfg.solver.dt_min = parse_double(qual, val);
      else if (key == "enforce_monotone") cfg.solver.enforce_monotone = parse_bool(qual, val);
      else throw invalid_input("config: unknown key '" + qual + "'");
    } else if (section == "verify") {
      if (key == "samples_per_region") cfg.verify.samples_per_region = parse_int(qual, val);
      else if (key == "time_samples") cfg.verify.time_samples = parse_int(qual, val);
      else throw invalid_input("config: unknown key '" + qual + "'");
    } else if (section == "scan") {
      if (key == "m1_range") cfg.scan.m1_range = parse_range(qual, val);
      else if (key == "m2_range") cfg.scan.m2_range = parse_range(qual, val);
      else if (key == "steps") cfg.scan.steps = parse_int(qual, val);
      else if (key == "mode") cfg.scan.mode = val;
      else throw invalid_input("config: unknown key '" + qual + "'");
    } else if (section == "output") {
      if (key == "directory") cfg.output.directory = val;
      else if (key == "cadence") cfg.output.cadence = parse_double(qual, val);
      else if (key == "seed") cfg.output.seed = parse_long(qual, val);
      else throw invalid_input("config: unknown key '" + qual + "'");
    } else {
      throw invalid_input("config: key '" + key + "' outside any section");
    }
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw invalid_input("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "[model]\n";
  os << "n = " << cfg.model.n << "\n";
  os << "R = " << g17(cfg.model.R) << "\n";
  os << "m1 = " << g17(cfg.model.m1) << "\n";
  os << "m2 = " << g17(cfg.model.m2) << "\n";
  os << "k1 = " << g17(cfg.model.k1) << "\n";
  os << "k2 = " << g17(cfg.model.k2) << "\n";
  os << "diffusion_reg = " << g17(cfg.model.diffusion_reg) << "\n";
  os << "\n[initial]\n";
  os << "kind = " << cfg.initial.kind << "\n";
  os << "y0_override = " << g17(cfg.initial.y0_override) << "\n";
  os << "theta_override = " << g17(cfg.initial.theta_override) << "\n";
  os << "amplitude = " << g17(cfg.initial.amplitude) << "\n";
  os << "path = " << cfg.initial.path << "\n";
  os << "\n[solver]\n";
  os << "N = " << cfg.solver.N << "\n";
  os << "gamma = " << g17(cfg.solver.gamma) << "\n";
  os << "cfl = " << g17(cfg.solver.cfl) << "\n";
  os << "t_end = " << g17(cfg.solver.t_end) << "\n";
  os << "rho_max = " << g17(cfg.solver.rho_max) << "\n";
  os << "dt_min = " << g17(cfg.solver.dt_min) << "\n";
  os << "enforce_monotone = " << (cfg.solver.enforce_monotone ? "true" : "false") << "\n";
  os << "\n[verify]\n";
  os << "samples_per_region = " << cfg.verify.samples_per_region << "\n";
  os << "time_samples = " << cfg.verify.time_samples << "\n";
  os << "\n[scan]\n";
  os << "m1_range = " << g17(cfg.scan.m1_range.lo) << ":" << g17(cfg.scan.m1_range.hi) << "\n";
  os << "m2_range = " << g17(cfg.scan.m2_range.lo) << ":" << g17(cfg.scan.m2_range.hi) << "\n";
  os << "steps = " << cfg.scan.steps << "\n";
  os << "mode = " << cfg.scan.mode << "\n";
  os << "\n[output]\n";
  os << "directory = " << cfg.output.directory << "\n";
  os << "cadence = " << g17(cfg.output.cadence) << "\n";
  os << "seed = " << cfg.output.seed << "\n";
  return os.str();
}

void validate_config(const RunConfig& cfg) {
  if (cfg.model.n < 3) throw invalid_input("config: model.n must be >= 3");
  if (!(cfg.model.R > 0)) throw invalid_input("config: model.R must be > 0");
  if (!(cfg.model.m1 > 1) || !(cfg.model.m2 > 1))
    throw invalid_input("config: model.m1/m2 must be > 1");
  if (!(cfg.model.k1 > 0) || !(cfg.model.k2 > 0))
    throw invalid_input("config: model.k1/k2 must be > 0");
  if (!(cfg.model.diffusion_reg > 0))
    throw invalid_input("config: model.diffusion_reg must be > 0");
  if (cfg.initial.kind != "constant" && cfg.initial.kind != "toy_subsolution" &&
      cfg.initial.kind != "file")
    throw invalid_input("config: initial.kind must be constant|toy_subsolution|file");
  if (!(cfg.initial.amplitude > 0))
    throw invalid_input("config: initial.amplitude must be > 0");
  if (!(cfg.initial.y0_override > 0))
    throw invalid_input("config: initial.y0_override must be > 0");
  if (cfg.initial.theta_override < 0)
    throw invalid_input("config: initial.theta_override must be >= 0");
  if (cfg.solver.N < 16) throw invalid_input("config: solver.N must be >= 16");
  if (!(cfg.solver.gamma >= 1)) throw invalid_input("config: solver.gamma must be >= 1");
  if (!(cfg.solver.cfl > 0)) throw invalid_input("config: solver.cfl must be > 0");
  if (!(cfg.solver.t_end > 0)) throw invalid_input("config: solver.t_end must be > 0");
  if (cfg.solver.rho_max < 0) throw invalid_input("config: solver.rho_max must be >= 0");
  if (cfg.solver.dt_min < 0) throw invalid_input("config: solver.dt_min must be >= 0");
  if (cfg.verify.samples_per_region < 0 || cfg.verify.time_samples < 0)
    throw invalid_input("config: verify sample counts must be >= 0");
  if (cfg.scan.steps < 1) throw invalid_input("config: scan.steps must be >= 1");
  if (!(cfg.scan.m1_range.hi >= cfg.scan.m1_range.lo) ||
      !(cfg.scan.m2_range.hi >= cfg.scan.m2_range.lo))
    throw invalid_input("config: scan ranges must be nonempty");
  if (!(cfg.scan.m1_range.lo > 1) || !(cfg.scan.m2_range.lo > 1))
    throw invalid_input("config: scan ranges must stay above 1");
  if (cfg.scan.mode != "theory" && cfg.scan.mode != "simulate" && cfg.scan.mode != "both")
    throw invalid_input("config: scan.mode must be theory|simulate|both");
  if (!(cfg.output.cadence > 0)) throw invalid_input("config: output.cadence must be > 0");
  if (cfg.output.directory.empty())
    throw invalid_input("config: output.directory must be set");
}

}  // namespace chemotax
