// Command-line front end: classify, params, verify, simulate, scan, compare.

#include <CLI11.hpp>
#include <iostream>

#include "chemotax/harness.hpp"

using namespace chemotax;

int main(int argc, char** argv) {
  CLI::App app{"two-species chemotaxis blow-up toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  CliOverrides ov;
  double m1 = 0, m2 = 0, alpha = 0, beta = 0, delta = 0;
  int n = 0;
  std::string out;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (sectioned key=value)");
    sub->add_option("--m1", m1, "override model.m1")->check(CLI::PositiveNumber);
    sub->add_option("--m2", m2, "override model.m2")->check(CLI::PositiveNumber);
    sub->add_option("--n", n, "override model.n");
    sub->add_option("--out", out, "override output.directory");
    return sub;
  };
  auto add_exponents = [&](CLI::App* sub) {
    sub->add_option("--alpha", alpha, "fix the first decay exponent");
    sub->add_option("--beta", beta, "fix the second decay exponent");
    sub->add_option("--delta", delta, "fix the trajectory exponent");
    return sub;
  };

  CLI::App* c_classify = add_common(app.add_subcommand("classify", "region and critical-curve predicates"));
  CLI::App* c_params = add_exponents(add_common(app.add_subcommand("params", "derive the constant chain")));
  CLI::App* c_verify = add_exponents(add_common(app.add_subcommand("verify", "sample the comparison inequalities")));
  CLI::App* c_simulate = add_common(app.add_subcommand("simulate", "integrate the mass system"));
  CLI::App* c_scan = add_common(app.add_subcommand("scan", "map the (m1, m2) phase plane"));
  CLI::App* c_compare = add_exponents(add_common(app.add_subcommand("compare", "ordering and dominance experiments")));
  bool toy = false;
  c_params->add_flag("--toy", toy, "apply the toy y0/theta overrides");
  c_verify->add_flag("--toy", toy, "apply the toy y0/theta overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (c_classify->count("--m1") || c_params->count("--m1") || c_verify->count("--m1") ||
        c_simulate->count("--m1") || c_scan->count("--m1") || c_compare->count("--m1"))
      ov.m1 = m1;
    if (c_classify->count("--m2") || c_params->count("--m2") || c_verify->count("--m2") ||
        c_simulate->count("--m2") || c_scan->count("--m2") || c_compare->count("--m2"))
      ov.m2 = m2;
    if (c_classify->count("--n") || c_params->count("--n") || c_verify->count("--n") ||
        c_simulate->count("--n") || c_scan->count("--n") || c_compare->count("--n"))
      ov.n = n;
    if (c_classify->count("--out") || c_params->count("--out") || c_verify->count("--out") ||
        c_simulate->count("--out") || c_scan->count("--out") || c_compare->count("--out"))
      ov.out = out;
    if (c_params->count("--alpha") || c_verify->count("--alpha") || c_compare->count("--alpha"))
      ov.alpha = alpha;
    if (c_params->count("--beta") || c_verify->count("--beta") || c_compare->count("--beta"))
      ov.beta = beta;
    if (c_params->count("--delta") || c_verify->count("--delta") || c_compare->count("--delta"))
      ov.delta = delta;
    ov.toy_verify = toy;
    cfg = apply_overrides(cfg, ov);

    if (*c_classify) return cmd_classify(cfg, std::cout);
    if (*c_params) return cmd_params(cfg, ov, std::cout);
    if (*c_verify) return cmd_verify(cfg, ov, std::cout);
    if (*c_simulate) return cmd_simulate(cfg, std::cout);
    if (*c_scan) return cmd_scan(cfg, std::cout);
    if (*c_compare) return cmd_compare(cfg, ov, std::cout);
    return 2;
  } catch (const invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
