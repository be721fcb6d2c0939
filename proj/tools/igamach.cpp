// igamach: batch driver for the verification, inf-sup, solve and EMF studies.

#include "iga/config.hpp"
#include "iga/errors.hpp"
#include "iga/studies.hpp"
#include "iga/substructuring.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Isogeometric magnetostatics with harmonic stator-rotor coupling"};
  std::string config, out;
  int threads = 1;
  long long seed = 0;
  bool verbose = false;
  app.add_option("--config", config, "run configuration (YAML)")->required()->envname("IGAMACH_CONFIG");
  app.add_option("--out", out, "output directory (overrides the config)")->envname("IGAMACH_OUT");
  app.add_option("--threads", threads, "worker threads for independent sub-runs")
      ->check(CLI::PositiveNumber)
      ->envname("IGAMACH_THREADS");
  app.add_option("--seed", seed, "reserved; no study is randomized")->envname("IGAMACH_SEED");
  app.add_flag("--verbose", verbose, "progress on stderr")->envname("IGAMACH_VERBOSE");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    iga::RunConfig cfg = iga::load_config(config);
    if (!out.empty()) cfg.output = out;
    const int rc = iga::run_study(cfg, iga::CommandOptions{threads, verbose});
    if (rc != 0) std::cerr << "igamach: " << iga::study_name(cfg.study) << " gate failed; see " << cfg.output << "\n";
    return rc;
  } catch (const iga::ConfigError& e) {
    std::cerr << "igamach: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const iga::DNDivergence& e) {
    std::cerr << "igamach: " << e.what() << "\nk,eps_rt,eps_st\n";
    for (const auto& r : e.history()) std::cerr << r.k << "," << r.eps_rt << "," << r.eps_st << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "igamach: " << e.what() << "\n";
    return 3;
  }
}
