// wavekin command line: thin dispatcher over the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>

#include "wavekin/capi.h"

namespace {

int report(wk_status st) {
  if (st == WK_OK) return 0;
  std::fprintf(stderr, "wavekin: %s\n", wk_last_error());
  return st == WK_EINVAL ? 1 : 2;
}

struct ConfigHandle {
  wk_config* cfg = nullptr;
  ~ConfigHandle() { wk_config_free(cfg); }
};

int load_config(const std::string& path, ConfigHandle& handle) {
  return report(wk_config_load(path.c_str(), &handle.cfg));
}

int print_plan(const wk_config* cfg) {
  char* text = nullptr;
  const wk_status st = wk_config_plan(cfg, &text);
  if (st != WK_OK) return report(st);
  std::fputs(text, stdout);
  wk_string_free(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavekin: truncated stochastic three-wave lattice laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_path, eta = "sqrt2", n_list = "4,8,16";
  std::string order = "three_wave", mode = "denominators", m_index = "6,2", m_point = "1.2,0";
  std::string form;
  double z = 0.0, lambda = 0.0;
  int n_sigma = 400, census_N = 4;
  long long ensemble = 0;
  bool dry_run = false;

  auto* grid_cmd = app.add_subcommand("grid", "build the frequency lattice and dump it");
  grid_cmd->add_option("--config", config_path)->required();
  grid_cmd->add_option("--dump", out_path, "CSV path for the mode table")->required();

  auto* sample_cmd = app.add_subcommand("sample-check", "verify initial-law moments");
  sample_cmd->add_option("--config", config_path)->required();
  sample_cmd->add_option("--ensemble", ensemble, "override run.ensemble");
  sample_cmd->add_option("--out", out_path)->required();

  auto* sim_cmd = app.add_subcommand("simulate", "ensemble simulation, mean actions");
  sim_cmd->add_option("--config", config_path)->required();
  sim_cmd->add_flag("--dry-run", dry_run);

  auto* kin_cmd = app.add_subcommand("kinetic", "solve the linearized kinetic equation");
  kin_cmd->add_option("--config", config_path)->required();
  kin_cmd->add_option("--form", form, "lorentzian|resonant (overrides config)");
  kin_cmd->add_option("--lambda", lambda, "override lambda = 3 delta");
  kin_cmd->add_option("--out", out_path)->required();

  auto* cmp_cmd = app.add_subcommand("compare", "Theorem-4.1 fluctuation comparison");
  cmp_cmd->add_option("--config", config_path)->required();
  cmp_cmd->add_flag("--dry-run", dry_run);

  auto* flat_cmd = app.add_subcommand("flatness", "Theorem-4.2 action preservation");
  flat_cmd->add_option("--config", config_path)->required();
  flat_cmd->add_flag("--dry-run", dry_run);

  auto* census_cmd = app.add_subcommand("census", "exact resonance analysis");
  census_cmd->add_option("--mode", mode, "denominators|modulus|curve");
  census_cmd->add_option("--eta", eta, "exact eta, e.g. 1, sqrt2, 27/10");
  census_cmd->add_option("--N", n_list, "comma-separated N list (denominators)");
  census_cmd->add_option("--order", order, "three_wave|four_wave_offres");
  census_cmd->add_option("--m-index", m_index, "base mode indices i,j (modulus)");
  census_cmd->add_option("--census-grid-N", census_N, "lattice N for modulus mode");
  census_cmd->add_option("--m", m_point, "base point m_x,m_y (curve)");
  census_cmd->add_option("--z", z, "level z (curve)");
  census_cmd->add_option("--n-sigma", n_sigma, "nodes per interval piece (curve)");
  census_cmd->add_option("--config", config_path, "optional domain override");
  census_cmd->add_option("--out", out_path)->required();

  auto* plot_cmd = app.add_subcommand("plot", "re-render SVG plots of a run directory");
  plot_cmd->add_option("--in", out_path, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  ConfigHandle cfg;
  if (!config_path.empty()) {
    const int rc = load_config(config_path, cfg);
    if (rc != 0) return rc;
  }

  if (grid_cmd->parsed()) {
    wk_grid* grid = nullptr;
    if (const int rc = report(wk_grid_create(cfg.cfg, &grid)); rc != 0) return rc;
    const int rc = report(wk_grid_dump_csv(grid, out_path.c_str()));
    wk_grid_free(grid);
    return rc;
  }
  if (sample_cmd->parsed())
    return report(wk_run_sample_check(cfg.cfg, ensemble, out_path.c_str()));
  if (sim_cmd->parsed()) {
    if (dry_run) {
      if (const int rc = report(wk_config_validate(cfg.cfg, 0)); rc != 0) return rc;
      return print_plan(cfg.cfg);
    }
    return report(wk_run_simulate(cfg.cfg));
  }
  if (kin_cmd->parsed())
    return report(wk_run_kinetic(cfg.cfg, form.empty() ? nullptr : form.c_str(),
                                 lambda, out_path.c_str()));
  if (cmp_cmd->parsed()) {
    if (dry_run) {
      if (const int rc = report(wk_config_validate(cfg.cfg, 1)); rc != 0) return rc;
      return print_plan(cfg.cfg);
    }
    return report(wk_run_compare(cfg.cfg));
  }
  if (flat_cmd->parsed()) {
    if (dry_run) {
      if (const int rc = report(wk_config_validate(cfg.cfg, 0)); rc != 0) return rc;
      return print_plan(cfg.cfg);
    }
    return report(wk_run_flatness(cfg.cfg));
  }
  if (census_cmd->parsed()) {
    if (mode == "denominators")
      return report(wk_census_denominators(eta.c_str(), n_list.c_str(), order.c_str(),
                                           cfg.cfg, out_path.c_str()));
    if (mode == "modulus") {
      int mi = 0, mj = 0;
      if (std::sscanf(m_index.c_str(), "%d,%d", &mi, &mj) != 2) {
        std::fprintf(stderr, "wavekin: --m-index expects i,j\n");
        return 1;
      }
      return report(
          wk_census_modulus(eta.c_str(), mi, mj, census_N, cfg.cfg, out_path.c_str()));
    }
    if (mode == "curve") {
      double mx = 0.0, my = 0.0;
      if (std::sscanf(m_point.c_str(), "%lf,%lf", &mx, &my) != 2) {
        std::fprintf(stderr, "wavekin: --m expects m_x,m_y\n");
        return 1;
      }
      return report(wk_census_curve(mx, my, z, n_sigma, cfg.cfg, out_path.c_str()));
    }
    std::fprintf(stderr, "wavekin: unknown census mode '%s'\n", mode.c_str());
    return 1;
  }
  if (plot_cmd->parsed()) return report(wk_replot(out_path.c_str()));
  return 1;
}
