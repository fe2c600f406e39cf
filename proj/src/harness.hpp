#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "census.hpp"
#include "domain.hpp"
#include "dynamics.hpp"
#include "kinetic.hpp"
#include "measures.hpp"

namespace wavekin {

struct ExperimentConfig {
  DomainSpec domain{0.5, 2.0, 1.5, 0.15};
  int N = 16;
  std::string eta_text = "1";
  double eps = 0.2;
  double delta = 0.3;
  double alpha = 1.0;
  PerturbationProfile g0;

  double T = 0.5;  // rescaled horizon
  double dt = 0.05;
  long long ensemble = 100000;
  uint64_t seed = 1;
  bool coupled = true;
  long long save_every = 20;
  int workers = 0;  // 0 -> hardware concurrency
  std::string init = "product";
  int integrator_order = 2;
  std::string backend = "fft";
  double conservation_tol = 1e-6;

  double h = 0.25;
  bool override_h_constraint = false;

  double kin_dx = 0.05;
  double kin_dtau = 0.01;
  int n_sigma = 400;
  std::string kin_form = "lorentzian";

  std::string outdir = "runs/out";

  double eta() const;
  std::optional<EtaExact> eta_exact() const { return EtaExact::parse(eta_text); }

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  std::string to_json_text() const;

  /// Throws std::invalid_argument naming the violated invariant. theorem1
  /// additionally enforces 1 <= alpha <= 2, delta > 0 and h <= delta^2
  /// (unless overridden). Returns human-readable warnings.
  std::vector<std::string> validate(bool theorem1) const;
};

struct EnsembleStats {
  std::vector<double> save_times;
  // Per save, per mode.
  std::vector<std::vector<double>> action_mean, action_se;
  std::vector<std::vector<double>> diff_mean, diff_se;  // coupled runs only
  // Per save, per D+ coarse cell: member-level coarse fluctuation stats,
  // already rescaled by N^alpha and divided by h^2 N^2.
  std::vector<std::vector<double>> cellF_mean, cellF_se;
  long long members = 0;
  bool coupled = false;
  int workers_used = 1;
};

/// Runs the ensemble with a deterministic block reduction: partial sums are
/// accumulated member-by-member inside fixed 64-member blocks and merged in
/// block order, so results are bitwise independent of the worker count.
EnsembleStats run_ensemble(const ExperimentConfig& cfg, const FrequencyGrid& grid,
                           const CoarsePartition& part);

struct FluctuationSeries {
  std::vector<double> t;
  std::vector<double> tau;                       // pi eps^2 t
  std::vector<std::vector<double>> F_mode;       // N^alpha (E|V|^2 - gamma)
  std::vector<std::vector<double>> F_mode_se;
  std::vector<std::vector<double>> F_cell;
  std::vector<std::vector<double>> F_cell_se;
};

FluctuationSeries compute_fluctuations(const EnsembleStats& stats,
                                       const ExperimentConfig& cfg,
                                       const FrequencyGrid& grid,
                                       const CoarsePartition& part);

struct KineticPrediction {
  std::vector<double> tau;
  std::vector<std::vector<double>> f_cell;   // coarse-grained at lattice points
  std::vector<std::vector<double>> f_nodes;  // mesh nodal values
  double op_norm = 0.0;
  int mesh_nodes = 0;
};

/// Solves the linearized kinetic equation from f(0) = g0 and coarse-grains it
/// through the lattice (bilinear evaluation at lattice points, then the
/// h^2 N^2 average). form: "lorentzian" (lambda = 3 delta) or "resonant".
KineticPrediction kinetic_prediction(const ExperimentConfig& cfg,
                                     const FrequencyGrid& grid,
                                     const CoarsePartition& part,
                                     const std::vector<double>& taus,
                                     const std::string& form);

struct ComparisonReport {
  EnsembleStats stats;
  FluctuationSeries fluct;
  KineticPrediction kin;
  std::optional<KineticPrediction> kin_resonant;  // Corollary contrast path
  std::vector<double> sup_err;                    // per save
  std::vector<double> max_cell_se;                // per save
  double budget_eps_term = 0.0;   // eps / (h delta^2)
  double budget_grid_term = 0.0;  // 1 / (h delta N)
  double budget_tail_term = 0.0;  // delta / N^(2 - alpha)
  std::vector<std::string> warnings;
};

ComparisonReport compare_theorem1(const ExperimentConfig& cfg);

struct FlatnessReport {
  EnsembleStats stats;
  FluctuationSeries fluct;
  std::vector<double> g0_cell;        // g0 at cell corners K
  std::vector<double> flat_sup;       // per save: sup_K |F_K - g0(K)|
  std::vector<double> kinetic_drift;  // per save: sup_K |f_res^{N,h} - g0(K)|
  std::vector<double> max_cell_se;
  KineticPrediction kin;
  double min_three_wave_denominator = 0.0;
  long long exact_three_wave_zeros = -1;
  std::vector<std::string> warnings;
};

FlatnessReport flatness_theorem2(const ExperimentConfig& cfg);

/// Output emission (CSV schemas fixed; SVG plots are static).
void emit_compare_outputs(const ExperimentConfig& cfg, const ComparisonReport& report,
                          const FrequencyGrid& grid, const CoarsePartition& part);
void emit_flatness_outputs(const ExperimentConfig& cfg, const FlatnessReport& report,
                           const FrequencyGrid& grid, const CoarsePartition& part);
void emit_simulate_outputs(const ExperimentConfig& cfg, const EnsembleStats& stats,
                           const FrequencyGrid& grid);
void emit_manifest(const ExperimentConfig& cfg, const std::string& outdir,
                   double wall_seconds);

/// Re-renders the SVG plots of a finished run directory from its CSV files.
void replot(const std::string& outdir);

}  // namespace wavekin
