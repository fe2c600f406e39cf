#include "harness.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include "io_util.hpp"

namespace wavekin {

using nlohmann::json;

double ExperimentConfig::eta() const {
  if (auto e = EtaExact::parse(eta_text)) return e->to_double();
  try {
    return std::stod(eta_text);
  } catch (...) {
    throw std::invalid_argument("config: cannot parse eta '" + eta_text + "'");
  }
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  if (j.contains("domain")) {
    const auto& d = j["domain"];
    c.domain.a = d.value("a", c.domain.a);
    c.domain.b = d.value("b", c.domain.b);
    c.domain.c = d.value("c", c.domain.c);
    c.domain.w = d.value("w", c.domain.w);
  }
  if (j.contains("grid")) c.N = j["grid"].value("N", c.N);
  if (j.contains("physics")) {
    const auto& p = j["physics"];
    if (p.contains("eta")) {
      if (p["eta"].is_string())
        c.eta_text = p["eta"].get<std::string>();
      else
        c.eta_text = json(p["eta"]).dump();
    }
    c.eps = p.value("eps", c.eps);
    c.delta = p.value("delta", c.delta);
    c.alpha = p.value("alpha", c.alpha);
  }
  if (j.contains("g0")) {
    const auto& g = j["g0"];
    const std::string kind = g.value("kind", std::string("gaussian_bump"));
    if (kind != "gaussian_bump")
      throw std::invalid_argument("config: unknown g0 kind '" + kind + "'");
    c.g0.amplitude = g.value("amplitude", c.g0.amplitude);
    if (g.contains("center")) {
      c.g0.x0 = g["center"].at(0).get<double>();
      c.g0.y0 = g["center"].at(1).get<double>();
    }
    c.g0.width = g.value("width", c.g0.width);
  }
  if (j.contains("run")) {
    const auto& r = j["run"];
    c.T = r.value("T", c.T);
    c.dt = r.value("dt", c.dt);
    c.ensemble = r.value("ensemble", c.ensemble);
    c.seed = r.value("seed", c.seed);
    c.coupled = r.value("coupled", c.coupled);
    c.save_every = r.value("save_every", c.save_every);
    c.workers = r.value("workers", c.workers);
    c.init = r.value("init", c.init);
    c.integrator_order = r.value("order", c.integrator_order);
    c.backend = r.value("backend", c.backend);
    c.conservation_tol = r.value("conservation_tol", c.conservation_tol);
  }
  if (j.contains("coarse")) {
    const auto& co = j["coarse"];
    c.h = co.value("h", c.h);
    c.override_h_constraint = co.value("override_h_constraint", c.override_h_constraint);
  }
  if (j.contains("kinetic")) {
    const auto& k = j["kinetic"];
    c.kin_dx = k.value("mesh_dx", c.kin_dx);
    c.kin_dtau = k.value("dtau", c.kin_dtau);
    c.n_sigma = k.value("n_sigma", c.n_sigma);
    c.kin_form = k.value("form", c.kin_form);
  }
  c.outdir = j.value("outdir", c.outdir);
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_json_text(read_text_file(path));
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["domain"] = {{"a", domain.a}, {"b", domain.b}, {"c", domain.c}, {"w", domain.w}};
  j["grid"] = {{"N", N}};
  j["physics"] = {{"eta", eta_text}, {"eps", eps}, {"delta", delta}, {"alpha", alpha}};
  j["g0"] = {{"kind", "gaussian_bump"},
             {"amplitude", g0.amplitude},
             {"center", {g0.x0, g0.y0}},
             {"width", g0.width}};
  j["run"] = {{"T", T},
              {"dt", dt},
              {"ensemble", ensemble},
              {"seed", seed},
              {"coupled", coupled},
              {"save_every", save_every},
              {"workers", workers},
              {"init", init},
              {"order", integrator_order},
              {"backend", backend},
              {"conservation_tol", conservation_tol}};
  j["coarse"] = {{"h", h}, {"override_h_constraint", override_h_constraint}};
  j["kinetic"] = {{"mesh_dx", kin_dx},
                  {"dtau", kin_dtau},
                  {"n_sigma", n_sigma},
                  {"form", kin_form}};
  j["outdir"] = outdir;
  return j.dump(2);
}

std::vector<std::string> ExperimentConfig::validate(bool theorem1) const {
  std::vector<std::string> warnings;
  domain.validate_for_interaction();
  if (N < 1) throw std::invalid_argument("config: grid.N must be >= 1");
  if (!(eta() > 0.0)) throw std::invalid_argument("config: physics.eta must be > 0");
  if (!(eps >= 0.0)) throw std::invalid_argument("config: physics.eps must be >= 0");
  if (!(delta >= 0.0)) throw std::invalid_argument("config: physics.delta must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("config: run.dt must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("config: run.T must be > 0");
  if (ensemble < 1) throw std::invalid_argument("config: run.ensemble must be >= 1");
  if (save_every < 1) throw std::invalid_argument("config: run.save_every must be >= 1");
  if (init != "invariant" && init != "product" && init != "mixture")
    throw std::invalid_argument("config: run.init must be invariant|product|mixture");
  if (backend != "fft" && backend != "direct")
    throw std::invalid_argument("config: run.backend must be fft|direct");
  if (h < 1.0 / N)
    throw std::invalid_argument("config: coarse.h must satisfy h >= 1/N");
  if (!(kin_dx > 0.0) || !(kin_dtau > 0.0) || n_sigma < 1)
    throw std::invalid_argument("config: kinetic settings must be positive");
  if (kin_form != "lorentzian" && kin_form != "resonant" && kin_form != "both")
    throw std::invalid_argument("config: kinetic.form must be lorentzian|resonant|both");
  if (theorem1) {
    if (!(alpha >= 1.0 && alpha <= 2.0))
      throw std::invalid_argument("config: theorem-1 runs need 1 <= alpha <= 2");
    if (!(delta > 0.0))
      throw std::invalid_argument("config: theorem-1 runs need delta > 0");
    if (h > delta * delta && !override_h_constraint)
      throw std::invalid_argument(
          "config: h <= delta^2 violated (set coarse.override_h_constraint to "
          "proceed)");
    if (h > delta * delta && override_h_constraint)
      warnings.push_back("h <= delta^2 is violated and overridden: h=" +
                         std::to_string(h) + ", delta^2=" + std::to_string(delta * delta));
  }
  if (!coupled) {
    const double r_needed = 100.0 * std::pow(static_cast<double>(N), 2.0 * alpha);
    if (static_cast<double>(ensemble) < r_needed)
      warnings.push_back("uncoupled mode: ensemble below the 100 N^(2 alpha) "
                         "noise threshold (" +
                         std::to_string(static_cast<long long>(r_needed)) + ")");
  }
  return warnings;
}

namespace {

constexpr long long kBlock = 64;

struct BlockPartial {
  // Indexed [save][mode] and [save][cell].
  std::vector<std::vector<double>> a_sum, a_sumsq, d_sum, d_sumsq;
  std::vector<std::vector<double>> c_sum, c_sumsq;
  long long members = 0;

  void init(size_t saves, size_t modes, size_t cells, bool coupled) {
    auto zero = [&](std::vector<std::vector<double>>& v, size_t inner) {
      v.assign(saves, std::vector<double>(inner, 0.0));
    };
    zero(a_sum, modes);
    zero(a_sumsq, modes);
    if (coupled) {
      zero(d_sum, modes);
      zero(d_sumsq, modes);
    }
    zero(c_sum, cells);
    zero(c_sumsq, cells);
    members = 0;
  }

  void merge_into(BlockPartial& total) const {
    auto add = [](std::vector<std::vector<double>>& dst,
                  const std::vector<std::vector<double>>& src) {
      for (size_t i = 0; i < src.size(); ++i)
        for (size_t k = 0; k < src[i].size(); ++k) dst[i][k] += src[i][k];
    };
    add(total.a_sum, a_sum);
    add(total.a_sumsq, a_sumsq);
    if (!d_sum.empty()) {
      add(total.d_sum, d_sum);
      add(total.d_sumsq, d_sumsq);
    }
    add(total.c_sum, c_sum);
    add(total.c_sumsq, c_sumsq);
    total.members += members;
  }
};

struct SaveSchedule {
  uint64_t n_steps = 0;
  std::vector<uint64_t> steps;  // saved steps including 0 and n_steps
  std::vector<double> times;
};

SaveSchedule make_schedule(double t_end, double dt, long long save_every) {
  SaveSchedule s;
  s.n_steps = std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(t_end / dt)));
  for (uint64_t k = 0; k <= s.n_steps; k += save_every) s.steps.push_back(k);
  if (s.steps.back() != s.n_steps) s.steps.push_back(s.n_steps);
  for (uint64_t k : s.steps) s.times.push_back(static_cast<double>(k) * dt);
  return s;
}

}  // namespace

EnsembleStats run_ensemble(const ExperimentConfig& cfg, const FrequencyGrid& grid,
                           const CoarsePartition& part) {
  if (grid.empty()) throw std::invalid_argument("ensemble: empty grid");
  const double t_end_requested = cfg.T;  // callers pass the physical horizon via T
  const SaveSchedule sched = make_schedule(t_end_requested, cfg.dt, cfg.save_every);
  const size_t n_saves = sched.steps.size();
  const size_t n_modes = static_cast<size_t>(grid.mode_count());
  const size_t n_cells = static_cast<size_t>(part.cell_count());
  const double n_alpha = std::pow(static_cast<double>(cfg.N), cfg.alpha);
  const double cell_div = part.divisor();

  IntegratorConfig icfg;
  icfg.dt = cfg.dt;
  icfg.eps = cfg.eps;
  icfg.delta = cfg.delta;
  icfg.backend = cfg.backend == "fft" ? ConvBackend::Fft : ConvBackend::Direct;
  icfg.conservation_tol = cfg.conservation_tol;
  icfg.order = cfg.integrator_order;

  const long long R = cfg.ensemble;
  const long long n_blocks = (R + kBlock - 1) / kBlock;
  int workers = cfg.workers > 0
                    ? cfg.workers
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<long long>(workers, n_blocks));

  BlockPartial total;
  total.init(n_saves, n_modes, n_cells, cfg.coupled);

  std::mutex merge_mutex;
  std::condition_variable merge_cv;
  long long next_to_merge = 0;
  std::map<long long, BlockPartial> pending;
  std::atomic<long long> next_block{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker_fn = [&]() {
    try {
      MemberIntegrator integ(grid, icfg);
      std::vector<std::vector<double>> snap(n_saves, std::vector<double>(n_modes));
      std::vector<double> gamma(n_modes);
      for (size_t s = 0; s < n_modes; ++s) gamma[s] = grid.mode(s).gamma;

      for (;;) {
        const long long b = next_block.fetch_add(1);
        if (b >= n_blocks) break;
        BlockPartial partial;
        partial.init(n_saves, n_modes, n_cells, cfg.coupled);
        const long long lo = b * kBlock;
        const long long hi = std::min<long long>(R, lo + kBlock);
        for (long long member = lo; member < hi; ++member) {
          const auto mid = static_cast<uint32_t>(member);
          RngStream init_stream(cfg.seed, mid, StreamPurpose::Init);
          RngStream mix_stream(cfg.seed, mid, StreamPurpose::Mixture);
          NoiseStream noise(cfg.seed, mid, cfg.delta);

          ModeField pert;
          std::optional<ModeField> base;
          if (cfg.init == "invariant") {
            pert = sample_invariant(grid, init_stream);
            if (cfg.coupled) base = pert;
          } else if (cfg.init == "product") {
            auto draw =
                sample_perturbed_product(grid, cfg.g0, cfg.alpha, init_stream, cfg.coupled);
            pert = std::move(draw.field);
            if (cfg.coupled) base = std::move(draw.baseline);
          } else {
            pert = sample_perturbed_mixture(grid, cfg.g0, mix_stream, init_stream);
            if (cfg.coupled) base = sample_invariant(grid, init_stream);
          }

          integ.run(pert, noise, sched.n_steps, cfg.save_every,
                    [&](int si, double, const ModeField& f) {
                      auto& row = snap[si];
                      for (size_t s = 0; s < n_modes; ++s) row[s] = std::norm(f.v[s]);
                    });
          if (cfg.coupled) {
            integ.run(*base, noise, sched.n_steps, cfg.save_every,
                      [&](int si, double, const ModeField& f) {
                        auto& row = snap[si];
                        auto& ds = partial.d_sum[si];
                        auto& ds2 = partial.d_sumsq[si];
                        auto& cs = partial.c_sum[si];
                        auto& cs2 = partial.c_sumsq[si];
                        for (size_t s = 0; s < n_modes; ++s) {
                          const double diff = row[s] - std::norm(f.v[s]);
                          ds[s] += diff;
                          ds2[s] += diff * diff;
                        }
                        for (size_t ci = 0; ci < n_cells; ++ci) {
                          double acc = 0.0;
                          for (int32_t s : part.cell(ci).slots)
                            acc += row[s] - std::norm(f.v[s]);
                          const double val = n_alpha * acc / cell_div;
                          cs[ci] += val;
                          cs2[ci] += val * val;
                        }
                      });
          }
          for (size_t si = 0; si < n_saves; ++si) {
            auto& as = partial.a_sum[si];
            auto& as2 = partial.a_sumsq[si];
            const auto& row = snap[si];
            for (size_t s = 0; s < n_modes; ++s) {
              as[s] += row[s];
              as2[s] += row[s] * row[s];
            }
            if (!cfg.coupled) {
              auto& cs = partial.c_sum[si];
              auto& cs2 = partial.c_sumsq[si];
              for (size_t ci = 0; ci < n_cells; ++ci) {
                double acc = 0.0;
                for (int32_t s : part.cell(ci).slots) acc += row[s] - gamma[s];
                const double val = n_alpha * acc / cell_div;
                cs[ci] += val;
                cs2[ci] += val * val;
              }
            }
          }
          ++partial.members;
        }
        {
          std::unique_lock<std::mutex> lock(merge_mutex);
          pending.emplace(b, std::move(partial));
          while (!pending.empty() && pending.begin()->first == next_to_merge) {
            pending.begin()->second.merge_into(total);
            pending.erase(pending.begin());
            ++next_to_merge;
          }
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  EnsembleStats out;
  out.save_times = sched.times;
  out.members = total.members;
  out.coupled = cfg.coupled;
  out.workers_used = workers;
  const double Rd = static_cast<double>(total.members);
  auto finalize = [&](const std::vector<std::vector<double>>& sum,
                      const std::vector<std::vector<double>>& sumsq,
                      std::vector<std::vector<double>>& mean,
                      std::vector<std::vector<double>>& se) {
    mean.assign(sum.size(), {});
    se.assign(sum.size(), {});
    for (size_t i = 0; i < sum.size(); ++i) {
      mean[i].resize(sum[i].size());
      se[i].resize(sum[i].size());
      for (size_t k = 0; k < sum[i].size(); ++k) {
        const double mu = sum[i][k] / Rd;
        mean[i][k] = mu;
        const double var = std::max(0.0, sumsq[i][k] / Rd - mu * mu);
        se[i][k] = std::sqrt(var / Rd);
      }
    }
  };
  finalize(total.a_sum, total.a_sumsq, out.action_mean, out.action_se);
  if (cfg.coupled) finalize(total.d_sum, total.d_sumsq, out.diff_mean, out.diff_se);
  finalize(total.c_sum, total.c_sumsq, out.cellF_mean, out.cellF_se);
  return out;
}

FluctuationSeries compute_fluctuations(const EnsembleStats& stats,
                                       const ExperimentConfig& cfg,
                                       const FrequencyGrid& grid,
                                       const CoarsePartition& part) {
  FluctuationSeries out;
  out.t = stats.save_times;
  const double n_alpha = std::pow(static_cast<double>(cfg.N), cfg.alpha);
  for (double t : out.t) out.tau.push_back(M_PI * cfg.eps * cfg.eps * t);
  const size_t n_saves = stats.save_times.size();
  const size_t n_modes = static_cast<size_t>(grid.mode_count());
  out.F_mode.assign(n_saves, std::vector<double>(n_modes));
  out.F_mode_se.assign(n_saves, std::vector<double>(n_modes));
  for (size_t si = 0; si < n_saves; ++si) {
    for (size_t s = 0; s < n_modes; ++s) {
      if (stats.coupled) {
        out.F_mode[si][s] = n_alpha * stats.diff_mean[si][s];
        out.F_mode_se[si][s] = n_alpha * stats.diff_se[si][s];
      } else {
        out.F_mode[si][s] = n_alpha * (stats.action_mean[si][s] - grid.mode(s).gamma);
        out.F_mode_se[si][s] = n_alpha * stats.action_se[si][s];
      }
    }
  }
  out.F_cell = stats.cellF_mean;
  out.F_cell_se = stats.cellF_se;
  (void)part;
  return out;
}

namespace {

std::vector<std::vector<double>> solve_at(const KineticOperator& op,
                                          std::vector<double> f,
                                          const std::vector<double>& taus, double dtau) {
  std::vector<std::vector<double>> states;
  double tau_now = 0.0;
  states.reserve(taus.size());
  for (double target : taus) {
    const double span = target - tau_now;
    if (span > 1e-14) {
      auto traj = solve_kinetic(op, f, span, dtau, 1 << 30);
      f = traj.states.back();
    }
    tau_now = target;
    states.push_back(f);
  }
  return states;
}

}  // namespace

KineticPrediction kinetic_prediction(const ExperimentConfig& cfg,
                                     const FrequencyGrid& grid,
                                     const CoarsePartition& part,
                                     const std::vector<double>& taus,
                                     const std::string& form) {
  KineticMesh mesh(cfg.domain, cfg.kin_dx);
  const DispersionParams params{cfg.eta()};
  auto f0 = mesh.project(
      [&](Point2 q) { return cfg.g0.eval(q, cfg.domain); });
  KineticOperator op =
      form == "resonant"
          ? assemble_resonant(mesh, params, cfg.n_sigma)
          : assemble_lorentzian(mesh, params, 3.0 * cfg.delta);
  KineticPrediction pred;
  pred.op_norm = op.norm_inf();
  pred.mesh_nodes = mesh.node_count();
  pred.tau = taus;
  pred.f_nodes = solve_at(op, f0, taus, cfg.kin_dtau);
  // Coarse-grain through the lattice with the same h^2 N^2 convention.
  std::vector<double> at_modes(grid.mode_count());
  for (const auto& state : pred.f_nodes) {
    for (int s = 0; s < grid.mode_count(); ++s)
      at_modes[s] = mesh.eval(state, {grid.mode(s).kx, grid.mode(s).ky});
    pred.f_cell.push_back(part.average(at_modes));
  }
  return pred;
}

ComparisonReport compare_theorem1(const ExperimentConfig& cfg) {
  ComparisonReport report;
  report.warnings = cfg.validate(true);
  FrequencyGrid grid(cfg.domain, {cfg.eta()}, cfg.N);
  if (grid.empty()) throw std::invalid_argument("compare: empty grid");
  CoarsePartition part(grid, cfg.h);

  if (!(cfg.eps > 0.0))
    throw std::invalid_argument("compare: theorem-1 runs need eps > 0");
  ExperimentConfig run_cfg = cfg;
  run_cfg.T = cfg.T / (M_PI * cfg.eps * cfg.eps);  // physical horizon
  report.stats = run_ensemble(run_cfg, grid, part);
  report.fluct = compute_fluctuations(report.stats, cfg, grid, part);

  report.kin = kinetic_prediction(cfg, grid, part, report.fluct.tau, "lorentzian");
  if (cfg.kin_form == "both" || cfg.kin_form == "resonant")
    report.kin_resonant =
        kinetic_prediction(cfg, grid, part, report.fluct.tau, "resonant");

  for (size_t si = 0; si < report.fluct.t.size(); ++si) {
    double sup = 0.0, sup_se = 0.0;
    for (size_t ci = 0; ci < report.fluct.F_cell[si].size(); ++ci) {
      sup = std::max(sup,
                     std::fabs(report.fluct.F_cell[si][ci] - report.kin.f_cell[si][ci]));
      sup_se = std::max(sup_se, report.fluct.F_cell_se[si][ci]);
    }
    report.sup_err.push_back(sup);
    report.max_cell_se.push_back(sup_se);
  }
  report.budget_eps_term = cfg.eps / (cfg.h * cfg.delta * cfg.delta);
  report.budget_grid_term = 1.0 / (cfg.h * cfg.delta * cfg.N);
  report.budget_tail_term = cfg.delta / std::pow(static_cast<double>(cfg.N), 2.0 - cfg.alpha);
  return report;
}

FlatnessReport flatness_theorem2(const ExperimentConfig& cfg) {
  FlatnessReport report;
  report.warnings = cfg.validate(false);
  if (cfg.delta != 0.0)
    throw std::invalid_argument("flatness: theorem-2 runs need delta = 0");
  FrequencyGrid grid(cfg.domain, {cfg.eta()}, cfg.N);
  if (grid.empty()) throw std::invalid_argument("flatness: empty grid");
  CoarsePartition part(grid, cfg.h);

  if (!(cfg.eps > 0.0))
    throw std::invalid_argument("flatness: need eps > 0 for the T / eps^2 horizon");
  ExperimentConfig run_cfg = cfg;
  run_cfg.T = cfg.T / (cfg.eps * cfg.eps);  // deterministic horizon T / eps^2
  report.stats = run_ensemble(run_cfg, grid, part);
  report.fluct = compute_fluctuations(report.stats, cfg, grid, part);

  for (int ci = 0; ci < part.cell_count(); ++ci) {
    const auto& cell = part.cell(ci);
    report.g0_cell.push_back(cfg.g0.eval({cell.Kx, cell.Ky}, cfg.domain));
  }

  report.kin = kinetic_prediction(cfg, grid, part, report.fluct.tau, "resonant");

  for (size_t si = 0; si < report.fluct.t.size(); ++si) {
    double flat = 0.0, drift = 0.0, sup_se = 0.0;
    for (size_t ci = 0; ci < report.fluct.F_cell[si].size(); ++ci) {
      flat = std::max(flat, std::fabs(report.fluct.F_cell[si][ci] - report.g0_cell[ci]));
      drift = std::max(drift, std::fabs(report.kin.f_cell[si][ci] - report.g0_cell[ci]));
      sup_se = std::max(sup_se, report.fluct.F_cell_se[si][ci]);
    }
    report.flat_sup.push_back(flat);
    report.kinetic_drift.push_back(drift);
    report.max_cell_se.push_back(sup_se);
  }

  if (auto eta = cfg.eta_exact()) {
    try {
      auto scan = scan_small_denominators(grid, *eta, ScanOrder::ThreeWave);
      report.min_three_wave_denominator = scan.min_abs;
      report.exact_three_wave_zeros = scan.exact_zero_count;
    } catch (const ScanBudgetExceeded&) {
      report.warnings.push_back("census join skipped: three-wave scan over budget");
    }
  } else {
    report.warnings.push_back("census join skipped: eta not exactly representable");
  }
  return report;
}

namespace {

json series_json(const std::vector<double>& t, const std::vector<double>& v) {
  json arr = json::array();
  for (size_t i = 0; i < t.size(); ++i) arr.push_back({{"t", t[i]}, {"value", v[i]}});
  return arr;
}

void emit_fluct_csv(const std::string& path, const ExperimentConfig& cfg,
                    const FluctuationSeries& fluct, const CoarsePartition& part,
                    const std::vector<std::vector<double>>& f_kin) {
  CsvWriter csv(path);
  csv.header({"t", "tau", "K_x", "K_y", "F_mc", "F_kin", "abs_err", "stderr"});
  for (size_t si = 0; si < fluct.t.size(); ++si) {
    for (int ci = 0; ci < part.cell_count(); ++ci) {
      const double fk = f_kin.empty() ? 0.0 : f_kin[si][ci];
      csv.row({fluct.t[si], fluct.tau[si], part.cell(ci).Kx, part.cell(ci).Ky,
               fluct.F_cell[si][ci], fk, std::fabs(fluct.F_cell[si][ci] - fk),
               fluct.F_cell_se[si][ci]});
    }
  }
}

void emit_modes_csv(const std::string& path, const EnsembleStats& stats,
                    const FrequencyGrid& grid) {
  CsvWriter csv(path);
  csv.header({"t", "k_x", "k_y", "mean_action", "stderr"});
  for (size_t si = 0; si < stats.save_times.size(); ++si)
    for (int s = 0; s < grid.mode_count(); ++s)
      csv.row({stats.save_times[si], grid.mode(s).kx, grid.mode(s).ky,
               stats.action_mean[si][s], stats.action_se[si][s]});
}

void emit_kinetic_csv(const std::string& path, const ExperimentConfig& cfg,
                      const KineticPrediction& pred) {
  KineticMesh mesh(cfg.domain, cfg.kin_dx);
  CsvWriter csv(path);
  csv.header({"tau", "m_x", "m_y", "f"});
  for (size_t si = 0; si < pred.tau.size(); ++si)
    for (int idx = 0; idx < mesh.node_count(); ++idx) {
      if (!mesh.active(idx)) continue;
      const Point2 q = mesh.node(idx);
      csv.row({pred.tau[si], q.x, q.y, pred.f_nodes[si][idx]});
    }
}

void heatmap_from_cells(const std::string& path, const std::string& title,
                        const CoarsePartition& part, const std::vector<double>& cells) {
  std::vector<double> xs, ys;
  for (int ci = 0; ci < part.cell_count(); ++ci) {
    xs.push_back(part.cell(ci).Kx);
    ys.push_back(part.cell(ci).Ky);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::vector<std::vector<double>> grid(xs.size(), std::vector<double>(ys.size(), 0.0));
  for (int ci = 0; ci < part.cell_count(); ++ci) {
    const auto ix = std::lower_bound(xs.begin(), xs.end(), part.cell(ci).Kx) - xs.begin();
    const auto iy = std::lower_bound(ys.begin(), ys.end(), part.cell(ci).Ky) - ys.begin();
    grid[ix][iy] = cells[ci];
  }
  svg_heatmap(path, title, xs, ys, grid);
}

}  // namespace

void emit_compare_outputs(const ExperimentConfig& cfg, const ComparisonReport& report,
                          const FrequencyGrid& grid, const CoarsePartition& part) {
  ensure_directory(cfg.outdir);
  emit_fluct_csv(cfg.outdir + "/fluctuations.csv", cfg, report.fluct, part,
                 report.kin.f_cell);
  emit_modes_csv(cfg.outdir + "/modes.csv", report.stats, grid);
  emit_kinetic_csv(cfg.outdir + "/kinetic.csv", cfg, report.kin);

  json rj;
  rj["kind"] = "theorem1_compare";
  rj["sup_err"] = series_json(report.fluct.t, report.sup_err);
  rj["max_cell_se"] = series_json(report.fluct.t, report.max_cell_se);
  rj["budget"] = {{"eps_over_h_delta2", report.budget_eps_term},
                  {"one_over_h_delta_N", report.budget_grid_term},
                  {"delta_over_N_2_minus_alpha", report.budget_tail_term}};
  rj["kinetic_operator_norm"] = report.kin.op_norm;
  rj["warnings"] = report.warnings;
  if (report.kin_resonant.has_value()) {
    std::vector<double> gap;
    for (size_t si = 0; si < report.fluct.t.size(); ++si) {
      double g = 0.0;
      for (size_t ci = 0; ci < report.kin.f_cell[si].size(); ++ci)
        g = std::max(g, std::fabs(report.kin.f_cell[si][ci] -
                                  report.kin_resonant->f_cell[si][ci]));
      gap.push_back(g);
    }
    rj["lorentzian_vs_resonant_gap"] = series_json(report.fluct.t, gap);
  }
  write_text_file(cfg.outdir + "/report.json", rj.dump(2));

  svg_line_chart(cfg.outdir + "/error_vs_time.svg",
                 "sup-cell |F - f| vs time", "t", "sup error",
                 {{"sup_err", report.fluct.t, report.sup_err},
                  {"max cell SE", report.fluct.t, report.max_cell_se}});
  const size_t last = report.fluct.t.size() - 1;
  heatmap_from_cells(cfg.outdir + "/F_mc_final.svg", "coarse F (Monte-Carlo), final time",
                     part, report.fluct.F_cell[last]);
  heatmap_from_cells(cfg.outdir + "/F_kin_final.svg", "coarse f (kinetic), final time",
                     part, report.kin.f_cell[last]);
}

void emit_flatness_outputs(const ExperimentConfig& cfg, const FlatnessReport& report,
                           const FrequencyGrid& grid, const CoarsePartition& part) {
  ensure_directory(cfg.outdir);
  {
    CsvWriter csv(cfg.outdir + "/flatness.csv");
    csv.header({"t", "tau", "K_x", "K_y", "F_mc", "g0_K", "flat_err", "kin_drift_K",
                "stderr"});
    for (size_t si = 0; si < report.fluct.t.size(); ++si)
      for (int ci = 0; ci < part.cell_count(); ++ci)
        csv.row({report.fluct.t[si], report.fluct.tau[si], part.cell(ci).Kx,
                 part.cell(ci).Ky, report.fluct.F_cell[si][ci], report.g0_cell[ci],
                 std::fabs(report.fluct.F_cell[si][ci] - report.g0_cell[ci]),
                 report.kin.f_cell[si][ci], report.fluct.F_cell_se[si][ci]});
  }
  emit_modes_csv(cfg.outdir + "/modes.csv", report.stats, grid);
  emit_kinetic_csv(cfg.outdir + "/kinetic.csv", cfg, report.kin);

  json rj;
  rj["kind"] = "theorem2_flatness";
  rj["flat_sup"] = series_json(report.fluct.t, report.flat_sup);
  rj["kinetic_drift_sup"] = series_json(report.fluct.t, report.kinetic_drift);
  rj["max_cell_se"] = series_json(report.fluct.t, report.max_cell_se);
  rj["g0_sup"] = cfg.g0.amplitude;
  rj["census"] = {{"min_three_wave_denominator", report.min_three_wave_denominator},
                  {"exact_three_wave_zeros", report.exact_three_wave_zeros},
                  {"eta", cfg.eta_text}};
  rj["warnings"] = report.warnings;
  write_text_file(cfg.outdir + "/report.json", rj.dump(2));

  svg_line_chart(cfg.outdir + "/flatness_vs_time.svg",
                 "action preservation vs kinetic drift", "t", "sup over cells",
                 {{"|F - g0| sup", report.fluct.t, report.flat_sup},
                  {"kinetic drift", report.fluct.t, report.kinetic_drift},
                  {"max cell SE", report.fluct.t, report.max_cell_se}});
  const size_t last = report.fluct.t.size() - 1;
  heatmap_from_cells(cfg.outdir + "/F_mc_final.svg", "coarse F (Monte-Carlo), final time",
                     part, report.fluct.F_cell[last]);
}

void emit_simulate_outputs(const ExperimentConfig& cfg, const EnsembleStats& stats,
                           const FrequencyGrid& grid) {
  ensure_directory(cfg.outdir);
  emit_modes_csv(cfg.outdir + "/modes.csv", stats, grid);
}

void emit_manifest(const ExperimentConfig& cfg, const std::string& outdir,
                   double wall_seconds) {
  json m;
  m["config"] = json::parse(cfg.to_json_text());
  m["seed"] = cfg.seed;
  m["code_version"] = "wavekin 0.1.0";
  m["wall_seconds"] = wall_seconds;
  write_text_file(outdir + "/manifest.json", m.dump(2));
}

void replot(const std::string& outdir) {
  const std::string report_path = outdir + "/report.json";
  const json rj = json::parse(read_text_file(report_path));
  auto take = [&](const char* key, std::vector<double>& t, std::vector<double>& v) {
    t.clear();
    v.clear();
    if (!rj.contains(key)) return;
    for (const auto& e : rj[key]) {
      t.push_back(e["t"].get<double>());
      v.push_back(e["value"].get<double>());
    }
  };
  std::vector<double> t, v, t2, v2;
  if (rj.value("kind", "") == "theorem1_compare") {
    take("sup_err", t, v);
    take("max_cell_se", t2, v2);
    svg_line_chart(outdir + "/error_vs_time.svg", "sup-cell |F - f| vs time", "t",
                   "sup error", {{"sup_err", t, v}, {"max cell SE", t2, v2}});
  } else if (rj.value("kind", "") == "theorem2_flatness") {
    take("flat_sup", t, v);
    take("kinetic_drift_sup", t2, v2);
    svg_line_chart(outdir + "/flatness_vs_time.svg",
                   "action preservation vs kinetic drift", "t", "sup over cells",
                   {{"|F - g0| sup", t, v}, {"kinetic drift", t2, v2}});
  } else {
    throw std::runtime_error("replot: unknown report kind in " + report_path);
  }
}

}  // namespace wavekin
