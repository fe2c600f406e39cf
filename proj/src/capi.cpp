#include "wavekin/capi.h"

#include <json.hpp>

#include <chrono>
#include <cstring>
#include <sstream>

#include "harness.hpp"
#include "io_util.hpp"
#include "manifold.hpp"

namespace {

thread_local std::string g_last_error;

template <class Fn>
wk_status guarded(Fn&& fn) {
  try {
    fn();
    return WK_OK;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return WK_EINVAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WK_ERUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return WK_ERUNTIME;
  }
}

wk_status fail_invalid(const char* msg) {
  g_last_error = msg;
  return WK_EINVAL;
}

}  // namespace

struct wk_config {
  wavekin::ExperimentConfig cfg;
};

struct wk_grid {
  wavekin::FrequencyGrid grid;
};

extern "C" {

const char* wk_last_error(void) { return g_last_error.c_str(); }
const char* wk_version(void) { return "wavekin 0.1.0"; }

wk_status wk_config_parse(const char* json_text, wk_config** out) {
  if (!json_text || !out) return fail_invalid("null argument");
  return guarded([&] {
    *out = new wk_config{wavekin::ExperimentConfig::from_json_text(json_text)};
  });
}

wk_status wk_config_load(const char* path, wk_config** out) {
  if (!path || !out) return fail_invalid("null argument");
  return guarded(
      [&] { *out = new wk_config{wavekin::ExperimentConfig::from_file(path)}; });
}

void wk_config_free(wk_config* cfg) { delete cfg; }

wk_status wk_config_validate(const wk_config* cfg, int theorem1) {
  if (!cfg) return fail_invalid("null config");
  return guarded([&] { cfg->cfg.validate(theorem1 != 0); });
}

wk_status wk_config_plan(const wk_config* cfg, char** out_text) {
  if (!cfg || !out_text) return fail_invalid("null argument");
  return guarded([&] {
    const auto& c = cfg->cfg;
    wavekin::FrequencyGrid grid(c.domain, {c.eta()}, c.N);
    std::ostringstream plan;
    plan << "wavekin experiment plan\n"
         << "  domain: (" << c.domain.a << "," << c.domain.b << ") x (+-" << c.domain.c
         << "), ramp " << c.domain.w << "\n"
         << "  grid: N=" << c.N << ", card(D_N+)=" << grid.mode_count() << "\n"
         << "  physics: eta=" << c.eta_text << " eps=" << c.eps << " delta=" << c.delta
         << " alpha=" << c.alpha << "\n"
         << "  g0: gaussian bump A=" << c.g0.amplitude << " center=(" << c.g0.x0 << ","
         << c.g0.y0 << ") width=" << c.g0.width << "\n"
         << "  run: T=" << c.T << " dt=" << c.dt << " ensemble=" << c.ensemble
         << " seed=" << c.seed << " coupled=" << (c.coupled ? "yes" : "no")
         << " init=" << c.init << "\n"
         << "  coarse: h=" << c.h << "  kinetic: dx=" << c.kin_dx
         << " dtau=" << c.kin_dtau << " form=" << c.kin_form << "\n"
         << "  outdir: " << c.outdir << "\n";
    for (const auto& w : c.validate(false)) plan << "  warning: " << w << "\n";
    const std::string s = plan.str();
    *out_text = new char[s.size() + 1];
    std::memcpy(*out_text, s.c_str(), s.size() + 1);
  });
}

void wk_string_free(char* text) { delete[] text; }

wk_status wk_grid_create(const wk_config* cfg, wk_grid** out) {
  if (!cfg || !out) return fail_invalid("null argument");
  return guarded([&] {
    const auto& c = cfg->cfg;
    *out = new wk_grid{wavekin::FrequencyGrid(c.domain, {c.eta()}, c.N)};
  });
}

void wk_grid_free(wk_grid* grid) { delete grid; }

int wk_grid_mode_count(const wk_grid* grid) {
  return grid ? grid->grid.mode_count() : -1;
}

wk_status wk_grid_dump_csv(const wk_grid* grid, const char* path) {
  if (!grid || !path) return fail_invalid("null argument");
  return guarded([&] {
    wavekin::CsvWriter csv(path);
    csv.header({"i", "j", "k_x", "k_y", "omega", "gamma", "psi"});
    for (int s = 0; s < grid->grid.mode_count(); ++s) {
      const auto& m = grid->grid.mode(s);
      csv.row({static_cast<double>(m.ix), static_cast<double>(m.iy), m.kx, m.ky,
               m.omega, m.gamma, m.psi});
    }
  });
}

wk_status wk_run_simulate(const wk_config* cfg) {
  if (!cfg) return fail_invalid("null config");
  return guarded([&] {
    const auto& c = cfg->cfg;
    c.validate(false);
    const auto t0 = std::chrono::steady_clock::now();
    wavekin::FrequencyGrid grid(c.domain, {c.eta()}, c.N);
    if (grid.empty()) throw std::invalid_argument("simulate: empty grid");
    wavekin::CoarsePartition part(grid, c.h);
    auto stats = wavekin::run_ensemble(c, grid, part);
    wavekin::emit_simulate_outputs(c, stats, grid);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    wavekin::emit_manifest(c, c.outdir, wall);
  });
}

wk_status wk_run_compare(const wk_config* cfg) {
  if (!cfg) return fail_invalid("null config");
  return guarded([&] {
    const auto& c = cfg->cfg;
    const auto t0 = std::chrono::steady_clock::now();
    auto report = wavekin::compare_theorem1(c);
    wavekin::FrequencyGrid grid(c.domain, {c.eta()}, c.N);
    wavekin::CoarsePartition part(grid, c.h);
    wavekin::emit_compare_outputs(c, report, grid, part);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    wavekin::emit_manifest(c, c.outdir, wall);
  });
}

wk_status wk_run_flatness(const wk_config* cfg) {
  if (!cfg) return fail_invalid("null config");
  return guarded([&] {
    const auto& c = cfg->cfg;
    const auto t0 = std::chrono::steady_clock::now();
    auto report = wavekin::flatness_theorem2(c);
    wavekin::FrequencyGrid grid(c.domain, {c.eta()}, c.N);
    wavekin::CoarsePartition part(grid, c.h);
    wavekin::emit_flatness_outputs(c, report, grid, part);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    wavekin::emit_manifest(c, c.outdir, wall);
  });
}

wk_status wk_run_kinetic(const wk_config* cfg, const char* form_override,
                         double lambda_override, const char* out_csv) {
  if (!cfg || !out_csv) return fail_invalid("null argument");
  return guarded([&] {
    const auto& c = cfg->cfg;
    const std::string form = form_override ? form_override : c.kin_form;
    if (form != "lorentzian" && form != "resonant")
      throw std::invalid_argument("kinetic: form must be lorentzian|resonant");
    wavekin::KineticMesh mesh(c.domain, c.kin_dx);
    const wavekin::DispersionParams params{c.eta()};
    auto f0 = mesh.project(
        [&](wavekin::Point2 q) { return c.g0.eval(q, c.domain); });
    wavekin::KineticOperator op =
        form == "resonant"
            ? wavekin::assemble_resonant(mesh, params, c.n_sigma)
            : wavekin::assemble_lorentzian(
                  mesh, params,
                  lambda_override > 0.0 ? lambda_override : 3.0 * c.delta);
    auto traj = wavekin::solve_kinetic(op, f0, c.T, c.kin_dtau,
                                       std::max(1, static_cast<int>(c.save_every)));
    wavekin::CsvWriter csv(out_csv);
    csv.header({"tau", "m_x", "m_y", "f"});
    for (size_t si = 0; si < traj.taus.size(); ++si)
      for (int idx = 0; idx < mesh.node_count(); ++idx) {
        if (!mesh.active(idx)) continue;
        const auto q = mesh.node(idx);
        csv.row({traj.taus[si], q.x, q.y, traj.states[si][idx]});
      }
  });
}

wk_status wk_run_sample_check(const wk_config* cfg, long long ensemble,
                              const char* out_csv) {
  if (!cfg || !out_csv) return fail_invalid("null argument");
  return guarded([&] {
    const auto& c = cfg->cfg;
    wavekin::FrequencyGrid grid(c.domain, {c.eta()}, c.N);
    if (grid.empty()) throw std::invalid_argument("sample-check: empty grid");
    const long long R = ensemble > 0 ? ensemble : c.ensemble;
    const int M = grid.mode_count();
    std::vector<double> sum(M, 0.0), sumsq(M, 0.0), target(M);
    for (int s = 0; s < M; ++s) {
      if (c.init == "invariant")
        target[s] = grid.mode(s).gamma;
      else if (c.init == "product")
        target[s] = wavekin::beta_product(grid, s, c.g0, c.alpha);
      else
        target[s] = grid.mode(s).gamma +
                    c.g0.eval({grid.mode(s).kx, grid.mode(s).ky}, c.domain) /
                        (static_cast<double>(c.N) * c.N);
    }
    for (long long i = 0; i < R; ++i) {
      const auto mid = static_cast<uint32_t>(i);
      wavekin::RngStream init(c.seed, mid, wavekin::StreamPurpose::Init);
      wavekin::RngStream mix(c.seed, mid, wavekin::StreamPurpose::Mixture);
      wavekin::ModeField f;
      if (c.init == "invariant")
        f = wavekin::sample_invariant(grid, init);
      else if (c.init == "product")
        f = wavekin::sample_perturbed_product(grid, c.g0, c.alpha, init, false).field;
      else
        f = wavekin::sample_perturbed_mixture(grid, c.g0, mix, init);
      for (int s = 0; s < M; ++s) {
        const double a = std::norm(f.v[s]);
        sum[s] += a;
        sumsq[s] += a * a;
      }
    }
    wavekin::CsvWriter csv(out_csv);
    csv.header({"k_x", "k_y", "gamma", "target_variance", "sample_mean_action",
                "stderr"});
    for (int s = 0; s < M; ++s) {
      const double mean = sum[s] / R;
      const double var = std::max(0.0, sumsq[s] / R - mean * mean);
      csv.row({grid.mode(s).kx, grid.mode(s).ky, grid.mode(s).gamma, target[s], mean,
               std::sqrt(var / R)});
    }
    nlohmann::json footer;
    footer["ensemble"] = R;
    footer["init"] = c.init;
    footer["chi_square_product"] =
        c.init == "product" ? wavekin::chi_square_product(grid, c.g0, c.alpha) : 0.0;
    csv.raw_line("# " + footer.dump());
  });
}

wk_status wk_census_denominators(const char* eta, const char* n_list,
                                 const char* order, const wk_config* cfg,
                                 const char* out_csv) {
  if (!eta || !n_list || !order || !out_csv) return fail_invalid("null argument");
  return guarded([&] {
    const auto parsed = wavekin::EtaExact::parse(eta);
    if (!parsed) throw std::invalid_argument("census: cannot parse eta");
    wavekin::ScanOrder ord;
    if (std::string(order) == "three_wave")
      ord = wavekin::ScanOrder::ThreeWave;
    else if (std::string(order) == "four_wave_offres")
      ord = wavekin::ScanOrder::FourWaveOffRes;
    else
      throw std::invalid_argument("census: order must be three_wave|four_wave_offres");

    const wavekin::DomainSpec spec = cfg ? cfg->cfg.domain : wavekin::DomainSpec{};
    std::vector<int> Ns;
    std::stringstream ss(n_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) Ns.push_back(std::stoi(tok));
    if (Ns.empty()) throw std::invalid_argument("census: empty N list");

    std::vector<wavekin::DenominatorScan> scans;
    wavekin::CsvWriter csv(out_csv);
    csv.header({"N", "min_denominator", "exact_zero_count", "tuples"});
    for (int N : Ns) {
      wavekin::FrequencyGrid grid(spec, {parsed->to_double()}, N);
      auto scan = wavekin::scan_small_denominators(grid, *parsed, ord);
      scans.push_back(scan);
      csv.row({static_cast<double>(N), scan.min_abs,
               static_cast<double>(scan.exact_zero_count),
               static_cast<double>(scan.tuples)});
    }
    if (scans.size() >= 2) {
      auto fit = wavekin::fit_denominator_decay(scans);
      nlohmann::json footer;
      footer["nu_hat"] = fit.nu_hat;
      footer["c_hat"] = fit.c_hat;
      footer["fit_residual"] = fit.residual;
      footer["beta_hat"] = fit.beta_hat;
      csv.raw_line("# " + footer.dump());
    }
  });
}

wk_status wk_census_modulus(const char* eta, int m_ix, int m_iy, int N,
                            const wk_config* cfg, const char* out_csv) {
  if (!eta || !out_csv) return fail_invalid("null argument");
  return guarded([&] {
    const auto parsed = wavekin::EtaExact::parse(eta);
    if (!parsed) throw std::invalid_argument("census: cannot parse eta");
    const wavekin::DomainSpec spec = cfg ? cfg->cfg.domain : wavekin::DomainSpec{};
    wavekin::FrequencyGrid grid(spec, {parsed->to_double()}, N);
    const int m_slot = grid.slot_of(m_ix, m_iy);
    if (m_slot < 0)
      throw std::invalid_argument("census: base mode not in D_N^+");
    auto mod = wavekin::enumerate_resonant_modulus(grid, m_slot, *parsed);
    wavekin::CsvWriter csv(out_csv);
    csv.header({"j_i", "j_j", "k_i", "k_j", "l_i", "l_j", "class"});
    for (const auto& t : mod.triples) {
      const auto &j = grid.mode(t.j), &k = grid.mode(t.k), &l = grid.mode(t.l);
      csv.row({static_cast<double>(j.ix), static_cast<double>(j.iy),
               static_cast<double>(k.ix), static_cast<double>(k.iy),
               static_cast<double>(l.ix), static_cast<double>(l.iy),
               t.cls == wavekin::ResonantTriple::Cls::TrivialPairing ? 0.0 : 1.0});
    }
    nlohmann::json footer;
    footer["trivial"] = mod.trivial_count;
    footer["x_swap_family"] = mod.family_count;
    csv.raw_line("# " + footer.dump());
  });
}

wk_status wk_census_curve(double m_x, double m_y, double z, int n_sigma,
                          const wk_config* cfg, const char* out_csv) {
  if (!out_csv) return fail_invalid("null argument");
  return guarded([&] {
    const wavekin::DomainSpec spec = cfg ? cfg->cfg.domain : wavekin::DomainSpec{};
    const wavekin::DispersionParams params{cfg ? cfg->cfg.eta() : 1.0};
    const wavekin::Point2 m{m_x, m_y};
    wavekin::CsvWriter csv(out_csv);
    csv.header({"branch", "sigma", "p_x", "p_y", "weight"});
    for (const auto& piece : wavekin::sigma_interval(m, spec)) {
      const double ds = (piece.hi - piece.lo) / std::max(1, n_sigma);
      for (int branch : {+1, -1}) {
        for (int q = 0; q < std::max(1, n_sigma); ++q) {
          const double sigma = piece.lo + (q + 0.5) * ds;
          const auto cp =
              wavekin::curve_point_and_weight(sigma, z, m, branch, params, spec);
          csv.row({static_cast<double>(branch), sigma, cp.p.x, cp.p.y, cp.weight});
        }
      }
    }
  });
}

wk_status wk_replot(const char* outdir) {
  if (!outdir) return fail_invalid("null argument");
  return guarded([&] { wavekin::replot(outdir); });
}

}  // extern "C"
