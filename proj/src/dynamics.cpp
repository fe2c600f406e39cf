#include "dynamics.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace wavekin {

void NoiseStream::fill(uint64_t step, int half, double dt_sub,
                       std::span<double> dW) const {
  const double sd = std::sqrt(dt_sub);
  // One Philox block yields two normals; the pair index addresses two modes.
  const uint64_t base = (step * 2 + static_cast<uint64_t>(half)) << 32;
  for (size_t m = 0; m < dW.size(); m += 2) {
    double z0, z1;
    stream_.normal_pair(base | (m >> 1), z0, z1);
    dW[m] = sd * z0;
    if (m + 1 < dW.size()) dW[m + 1] = sd * z1;
  }
}

namespace {

std::mutex g_fftw_mutex;  // FFTW planning is not thread safe

int next_fast_size(int n) {
  for (;; ++n) {
    int m = n;
    for (int f : {2, 3, 5, 7})
      while (m % f == 0) m /= f;
    if (m == 1) return n;
  }
}

}  // namespace

struct NonlinearRhs::Impl {
  const FrequencyGrid& grid;
  ConvBackend backend;

  // FFT backend state.
  int Lx = 0, Ly = 0, Lyh = 0;
  fftw_complex* spec = nullptr;
  double* real = nullptr;
  fftw_plan plan_c2r = nullptr;
  fftw_plan plan_r2c = nullptr;

  explicit Impl(const FrequencyGrid& g, ConvBackend b) : grid(g), backend(b) {
    if (backend != ConvBackend::Fft || grid.empty()) return;
    // The box only needs the convolution to be alias-free on |i| in
    // [ix_lo, ix_hi]: any wrapped image lands outside the read-back set
    // as soon as L > 3 * max index.
    Lx = next_fast_size(3 * grid.ix_hi() + 1);
    const int jmax = std::max(std::abs(grid.iy_lo()), std::abs(grid.iy_hi()));
    Ly = next_fast_size(3 * jmax + 1);
    Lyh = Ly / 2 + 1;
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    spec = fftw_alloc_complex(static_cast<size_t>(Lx) * Lyh);
    real = fftw_alloc_real(static_cast<size_t>(Lx) * Ly);
    // FFTW_ESTIMATE keeps plan selection deterministic run to run.
    plan_c2r = fftw_plan_dft_c2r_2d(Lx, Ly, spec, real, FFTW_ESTIMATE);
    plan_r2c = fftw_plan_dft_r2c_2d(Lx, Ly, real, spec, FFTW_ESTIMATE);
  }

  ~Impl() {
    if (plan_c2r) {
      std::lock_guard<std::mutex> lock(g_fftw_mutex);
      fftw_destroy_plan(plan_c2r);
      fftw_destroy_plan(plan_r2c);
      fftw_free(spec);
      fftw_free(real);
    }
  }

  void apply_direct(double eps, std::span<const std::complex<double>> v,
                    std::span<std::complex<double>> out) const {
    const int M = grid.mode_count();
    std::fill(out.begin(), out.end(), std::complex<double>(0.0, 0.0));
    // g = phi V; Psi+_{nkl} = phi(n) phi(k) phi(l) on D+ legs.
    std::vector<std::complex<double>> g(M);
    for (int s = 0; s < M; ++s) g[s] = grid.mode(s).phi * v[s];
    for (int ks = 0; ks < M; ++ks) {
      const auto& mk = grid.mode(ks);
      const std::complex<double> gk = g[ks];
      const std::complex<double> gk_conj = std::conj(gk);
      for (int ls = 0; ls < M; ++ls) {
        const auto& ml = grid.mode(ls);
        const int ns = grid.slot_of(mk.ix + ml.ix, mk.iy + ml.iy);
        if (ns >= 0) out[ns] += gk * g[ls];
        const int ds = grid.slot_of(ml.ix - mk.ix, ml.iy - mk.iy);
        if (ds >= 0) out[ds] += 2.0 * gk_conj * g[ls];
      }
    }
    const double c = eps / grid.N();
    for (int s = 0; s < M; ++s)
      out[s] = std::complex<double>(0.0, c * grid.mode(s).phi) * out[s];
  }

  void apply_fft(double eps, std::span<const std::complex<double>> v,
                 std::span<std::complex<double>> out) {
    const int M = grid.mode_count();
    std::memset(spec, 0, sizeof(fftw_complex) * static_cast<size_t>(Lx) * Lyh);
    // Scatter the Hermitian full-lattice field g (g(-k) = conj g(k)) into the
    // half spectrum. Modes with iy > 0 represent their mirror implicitly;
    // iy == 0 pairs need both slots written.
    for (int s = 0; s < M; ++s) {
      const auto& m = grid.mode(s);
      const std::complex<double> gs = m.phi * v[s];
      if (m.iy > 0) {
        fftw_complex* c = &spec[static_cast<size_t>(m.ix) * Lyh + m.iy];
        (*c)[0] = gs.real();
        (*c)[1] = gs.imag();
      } else if (m.iy < 0) {
        fftw_complex* c = &spec[static_cast<size_t>(Lx - m.ix) * Lyh + (-m.iy)];
        (*c)[0] = gs.real();
        (*c)[1] = -gs.imag();
      } else {
        fftw_complex* c0 = &spec[static_cast<size_t>(m.ix) * Lyh];
        (*c0)[0] = gs.real();
        (*c0)[1] = gs.imag();
        fftw_complex* c1 = &spec[static_cast<size_t>(Lx - m.ix) * Lyh];
        (*c1)[0] = gs.real();
        (*c1)[1] = -gs.imag();
      }
    }
    fftw_execute(plan_c2r);
    const size_t npts = static_cast<size_t>(Lx) * Ly;
    for (size_t i = 0; i < npts; ++i) real[i] *= real[i];
    fftw_execute(plan_r2c);
    // Read back sum_{k+l=n} g_k g_l at n in D+ (sign(n_x) = +1 there).
    const double c = eps / grid.N() / (static_cast<double>(Lx) * Ly);
    for (int s = 0; s < M; ++s) {
      const auto& m = grid.mode(s);
      double re, im;
      if (m.iy >= 0) {
        const fftw_complex& z = spec[static_cast<size_t>(m.ix) * Lyh + m.iy];
        re = z[0];
        im = z[1];
      } else {
        const fftw_complex& z = spec[static_cast<size_t>(Lx - m.ix) * Lyh + (-m.iy)];
        re = z[0];
        im = -z[1];
      }
      out[s] = std::complex<double>(-c * m.phi * im, c * m.phi * re);
    }
  }
};

NonlinearRhs::NonlinearRhs(const FrequencyGrid& grid, ConvBackend backend)
    : impl_(std::make_unique<Impl>(grid, backend)) {}
NonlinearRhs::~NonlinearRhs() = default;
NonlinearRhs::NonlinearRhs(NonlinearRhs&&) noexcept = default;

ConvBackend NonlinearRhs::backend() const { return impl_->backend; }

void NonlinearRhs::apply(double eps, std::span<const std::complex<double>> v,
                         std::span<std::complex<double>> out) {
  if (impl_->backend == ConvBackend::Fft)
    impl_->apply_fft(eps, v, out);
  else
    impl_->apply_direct(eps, v, out);
}

void phase_step(ModeField& f, const FrequencyGrid& grid, double dt_sub,
                std::span<const double> dW, double delta) {
  const double amp = std::sqrt(2.0 * delta);
  const int M = grid.mode_count();
  for (int s = 0; s < M; ++s) {
    const double theta = grid.mode(s).omega * dt_sub + (delta > 0.0 ? amp * dW[s] : 0.0);
    f.v[s] *= std::complex<double>(std::cos(theta), std::sin(theta));
  }
  f.t += dt_sub;
}

Diagnostics diagnostics(const ModeField& f, const FrequencyGrid& grid, double eps) {
  Diagnostics d;
  const int M = grid.mode_count();
  for (int s = 0; s < M; ++s) {
    const double action = std::norm(f.v[s]);
    d.mass += grid.mode(s).kx * action;
    d.quadratic += 0.5 * grid.mode(s).omega * action;
  }
  // K_N = (1/2N) sum over ordered pairs (k,l) with m = k+l in D+ of
  // Psi+ * 2 Re(V_k V_l conj(V_m)).
  std::vector<std::complex<double>> g(M);
  for (int s = 0; s < M; ++s) g[s] = grid.mode(s).phi * f.v[s];
  double cubic = 0.0;
  for (int ks = 0; ks < M; ++ks) {
    const auto& mk = grid.mode(ks);
    for (int ls = 0; ls < M; ++ls) {
      const auto& ml = grid.mode(ls);
      const int ns = grid.slot_of(mk.ix + ml.ix, mk.iy + ml.iy);
      if (ns < 0) continue;
      cubic += 2.0 * std::real(g[ks] * g[ls] * std::conj(grid.mode(ns).phi * f.v[ns]));
    }
  }
  d.cubic = cubic / (2.0 * grid.N());
  d.hamiltonian = d.quadratic + eps * d.cubic;
  return d;
}

MemberIntegrator::MemberIntegrator(const FrequencyGrid& grid, const IntegratorConfig& cfg)
    : grid_(grid), cfg_(cfg), rhs_(grid, cfg.backend) {
  if (grid.empty()) throw std::invalid_argument("integrator: empty grid");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("integrator: need dt > 0");
  if (!(cfg.eps >= 0.0 && cfg.delta >= 0.0))
    throw std::invalid_argument("integrator: need eps, delta >= 0");
  if (cfg.order != 2 && cfg.order != 4)
    throw std::invalid_argument("integrator: order must be 2 or 4");
  if (cfg.order == 4 && cfg.delta > 0.0)
    throw std::invalid_argument("integrator: order 4 is deterministic only");
  const size_t M = grid.mode_count();
  k1_.resize(M);
  k2_.resize(M);
  k3_.resize(M);
  k4_.resize(M);
  tmp_.resize(M);
  dW_.resize(M);
}

void MemberIntegrator::rk4_step(std::vector<std::complex<double>>& v, double dt) {
  const size_t M = v.size();
  rhs_.apply(cfg_.eps, v, k1_);
  for (size_t s = 0; s < M; ++s) tmp_[s] = v[s] + 0.5 * dt * k1_[s];
  rhs_.apply(cfg_.eps, tmp_, k2_);
  for (size_t s = 0; s < M; ++s) tmp_[s] = v[s] + 0.5 * dt * k2_[s];
  rhs_.apply(cfg_.eps, tmp_, k3_);
  for (size_t s = 0; s < M; ++s) tmp_[s] = v[s] + dt * k3_[s];
  rhs_.apply(cfg_.eps, tmp_, k4_);
  const double w = dt / 6.0;
  for (size_t s = 0; s < M; ++s)
    v[s] += w * (k1_[s] + 2.0 * (k2_[s] + k3_[s]) + k4_[s]);
}

void MemberIntegrator::run(
    ModeField& f, const NoiseStream& noise, uint64_t n_steps, uint64_t save_every,
    const std::function<void(int, double, const ModeField&)>& on_save) {
  if (f.v.size() != static_cast<size_t>(grid_.mode_count()))
    throw std::invalid_argument("integrator: field/grid size mismatch");
  const double dt = cfg_.dt;
  const double hdt = 0.5 * dt;
  const double delta = cfg_.delta;
  double mass0 = 0.0;
  for (int s = 0; s < grid_.mode_count(); ++s) mass0 += grid_.mode(s).kx * std::norm(f.v[s]);

  // Yoshida triple-jump weights for the order-4 composition.
  const double y1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double y2 = 1.0 - 2.0 * y1;

  auto strang_block = [&](double h, uint64_t step, bool with_noise) {
    const double hh = 0.5 * h;
    if (with_noise) noise.fill(step, 0, hh, dW_);
    phase_step(f, grid_, hh, dW_, with_noise ? delta : 0.0);
    if (cfg_.eps > 0.0) {
      const int sub = std::max(1, cfg_.substeps);
      for (int i = 0; i < sub; ++i) rk4_step(f.v, h / sub);
    }
    if (with_noise) noise.fill(step, 1, hh, dW_);
    phase_step(f, grid_, hh, dW_, with_noise ? delta : 0.0);
  };

  int save_idx = 0;
  if (on_save) on_save(save_idx++, f.t, f);
  for (uint64_t step = 1; step <= n_steps; ++step) {
    if (cfg_.order == 2) {
      strang_block(dt, step, delta > 0.0);
    } else {
      strang_block(y1 * dt, step, false);
      strang_block(y2 * dt, step, false);
      strang_block(y1 * dt, step, false);
    }
    f.t = static_cast<double>(step) * dt;  // keep the clock an exact function of step

    const bool at_save = (save_every > 0 && step % save_every == 0) || step == n_steps;
    if (at_save) {
      if (mass0 > 0.0) {
        double mass = 0.0;
        for (int s = 0; s < grid_.mode_count(); ++s)
          mass += grid_.mode(s).kx * std::norm(f.v[s]);
        if (std::fabs(mass - mass0) > cfg_.conservation_tol * mass0)
          throw IntegrationError("integrator: mass drift beyond tolerance", step, f.t);
      }
      if (on_save) on_save(save_idx++, f.t, f);
    }
  }
}

void MemberIntegrator::run_nonlinear_only(ModeField& f, uint64_t n_steps) {
  for (uint64_t i = 0; i < n_steps; ++i) rk4_step(f.v, cfg_.dt);
  f.t += cfg_.dt * n_steps;
}

}  // namespace wavekin
