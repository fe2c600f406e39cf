#pragma once

#include <functional>
#include <memory>
#include <span>

#include "domain.hpp"
#include "field.hpp"
#include "rng.hpp"

namespace wavekin {

/// Brownian phase increments for one member: the draw for (step, half, mode)
/// is a pure function of the stream, so a coupled baseline replays the same
/// path by construction.
class NoiseStream {
 public:
  NoiseStream(uint64_t seed, uint32_t member, double delta)
      : stream_(seed, member, StreamPurpose::Noise), delta_(delta) {}

  double delta() const { return delta_; }

  /// Fills dW with independent N(0, dt_sub) increments for the given substep.
  void fill(uint64_t step, int half, double dt_sub, std::span<double> dW) const;

 private:
  RngStream stream_;
  double delta_;
};

enum class ConvBackend { Direct, Fft };

struct IntegratorConfig {
  double dt = 0.05;
  int substeps = 1;  // RK4 steps per nonlinear stage
  double eps = 0.1;
  double delta = 0.0;
  ConvBackend backend = ConvBackend::Fft;
  double conservation_tol = 1e-6;  // relative mass drift abort threshold
  // 2: Strang block per macro step. 4: deterministic triple-jump composition
  // of the same block (requires delta == 0); cuts the Hamiltonian error from
  // O(dt^2) to O(dt^4).
  int order = 2;
};

struct Diagnostics {
  double mass = 0.0;         // M_N = sum kx |V_k|^2
  double quadratic = 0.0;    // Omega_N = 1/2 sum omega |V_k|^2
  double cubic = 0.0;        // K_N
  double hamiltonian = 0.0;  // Omega_N + eps K_N
};

/// Quadratic interaction d V_n = i(eps/N) [sum_{k+l=n} Psi+ V_k V_l
/// + 2 sum_{l-k=n} Psi+ conj(V_k) V_l]. The direct backend evaluates the two
/// D+ sums literally; the FFT backend computes the single full-lattice
/// self-convolution of g = phi V on a zero-padded box (real spectrum by
/// Hermitian symmetry) and reads off the D+ entries. Identical contract.
class NonlinearRhs {
 public:
  NonlinearRhs(const FrequencyGrid& grid, ConvBackend backend);
  ~NonlinearRhs();
  NonlinearRhs(NonlinearRhs&&) noexcept;
  NonlinearRhs& operator=(NonlinearRhs&&) = delete;

  void apply(double eps, std::span<const std::complex<double>> v,
             std::span<std::complex<double>> out);

  ConvBackend backend() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Exact linear+noise subflow: V_n <- exp(i omega_n dt + i sqrt(2 delta) dW_n) V_n.
void phase_step(ModeField& f, const FrequencyGrid& grid, double dt_sub,
                std::span<const double> dW, double delta);

Diagnostics diagnostics(const ModeField& f, const FrequencyGrid& grid, double eps);

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, uint64_t step, double t)
      : std::runtime_error(what), step(step), t(t) {}
  uint64_t step;
  double t;
};

/// Strang splitting: exact phase/noise over dt/2, RK4 on the quadratic part
/// over dt, exact phase/noise over dt/2. With delta = 0 the scheme is
/// deterministic and time reversible up to RK error. Aborts when the mass
/// drifts beyond the configured tolerance.
class MemberIntegrator {
 public:
  MemberIntegrator(const FrequencyGrid& grid, const IntegratorConfig& cfg);

  /// Runs to n_steps * dt; invokes on_save(save_index, t, field) at step 0 and
  /// every save_every steps (and at the final step).
  void run(ModeField& f, const NoiseStream& noise, uint64_t n_steps,
           uint64_t save_every,
           const std::function<void(int, double, const ModeField&)>& on_save);

  /// Test hook: pure RK4 on the quadratic vector field only (no phase flow).
  void run_nonlinear_only(ModeField& f, uint64_t n_steps);

  NonlinearRhs& rhs() { return rhs_; }

 private:
  void rk4_step(std::vector<std::complex<double>>& v, double dt);

  const FrequencyGrid& grid_;
  IntegratorConfig cfg_;
  NonlinearRhs rhs_;
  std::vector<std::complex<double>> k1_, k2_, k3_, k4_, tmp_;
  std::vector<double> dW_;
};

}  // namespace wavekin
