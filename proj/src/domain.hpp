#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace wavekin {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator-(Point2 a) { return {-a.x, -a.y}; }

/// Rectangular frequency domain D+ = (a,b) x (-c,c) with a mollification
/// ramp of width w on every edge.
struct DomainSpec {
  double a = 0.5;
  double b = 2.0;
  double c = 1.5;
  double w = 0.15;

  void validate() const;
  void validate_for_interaction() const;  // additionally requires b > 2a
};

struct DispersionParams {
  double eta = 1.0;

  void validate() const;
};

/// Polynomial smoothstep: 0 for x<=0, 3x^2-2x^3 on (0,1), 1 for x>=1.
double smoothstep(double x);

/// Mollified indicator of D+.
double psi_plus(Point2 k, const DomainSpec& spec);

/// psi = psi+ + psi-, with psi-(kx,ky) = psi+(-kx,ky).
double psi(Point2 k, const DomainSpec& spec);

/// phi(k) = sqrt(|kx|) psi(k); the coupling factorizes as phi(n)phi(k)phi(l).
double phi_weight(Point2 k, const DomainSpec& spec);

/// Rayleigh-Jeans profile 1/|kx|; rejects kx == 0.
double gamma_rj(Point2 k);

struct OmegaGrad {
  double omega;
  double d_kx;
  double d_ky;
};

/// omega(k) = kx^3 + eta ky^2 / kx; rejects kx == 0.
double omega(Point2 k, const DispersionParams& p);
OmegaGrad omega_and_grad(Point2 k, const DispersionParams& p);

struct Coupling {
  double full;       // Psi_{nkl}
  double plus_only;  // Psi+_{nkl}
};

Coupling coupling_psi(Point2 n, Point2 k, Point2 l, const DomainSpec& spec);

struct GridMode {
  int32_t ix = 0;  // k = (ix/N, iy/N)
  int32_t iy = 0;
  double kx = 0.0;
  double ky = 0.0;
  double omega = 0.0;
  double gamma = 0.0;
  double psi = 0.0;  // psi(k) == psi+(k) on D+
  double phi = 0.0;  // sqrt(kx) * psi(k)
};

/// Lattice D_N^+ = D+ ∩ Z^2/N with cached per-mode values. Modes are ordered
/// lexicographically on (ix, iy). The D- half is implicit via k -> -k.
/// Immutable after construction.
class FrequencyGrid {
 public:
  FrequencyGrid(const DomainSpec& spec, const DispersionParams& disp, int N);

  const DomainSpec& spec() const { return spec_; }
  const DispersionParams& dispersion() const { return disp_; }
  int N() const { return N_; }
  int mode_count() const { return static_cast<int>(modes_.size()); }
  bool empty() const { return modes_.empty(); }
  const GridMode& mode(int slot) const { return modes_[slot]; }
  const std::vector<GridMode>& modes() const { return modes_; }

  /// Storage slot of lattice index (ix,iy), or -1 when not in D_N^+.
  int slot_of(int ix, int iy) const;

  int ix_lo() const { return ix_lo_; }
  int ix_hi() const { return ix_hi_; }
  int iy_lo() const { return iy_lo_; }
  int iy_hi() const { return iy_hi_; }

 private:
  DomainSpec spec_;
  DispersionParams disp_;
  int N_;
  std::vector<GridMode> modes_;
  int ix_lo_ = 0, ix_hi_ = -1, iy_lo_ = 0, iy_hi_ = -1;
  std::vector<int32_t> lut_;  // dense (ix,iy) -> slot
};

struct CoarseCell {
  double Kx = 0.0;
  double Ky = 0.0;
  std::vector<int32_t> slots;  // grid modes with K <= m < K+h componentwise
};

/// Coarse cells of mesh h over the D+ half. Averages always divide by h^2 N^2
/// (modes missing from D_N contribute zero). Cells are enumerated for every
/// coarse node whose cell intersects the open rectangle, so boundary slivers
/// are kept.
class CoarsePartition {
 public:
  CoarsePartition(const FrequencyGrid& grid, double h);

  double h() const { return h_; }
  double divisor() const { return divisor_; }  // h^2 N^2
  int cell_count() const { return static_cast<int>(cells_.size()); }
  const CoarseCell& cell(int i) const { return cells_[i]; }
  const std::vector<CoarseCell>& cells() const { return cells_; }

  /// Cell index containing grid slot s, or -1.
  int cell_of_slot(int s) const { return slot_cell_[s]; }

  std::vector<double> average(std::span<const double> mode_values) const;

 private:
  double h_;
  double divisor_;
  std::vector<CoarseCell> cells_;
  std::vector<int32_t> slot_cell_;
};

}  // namespace wavekin
