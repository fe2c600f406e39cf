#include "domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wavekin {

void DomainSpec::validate() const {
  if (!(a > 0.0 && b > a)) throw std::invalid_argument("domain: need 0 < a < b");
  if (!(c > 0.0)) throw std::invalid_argument("domain: need c > 0");
  double lim = 0.5 * std::min(b - a, 2.0 * c);
  if (!(w > 0.0 && w < lim))
    throw std::invalid_argument("domain: need 0 < w < min(b-a, 2c)/2");
}

void DomainSpec::validate_for_interaction() const {
  validate();
  // With b <= 2a no sum triad n = k + l fits inside D+, so the quadratic
  // interaction is empty; simulation configs reject such domains.
  if (!(b > 2.0 * a))
    throw std::invalid_argument("domain: need b > 2a so that sum triads exist");
}

void DispersionParams::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("dispersion: need eta > 0");
}

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * (3.0 - 2.0 * x);
}

double psi_plus(Point2 k, const DomainSpec& spec) {
  const double w = spec.w;
  return smoothstep((k.x - spec.a) / w) * smoothstep((spec.b - k.x) / w) *
         smoothstep((k.y + spec.c) / w) * smoothstep((spec.c - k.y) / w);
}

double psi(Point2 k, const DomainSpec& spec) {
  return psi_plus(k, spec) + psi_plus({-k.x, k.y}, spec);
}

double phi_weight(Point2 k, const DomainSpec& spec) {
  return std::sqrt(std::fabs(k.x)) * psi(k, spec);
}

double gamma_rj(Point2 k) {
  if (k.x == 0.0) throw std::invalid_argument("gamma: k_x = 0 is a pole");
  return 1.0 / std::fabs(k.x);
}

double omega(Point2 k, const DispersionParams& p) {
  if (k.x == 0.0) throw std::invalid_argument("omega: k_x = 0 is a pole");
  return k.x * k.x * k.x + p.eta * k.y * k.y / k.x;
}

OmegaGrad omega_and_grad(Point2 k, const DispersionParams& p) {
  if (k.x == 0.0) throw std::invalid_argument("omega: k_x = 0 is a pole");
  OmegaGrad g;
  g.omega = k.x * k.x * k.x + p.eta * k.y * k.y / k.x;
  g.d_kx = 3.0 * k.x * k.x - p.eta * k.y * k.y / (k.x * k.x);
  g.d_ky = 2.0 * p.eta * k.y / k.x;
  return g;
}

Coupling coupling_psi(Point2 n, Point2 k, Point2 l, const DomainSpec& spec) {
  const double root = std::sqrt(std::fabs(n.x) * std::fabs(k.x) * std::fabs(l.x));
  Coupling out;
  out.full = root * psi(n, spec) * psi(k, spec) * psi(l, spec);
  out.plus_only = root * psi_plus(n, spec) * psi_plus(k, spec) * psi_plus(l, spec);
  return out;
}

FrequencyGrid::FrequencyGrid(const DomainSpec& spec, const DispersionParams& disp, int N)
    : spec_(spec), disp_(disp), N_(N) {
  spec_.validate();
  disp_.validate();
  if (N < 1) throw std::invalid_argument("grid: need N >= 1");

  const double dN = static_cast<double>(N);
  for (int ix = static_cast<int>(std::floor(spec.a * dN));
       ix <= static_cast<int>(std::ceil(spec.b * dN)); ++ix) {
    const double kx = ix / dN;
    if (!(kx > spec.a && kx < spec.b)) continue;
    for (int iy = static_cast<int>(std::floor(-spec.c * dN));
         iy <= static_cast<int>(std::ceil(spec.c * dN)); ++iy) {
      const double ky = iy / dN;
      if (!(std::fabs(ky) < spec.c)) continue;
      GridMode m;
      m.ix = ix;
      m.iy = iy;
      m.kx = kx;
      m.ky = ky;
      m.omega = omega({kx, ky}, disp_);
      m.gamma = 1.0 / kx;
      m.psi = psi_plus({kx, ky}, spec_);
      m.phi = std::sqrt(kx) * m.psi;
      modes_.push_back(m);
    }
  }
  if (modes_.empty()) return;

  ix_lo_ = modes_.front().ix;
  ix_hi_ = modes_.back().ix;
  iy_lo_ = iy_hi_ = modes_.front().iy;
  for (const auto& m : modes_) {
    iy_lo_ = std::min(iy_lo_, m.iy);
    iy_hi_ = std::max(iy_hi_, m.iy);
  }
  const int nx = ix_hi_ - ix_lo_ + 1;
  const int ny = iy_hi_ - iy_lo_ + 1;
  lut_.assign(static_cast<size_t>(nx) * ny, -1);
  for (int s = 0; s < mode_count(); ++s) {
    const auto& m = modes_[s];
    lut_[static_cast<size_t>(m.ix - ix_lo_) * ny + (m.iy - iy_lo_)] = s;
  }
}

int FrequencyGrid::slot_of(int ix, int iy) const {
  if (ix < ix_lo_ || ix > ix_hi_ || iy < iy_lo_ || iy > iy_hi_) return -1;
  const int ny = iy_hi_ - iy_lo_ + 1;
  return lut_[static_cast<size_t>(ix - ix_lo_) * ny + (iy - iy_lo_)];
}

CoarsePartition::CoarsePartition(const FrequencyGrid& grid, double h) : h_(h) {
  const int N = grid.N();
  if (!(h >= 1.0 / N))
    throw std::invalid_argument("coarse: need h >= 1/N (cells would be empty)");
  const auto& spec = grid.spec();
  divisor_ = h * h * static_cast<double>(N) * static_cast<double>(N);

  // Cells [K, K+h)^2 whose interior meets the open rectangle (a,b) x (-c,c).
  const auto cell_lo = [h](double v) { return static_cast<int>(std::floor(v / h)); };
  const int ax0 = cell_lo(spec.a);
  const int ax1 = cell_lo(spec.b) - (std::fmod(spec.b, h) == 0.0 ? 1 : 0);
  const int ay0 = cell_lo(-spec.c);
  const int ay1 = cell_lo(spec.c) - (std::fmod(spec.c, h) == 0.0 ? 1 : 0);

  std::vector<std::vector<int32_t>> members;
  std::vector<std::pair<int, int>> keys;
  const int ny = ay1 - ay0 + 1;
  members.resize(static_cast<size_t>(ax1 - ax0 + 1) * ny);

  const double hN = h * N;
  const long long q = std::llround(hN);
  const bool integer_cells = std::fabs(hN - static_cast<double>(q)) < 1e-9;

  slot_cell_.assign(grid.mode_count(), -1);
  std::vector<int32_t> mode_key(grid.mode_count(), -1);
  for (int s = 0; s < grid.mode_count(); ++s) {
    const auto& m = grid.mode(s);
    int axc, ayc;
    if (integer_cells) {
      auto fdiv = [](long long u, long long v) {
        long long d = u / v;
        return (u % v != 0 && ((u < 0) != (v < 0))) ? d - 1 : d;
      };
      axc = static_cast<int>(fdiv(m.ix, q));
      ayc = static_cast<int>(fdiv(m.iy, q));
    } else {
      axc = static_cast<int>(std::floor(m.kx / h));
      ayc = static_cast<int>(std::floor(m.ky / h));
    }
    if (axc < ax0 || axc > ax1 || ayc < ay0 || ayc > ay1) continue;
    const size_t key = static_cast<size_t>(axc - ax0) * ny + (ayc - ay0);
    members[key].push_back(s);
    mode_key[s] = static_cast<int32_t>(key);
  }

  std::vector<int32_t> key_to_cell(members.size(), -1);
  for (int ax = ax0; ax <= ax1; ++ax) {
    for (int ay = ay0; ay <= ay1; ++ay) {
      const size_t key = static_cast<size_t>(ax - ax0) * ny + (ay - ay0);
      CoarseCell cell;
      cell.Kx = ax * h;
      cell.Ky = ay * h;
      cell.slots = std::move(members[key]);
      key_to_cell[key] = static_cast<int32_t>(cells_.size());
      cells_.push_back(std::move(cell));
    }
  }
  for (int s = 0; s < grid.mode_count(); ++s)
    if (mode_key[s] >= 0) slot_cell_[s] = key_to_cell[mode_key[s]];
}

std::vector<double> CoarsePartition::average(std::span<const double> mode_values) const {
  std::vector<double> out(cells_.size(), 0.0);
  for (size_t ci = 0; ci < cells_.size(); ++ci) {
    double sum = 0.0;
    for (int32_t s : cells_[ci].slots) sum += mode_values[s];
    out[ci] = sum / divisor_;
  }
  return out;
}

}  // namespace wavekin
