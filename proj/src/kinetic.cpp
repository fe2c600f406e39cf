#include "kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavekin {

namespace {

inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

inline void require_triad(Point2 m, Point2 j, Point2 p) {
  if (std::fabs(m.x - j.x - p.x) > 1e-9 || std::fabs(m.y - j.y - p.y) > 1e-9)
    throw std::invalid_argument("kernels: triad constraint j = m - p violated");
}

}  // namespace

KernelTriple linearized_kernels(Point2 m, Point2 j, Point2 p, const DomainSpec& spec,
                                KernelConvention conv) {
  require_triad(m, j, p);
  const double c = coupling_psi(m, j, p, spec).full;
  const double psi2 = c * c;
  if (psi2 == 0.0) return {0.0, 0.0, 0.0};
  const double gm = 1.0 / std::fabs(m.x);
  const double gj = 1.0 / std::fabs(j.x);
  const double gp = 1.0 / std::fabs(p.x);
  const double s_j = sgn(m.x) * sgn(j.x);
  const double s_p = sgn(m.x) * sgn(p.x);
  KernelTriple k;
  if (conv == KernelConvention::DPlusDerived) {
    k.L = -2.0 * psi2 * (s_p * gj + s_j * gp);
    k.S_p = 2.0 * psi2 * (gj - s_j * gm);
    k.S_j = 2.0 * psi2 * (gp - s_p * gm);
  } else {
    k.L = -2.0 * psi2 * (s_j * gj + s_p * gp);
    k.S_p = 2.0 * psi2 * (gj - s_p * gm);
    k.S_j = 2.0 * psi2 * (gp - s_j * gm);
  }
  return k;
}

double nonlinear_integrand(const std::function<double(Point2)>& r, Point2 m, Point2 j,
                           Point2 p, const DomainSpec& spec) {
  require_triad(m, j, p);
  const double c = coupling_psi(m, j, p, spec).full;
  if (c == 0.0) return 0.0;
  const double rm = r(m), rj = r(j), rp = r(p);
  if (!(rm > 0.0 && rj > 0.0 && rp > 0.0))
    throw std::invalid_argument("integrand: profile must be positive on D");
  const double s_j = sgn(m.x) * sgn(j.x);
  const double s_p = sgn(m.x) * sgn(p.x);
  return 2.0 * c * c * (rj * rp - s_p * rm * rj - s_j * rm * rp);
}

KineticMesh::KineticMesh(const DomainSpec& spec, double dx) : spec_(spec), dx_(dx) {
  spec_.validate();
  if (!(dx > 0.0)) throw std::invalid_argument("mesh: need dx > 0");
  auto near_int = [](double v) { return std::fabs(v - std::llround(v)) < 1e-9; };
  if (!near_int(spec.a / dx) || !near_int(spec.c / dx) || !near_int((spec.b - spec.a) / dx))
    throw std::invalid_argument("mesh: a/dx, c/dx and (b-a)/dx must be integers");
  nx_ = static_cast<int>(std::llround((spec.b - spec.a) / dx)) + 1;
  ny_ = static_cast<int>(std::llround(2.0 * spec.c / dx)) + 1;
  active_.resize(static_cast<size_t>(nx_) * ny_);
  for (int idx = 0; idx < node_count(); ++idx) {
    active_[idx] = psi_plus(node(idx), spec_) > 0.0 ? 1 : 0;
    active_count_ += active_[idx];
  }
}

double KineticMesh::eval(const std::vector<double>& f, Point2 p) const {
  if (p.x < 0.0) p = -p;  // even extension
  const double fx = (p.x - spec_.a) / dx_;
  const double fy = (p.y + spec_.c) / dx_;
  if (fx < 0.0 || fy < 0.0 || fx > nx_ - 1 || fy > ny_ - 1) return 0.0;
  const int i = std::min(static_cast<int>(fx), nx_ - 2);
  const int j = std::min(static_cast<int>(fy), ny_ - 2);
  const double tx = fx - i;
  const double ty = fy - j;
  return (1 - tx) * (1 - ty) * f[node_index(i, j)] +
         tx * (1 - ty) * f[node_index(i + 1, j)] +
         (1 - tx) * ty * f[node_index(i, j + 1)] +
         tx * ty * f[node_index(i + 1, j + 1)];
}

std::vector<double> KineticMesh::project(const std::function<double(Point2)>& fn) const {
  std::vector<double> out(node_count());
  for (int idx = 0; idx < node_count(); ++idx) out[idx] = fn(node(idx));
  return out;
}

void KineticOperator::apply(const std::vector<double>& f, std::vector<double>& out) const {
  out.assign(n_, 0.0);
  for (int r = 0; r < n_; ++r) {
    const double* row = &a_[static_cast<size_t>(r) * n_];
    double acc = 0.0;
    for (int c = 0; c < n_; ++c) acc += row[c] * f[c];
    out[r] = acc;
  }
}

double KineticOperator::norm_inf() const {
  double best = 0.0;
  for (int r = 0; r < n_; ++r) {
    const double* row = &a_[static_cast<size_t>(r) * n_];
    double s = 0.0;
    for (int c = 0; c < n_; ++c) s += std::fabs(row[c]);
    best = std::max(best, s);
  }
  return best;
}

namespace {

// Bilinear scatter with even extension; points outside the box are dropped
// (the kernel weight vanishes wherever that happens).
template <class Emit>
void scatter_even(const KineticMesh& mesh, Point2 p, double coeff, Emit&& emit) {
  if (coeff == 0.0) return;
  if (p.x < 0.0) p = -p;
  const auto& spec = mesh.spec();
  const double fx = (p.x - spec.a) / mesh.dx();
  const double fy = (p.y + spec.c) / mesh.dx();
  if (fx < 0.0 || fy < 0.0 || fx > mesh.nx() - 1 || fy > mesh.ny() - 1) return;
  const int i = std::min(static_cast<int>(fx), mesh.nx() - 2);
  const int j = std::min(static_cast<int>(fy), mesh.ny() - 2);
  const double tx = fx - i;
  const double ty = fy - j;
  emit(mesh.node_index(i, j), coeff * (1 - tx) * (1 - ty));
  emit(mesh.node_index(i + 1, j), coeff * tx * (1 - ty));
  emit(mesh.node_index(i, j + 1), coeff * (1 - tx) * ty);
  emit(mesh.node_index(i + 1, j + 1), coeff * tx * ty);
}

// Resonant-curve quadrature for one mesh row; emit(col, value) accumulates
// matrix contributions, the f(m) coefficient goes to col == row.
template <class Emit>
void resonant_row(const KineticMesh& mesh, const DispersionParams& params, int n_sigma,
                  KernelConvention conv, int row, Emit&& emit) {
  const auto& spec = mesh.spec();
  const Point2 m = mesh.node(row);
  for (const auto& piece : sigma_interval(m, spec)) {
    const double ds = (piece.hi - piece.lo) / n_sigma;
    for (int branch : {+1, -1}) {
      for (int q = 0; q < n_sigma; ++q) {
        const double sigma = piece.lo + (q + 0.5) * ds;
        const CurvePoint cp = curve_point_and_weight(sigma, 0.0, m, branch, params, spec);
        const KernelTriple k = linearized_kernels(m, cp.j, cp.p, spec, conv);
        if (k.L == 0.0 && k.S_p == 0.0 && k.S_j == 0.0) continue;
        const double w = cp.weight * ds;
        emit(row, w * k.L);
        scatter_even(mesh, cp.p, w * k.S_p, emit);
        scatter_even(mesh, cp.j, w * k.S_j, emit);
      }
    }
  }
}

// Column quadrature of the Lorentzian operator row: p_x runs over node
// columns of both half planes; at fixed p_x the mismatch is the exact
// quadratic A y^2 + B y + C in p_y. The y-partition combines the node grid
// with geometric fans around the Lorentzian peaks (from the peak width out
// to the node spacing), so midpoint cells resolve the kernel at any
// lambda > 0 on a fixed mesh.
template <class Emit>
void lorentzian_row(const KineticMesh& mesh, const DispersionParams& params,
                    double lambda, KernelConvention conv, int row, Emit&& emit) {
  const auto& spec = mesh.spec();
  const Point2 m = mesh.node(row);
  const double eta = params.eta;
  const double wm = omega(m, params);
  const double ylo = std::max(-spec.c, m.y - spec.c);
  const double yhi = std::min(spec.c, m.y + spec.c);
  if (yhi <= ylo) return;

  std::vector<double> knots;
  for (int sign_x : {+1, -1}) {
    for (int ix = 0; ix < mesh.nx(); ++ix) {
      const double X = sign_x * (spec.a + ix * mesh.dx());
      const double jx = m.x - X;
      if (std::fabs(jx) <= spec.a || std::fabs(jx) >= spec.b) continue;  // psi(j) = 0
      if (std::fabs(X) >= spec.b) continue;
      const double A = -eta * m.x / (jx * X);
      const double B = 2.0 * eta * m.y / jx;
      const double C = wm - jx * jx * jx - X * X * X - eta * m.y * m.y / jx;

      knots.clear();
      for (int jy = 0; jy < mesh.ny(); ++jy) {
        const double y = -spec.c + jy * mesh.dx();
        if (y >= ylo && y <= yhi) knots.push_back(y);
      }
      knots.push_back(ylo);
      knots.push_back(yhi);
      const double vertex = -B / (2.0 * A);
      if (vertex > ylo && vertex < yhi) knots.push_back(vertex);
      const double disc = B * B - 4.0 * A * C;
      if (disc >= 0.0) {
        const double rt = std::sqrt(disc);
        for (double root : {(-B + rt) / (2.0 * A), (-B - rt) / (2.0 * A)}) {
          if (root < ylo - 1.0 || root > yhi + 1.0) continue;
          const double slope = std::max(std::fabs(2.0 * A * root + B), 0.05);
          double step = 0.25 * lambda / slope;
          for (double y_off = 0.0; y_off < 2.0 * mesh.dx(); y_off += step, step *= 1.6) {
            for (double sn : {-1.0, 1.0}) {
              const double y = root + sn * y_off;
              if (y > ylo && y < yhi) knots.push_back(y);
            }
          }
        }
      }
      std::sort(knots.begin(), knots.end());
      knots.erase(std::unique(knots.begin(), knots.end(),
                              [](double u, double v) { return std::fabs(u - v) < 1e-13; }),
                  knots.end());

      for (size_t q = 0; q + 1 < knots.size(); ++q) {
        const double y1 = knots[q], y2 = knots[q + 1];
        const double dy = y2 - y1;
        if (dy <= 0.0) continue;
        const double ym = 0.5 * (y1 + y2);
        const double mis = (A * ym + B) * ym + C;
        const double lor = lambda / (mis * mis + lambda * lambda) / M_PI;
        const Point2 p{X, ym};
        const Point2 j{jx, m.y - ym};
        const KernelTriple k = linearized_kernels(m, j, p, spec, conv);
        if (k.L == 0.0 && k.S_p == 0.0 && k.S_j == 0.0) continue;
        const double w = lor * dy * mesh.dx();
        emit(row, w * k.L);
        scatter_even(mesh, p, w * k.S_p, emit);
        scatter_even(mesh, j, w * k.S_j, emit);
      }
    }
  }
}

}  // namespace

KineticOperator assemble_resonant(const KineticMesh& mesh, const DispersionParams& params,
                                  int n_sigma, KernelConvention conv) {
  if (n_sigma < 1) throw std::invalid_argument("assemble_resonant: need n_sigma >= 1");
  KineticOperator op(mesh.node_count());
  for (int row = 0; row < mesh.node_count(); ++row) {
    if (!mesh.active(row)) continue;
    resonant_row(mesh, params, n_sigma, conv, row,
                 [&](int col, double val) { op.at(row, col) += val; });
  }
  return op;
}

KineticOperator assemble_lorentzian(const KineticMesh& mesh,
                                    const DispersionParams& params, double lambda,
                                    KernelConvention conv) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lorentzian: need lambda > 0");
  KineticOperator op(mesh.node_count());
  for (int row = 0; row < mesh.node_count(); ++row) {
    if (!mesh.active(row)) continue;
    lorentzian_row(mesh, params, lambda, conv, row,
                   [&](int col, double val) { op.at(row, col) += val; });
  }
  return op;
}

std::vector<double> rhs_lorentzian_midpoint(const std::vector<double>& f,
                                            const KineticMesh& mesh,
                                            const DispersionParams& params,
                                            double lambda, KernelConvention conv) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lorentzian: need lambda > 0");
  const auto& spec = mesh.spec();
  std::vector<double> out(mesh.node_count(), 0.0);
  const double w = mesh.dx() * mesh.dx();
  for (int row = 0; row < mesh.node_count(); ++row) {
    if (!mesh.active(row)) continue;
    const Point2 m = mesh.node(row);
    const double wm = omega(m, params);
    double acc = 0.0;
    for (int q = 0; q < mesh.node_count(); ++q) {
      for (int sign_p : {+1, -1}) {
        const Point2 p = sign_p > 0 ? mesh.node(q) : -mesh.node(q);
        const Point2 j = m - p;
        if (std::fabs(j.x) <= spec.a || std::fabs(j.x) >= spec.b) continue;
        const KernelTriple k = linearized_kernels(m, j, p, spec, conv);
        if (k.L == 0.0 && k.S_p == 0.0 && k.S_j == 0.0) continue;
        const double mis = wm - omega(j, params) - omega(p, params);
        const double lor = lambda / (mis * mis + lambda * lambda) / M_PI;
        acc += lor * (k.L * f[row] + k.S_p * f[q] + k.S_j * mesh.eval(f, j));
      }
    }
    out[row] = acc * w;
  }
  return out;
}

std::vector<double> rhs_resonant(const std::vector<double>& f, const KineticMesh& mesh,
                                 const DispersionParams& params, int n_sigma,
                                 KernelConvention conv) {
  std::vector<double> out(mesh.node_count(), 0.0);
  for (int row = 0; row < mesh.node_count(); ++row) {
    if (!mesh.active(row)) continue;
    double acc = 0.0;
    resonant_row(mesh, params, n_sigma, conv, row,
                 [&](int col, double val) { acc += val * f[col]; });
    out[row] = acc;
  }
  return out;
}

KineticTrajectory solve_kinetic(const KineticOperator& op, const std::vector<double>& f0,
                                double T, double dtau, int save_every) {
  if (!(T >= 0.0) || !(dtau > 0.0))
    throw std::invalid_argument("solve: need T >= 0 and dtau > 0");
  KineticTrajectory traj;
  traj.op_norm = op.norm_inf();
  int halvings = 0;
  while (dtau * traj.op_norm >= 1.0 && halvings < 8) {
    dtau *= 0.5;
    ++halvings;
  }
  if (dtau * traj.op_norm >= 1.0)
    throw std::runtime_error("solve: operator norm too large for stable stepping");
  traj.halvings = halvings;
  const int n_steps = T > 0.0 ? std::max(1, static_cast<int>(std::ceil(T / dtau - 1e-12))) : 0;
  if (n_steps > 0) dtau = T / n_steps;
  traj.dtau_used = dtau;

  double f0max = 0.0;
  for (double v : f0) f0max = std::max(f0max, std::fabs(v));

  std::vector<double> f = f0, k1, k2, k3, k4, tmp(f0.size());
  traj.taus.push_back(0.0);
  traj.states.push_back(f);
  for (int step = 1; step <= n_steps; ++step) {
    op.apply(f, k1);
    for (size_t i = 0; i < f.size(); ++i) tmp[i] = f[i] + 0.5 * dtau * k1[i];
    op.apply(tmp, k2);
    for (size_t i = 0; i < f.size(); ++i) tmp[i] = f[i] + 0.5 * dtau * k2[i];
    op.apply(tmp, k3);
    for (size_t i = 0; i < f.size(); ++i) tmp[i] = f[i] + dtau * k3[i];
    op.apply(tmp, k4);
    for (size_t i = 0; i < f.size(); ++i)
      f[i] += dtau / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);

    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::fabs(v));
    if (fmax > 1e6 * (f0max + 1e-300))
      throw std::runtime_error("solve: nodal blowup at step " + std::to_string(step));

    if (step % std::max(1, save_every) == 0 || step == n_steps) {
      traj.taus.push_back(step * dtau);
      traj.states.push_back(f);
    }
  }
  return traj;
}

}  // namespace wavekin
