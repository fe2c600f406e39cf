#include "manifold.hpp"

#include <cmath>
#include <stdexcept>

namespace wavekin {

double big_omega(Point2 m, Point2 p, const DispersionParams& params) {
  return omega(m, params) - omega(m - p, params) - omega(p, params);
}

Point2 big_omega_grad_p(Point2 m, Point2 p, const DispersionParams& params) {
  const auto gj = omega_and_grad(m - p, params);
  const auto gp = omega_and_grad(p, params);
  return {gj.d_kx - gp.d_kx, gj.d_ky - gp.d_ky};
}

double curve_z_limit(const DomainSpec& spec) {
  const double a2 = spec.a * spec.a;
  return 3.0 / 16.0 * a2 * a2;
}

std::vector<SigmaInterval> sigma_interval(Point2 m, const DomainSpec& spec) {
  if (!(m.x > spec.a && m.x < spec.b))
    throw std::invalid_argument("sigma_interval: need a < m_x < b");
  const double a2 = 0.5 * spec.a;
  const double b = spec.b;
  const SigmaInterval raw[3] = {
      {-b, -a2}, {a2, m.x - a2}, {m.x + a2, b}};
  std::vector<SigmaInterval> out;
  for (const auto& piece : raw)
    if (piece.hi > piece.lo) out.push_back(piece);
  return out;
}

CurvePoint curve_point_and_weight(double sigma, double z, Point2 m, int branch,
                                  const DispersionParams& params,
                                  const DomainSpec& spec) {
  if (branch != 1 && branch != -1)
    throw std::invalid_argument("curve: branch must be +1 or -1");
  if (!(std::fabs(z) < curve_z_limit(spec)))
    throw std::invalid_argument("curve: need |z| < z0 = (3/16) a^4");
  const double u = (m.x - sigma) * sigma;
  if (u == 0.0) throw std::invalid_argument("curve: sigma at a pole of the branch");
  const double s_arg = 1.0 - z / (3.0 * m.x * u);
  if (!(s_arg > 0.0))
    throw std::invalid_argument("curve: square-root argument not positive");
  const double root_eta = std::sqrt(3.0 / params.eta);
  const double R = std::sqrt(s_arg);
  const double du = m.x - 2.0 * sigma;

  CurvePoint cp;
  cp.p = {sigma, sigma * m.y / m.x + branch * root_eta * u * R};
  cp.j = m - cp.p;
  cp.dkappa_y = m.y / m.x + branch * root_eta * du * (R + z / (6.0 * m.x * u * R));
  const Point2 grad = big_omega_grad_p(m, cp.p, params);
  cp.grad_norm = std::hypot(grad.x, grad.y);
  if (cp.grad_norm == 0.0)
    throw std::invalid_argument("curve: degenerate gradient of Omega");
  // Microcanonical weight: parameter speed of kappa (kappa_x = sigma, so
  // |d kappa| = sqrt(1 + kappa_y'^2) d sigma) over |grad_p Omega|. This is
  // the Euclidean co-area measure; the Lorentzian concentration
  // (1/pi) lambda/(Omega^2+lambda^2) -> dSigma as lambda -> 0 holds for it.
  cp.weight = std::hypot(1.0, cp.dkappa_y) / cp.grad_norm;
  return cp;
}

double integrate_curve(const TriadFn& phi, Point2 m, double z, int n_sigma,
                       const DispersionParams& params, const DomainSpec& spec) {
  if (m.x < 0.0) {
    // Gamma(z,m) maps to Gamma(-z,-m) under p -> -p with the same measure.
    TriadFn flipped = [&phi](Point2 mm, Point2 jj, Point2 pp) {
      return phi(-mm, -jj, -pp);
    };
    return integrate_curve(flipped, -m, -z, n_sigma, params, spec);
  }
  if (n_sigma < 1) throw std::invalid_argument("integrate_curve: need n_sigma >= 1");
  double total = 0.0;
  for (const auto& piece : sigma_interval(m, spec)) {
    const double dsigma = (piece.hi - piece.lo) / n_sigma;
    for (int branch : {+1, -1}) {
      double sum = 0.0;
      for (int q = 0; q < n_sigma; ++q) {
        const double sigma = piece.lo + (q + 0.5) * dsigma;
        const CurvePoint cp = curve_point_and_weight(sigma, z, m, branch, params, spec);
        sum += phi(m, cp.j, cp.p) * cp.weight;
      }
      total += sum * dsigma;
    }
  }
  return total;
}

}  // namespace wavekin
