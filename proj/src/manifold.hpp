#pragma once

#include <functional>
#include <vector>

#include "domain.hpp"

namespace wavekin {

/// Frequency mismatch Omega(m,p) = omega_m - omega_{m-p} - omega_p.
/// Defined wherever m_x, p_x and m_x - p_x are nonzero.
double big_omega(Point2 m, Point2 p, const DispersionParams& params);

/// Gradient of Omega in p: (d_x omega(m-p) - d_x omega(p),
///                          d_y omega(m-p) - d_y omega(p)).
Point2 big_omega_grad_p(Point2 m, Point2 p, const DispersionParams& params);

/// Level threshold z0 = (3/16) a^4 below which the two-branch curve
/// parametrization is valid.
double curve_z_limit(const DomainSpec& spec);

struct SigmaInterval {
  double lo;
  double hi;
};

/// The three pieces of I_m = (-inf,-a/2) u (a/2, m_x-a/2) u (m_x+a/2, inf)
/// clipped to p_x in (-b, b). Empty pieces are dropped. Requires a < m_x < b.
std::vector<SigmaInterval> sigma_interval(Point2 m, const DomainSpec& spec);

struct CurvePoint {
  Point2 p;             // (sigma, kappa_y)
  Point2 j;             // m - p
  double weight;        // |d_sigma kappa_y| / |grad_p Omega|
  double dkappa_y;      // analytic d_sigma kappa_y
  double grad_norm;     // |grad_p Omega(m, p)|
};

/// Point of the branch curve Gamma(z,m) at parameter sigma, with the
/// microcanonical weight. branch is +1 or -1. Throws when the square-root
/// argument is not positive or the gradient degenerates.
CurvePoint curve_point_and_weight(double sigma, double z, Point2 m, int branch,
                                  const DispersionParams& params,
                                  const DomainSpec& spec);

using TriadFn = std::function<double(Point2 m, Point2 j, Point2 p)>;

/// Composite-midpoint quadrature of phi over Gamma(z,m) with the
/// microcanonical measure: sum over branches and interval pieces with
/// n_sigma nodes per piece. For m in D- the symmetry
/// p in Gamma(z,m) <=> -p in Gamma(-z,-m) is applied.
double integrate_curve(const TriadFn& phi, Point2 m, double z, int n_sigma,
                       const DispersionParams& params, const DomainSpec& spec);

}  // namespace wavekin
