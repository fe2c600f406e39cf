#pragma once

#include <functional>
#include <vector>

#include "domain.hpp"
#include "manifold.hpp"

namespace wavekin {

/// Sign pairing of the full-lattice linearized kernels. DPlusDerived pairs
/// sign(m_x p_x) with the gamma_j / f(p) slots, which is the unique choice
/// under which the Rayleigh-Jeans profile is pointwise stationary on every
/// triad m = j + p; it matches the D+-restricted system exactly. PaperFullD
/// keeps the other pairing for reference (its stationarity defect on mixed
/// triads is recorded by the tests).
enum class KernelConvention { DPlusDerived, PaperFullD };

struct KernelTriple {
  double L;    // coefficient of f(m)
  double S_p;  // coefficient of f(p)
  double S_j;  // coefficient of f(j)
};

/// Linearized collision kernels on the triad m = j + p (enforced). All three
/// vanish when any leg leaves supp psi.
KernelTriple linearized_kernels(Point2 m, Point2 j, Point2 p,
                                const DomainSpec& spec,
                                KernelConvention conv = KernelConvention::DPlusDerived);

/// Three-wave collision integrand of the nonlinear kinetic equation at the
/// profile r (positive on D); used for stationarity checks.
double nonlinear_integrand(const std::function<double(Point2)>& r, Point2 m,
                           Point2 j, Point2 p, const DomainSpec& spec);

/// Uniform mesh over the D+ bounding box [a,b] x [-c,c] with spacing dx
/// (a/dx and c/dx must be integers so triad legs stay on node columns).
/// Node (i,j) sits at (a + i dx, -c + j dx). Evaluation is even in m and
/// zero outside the box.
class KineticMesh {
 public:
  KineticMesh(const DomainSpec& spec, double dx);

  const DomainSpec& spec() const { return spec_; }
  double dx() const { return dx_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int node_count() const { return nx_ * ny_; }
  int node_index(int i, int j) const { return i * ny_ + j; }
  Point2 node(int idx) const {
    return {spec_.a + (idx / ny_) * dx_, -spec_.c + (idx % ny_) * dx_};
  }
  bool active(int idx) const { return active_[idx] != 0; }
  int active_count() const { return active_count_; }

  /// Bilinear evaluation with even extension f(-m) = f(m), zero outside.
  double eval(const std::vector<double>& f, Point2 p) const;

  /// Nodal values of a function of the point.
  std::vector<double> project(const std::function<double(Point2)>& fn) const;

 private:
  DomainSpec spec_;
  double dx_;
  int nx_, ny_;
  std::vector<uint8_t> active_;
  int active_count_ = 0;
};

/// Dense discretization of the linearized operator on mesh nodes.
class KineticOperator {
 public:
  KineticOperator(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {}

  int size() const { return n_; }
  double& at(int row, int col) { return a_[static_cast<size_t>(row) * n_ + col]; }
  double at(int row, int col) const { return a_[static_cast<size_t>(row) * n_ + col]; }

  void apply(const std::vector<double>& f, std::vector<double>& out) const;

  /// Max row sum norm (operator norm on sup-normed nodal vectors).
  double norm_inf() const;

 private:
  int n_;
  std::vector<double> a_;
};

/// Exact-resonant operator: curve quadrature over Gamma(0,m) per active node,
/// composite midpoint with n_sigma nodes per interval piece.
KineticOperator assemble_resonant(const KineticMesh& mesh, const DispersionParams& params,
                                  int n_sigma,
                                  KernelConvention conv = KernelConvention::DPlusDerived);

/// Quasi-resonant (Lorentzian) operator. Column quadrature: for each p_x node
/// column the mismatch is an exact quadratic in p_y, so the Lorentzian factor
/// is integrated with exact arctan cell masses on a root-refined y-partition;
/// resolves any lambda > 0 on a fixed mesh.
KineticOperator assemble_lorentzian(const KineticMesh& mesh,
                                    const DispersionParams& params, double lambda,
                                    KernelConvention conv = KernelConvention::DPlusDerived);

/// Literal 2D midpoint quadrature over active p nodes (both half planes).
/// Valid when the mesh resolves the Lorentzian width.
std::vector<double> rhs_lorentzian_midpoint(
    const std::vector<double>& f, const KineticMesh& mesh,
    const DispersionParams& params, double lambda,
    KernelConvention conv = KernelConvention::DPlusDerived);

/// One-shot resonant right-hand side (same quadrature as assemble_resonant).
std::vector<double> rhs_resonant(const std::vector<double>& f, const KineticMesh& mesh,
                                 const DispersionParams& params, int n_sigma,
                                 KernelConvention conv = KernelConvention::DPlusDerived);

struct KineticTrajectory {
  std::vector<double> taus;
  std::vector<std::vector<double>> states;  // nodal values at taus
  double op_norm = 0.0;
  double dtau_used = 0.0;
  int halvings = 0;
};

/// Classical RK4 in rescaled time. The stability guard dtau |A| < 1 halves
/// dtau (up to 8 times); nodal blowup beyond 1e6 |f0| aborts.
KineticTrajectory solve_kinetic(const KineticOperator& op, const std::vector<double>& f0,
                                double T, double dtau, int save_every = 1);

}  // namespace wavekin
