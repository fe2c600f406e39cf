#pragma once

#include <optional>
#include <string>

#include "domain.hpp"
#include "field.hpp"
#include "rng.hpp"

namespace wavekin {

/// Smooth variance perturbation g0 on D+, extended evenly (g0(-k) = g0(k))
/// and clipped by psi+ so it vanishes at the domain edge.
struct PerturbationProfile {
  enum class Kind { GaussianBump };
  Kind kind = Kind::GaussianBump;
  double amplitude = 1.0;
  double x0 = 1.2;
  double y0 = 0.0;
  double width = 0.35;

  double eval(Point2 k, const DomainSpec& spec) const;
};

struct InitLaw {
  enum class Variant { Invariant, ProductPerturbed, MixturePerturbed };
  Variant variant = Variant::Invariant;
  double alpha = 1.0;
};

/// Draw from the invariant Gaussian measure: P_k, Q_k ~ N(0, gamma_k/2).
ModeField sample_invariant(const FrequencyGrid& grid, const RngStream& stream);

struct SamplePair {
  ModeField field;
  std::optional<ModeField> baseline;
};

/// Product-perturbed law: per-mode variance beta_k = gamma_k + g0(k) N^-alpha.
/// In coupled mode the baseline reuses the same standard normals with the
/// invariant scale, so per draw |V_pert|^2 / |V_base|^2 = beta/gamma exactly.
SamplePair sample_perturbed_product(const FrequencyGrid& grid,
                                    const PerturbationProfile& g0, double alpha,
                                    const RngStream& stream, bool coupled);

/// Mixture law of the alpha = 2 construction: one uniformly chosen mode j
/// carries variance gamma_j + (card(D_N^+)/N^2) g0(j), the rest are invariant.
ModeField sample_perturbed_mixture(const FrequencyGrid& grid,
                                   const PerturbationProfile& g0,
                                   const RngStream& index_stream,
                                   const RngStream& gauss_stream);

/// Analytic chi^2 distance of the product-perturbed law from the invariant
/// measure, prod gamma^2/(gamma^2 - g0^2 N^-2alpha) - 1, accumulated in
/// log space.
double chi_square_product(const FrequencyGrid& grid, const PerturbationProfile& g0,
                          double alpha);

/// Per-mode perturbed variance; throws when it is not positive.
double beta_product(const FrequencyGrid& grid, int slot,
                    const PerturbationProfile& g0, double alpha);
double beta_mixture(const FrequencyGrid& grid, int slot, const PerturbationProfile& g0);

}  // namespace wavekin
