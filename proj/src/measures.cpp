#include "measures.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wavekin {

double PerturbationProfile::eval(Point2 k, const DomainSpec& spec) const {
  if (k.x < 0.0) k = -k;  // even extension
  const double dx = k.x - x0;
  const double dy = k.y - y0;
  const double bump =
      amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
  return bump * psi_plus(k, spec);
}

namespace {

void require_nonempty(const FrequencyGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("sampler: empty grid");
}

[[noreturn]] void throw_bad_variance(const GridMode& m, double beta) {
  throw std::invalid_argument("sampler: nonpositive variance beta=" +
                              std::to_string(beta) + " at mode (" +
                              std::to_string(m.ix) + "," + std::to_string(m.iy) + ")");
}

}  // namespace

double beta_product(const FrequencyGrid& grid, int slot, const PerturbationProfile& g0,
                    double alpha) {
  const auto& m = grid.mode(slot);
  const double scale = std::pow(static_cast<double>(grid.N()), -alpha);
  const double beta = m.gamma + g0.eval({m.kx, m.ky}, grid.spec()) * scale;
  if (!(beta > 0.0)) throw_bad_variance(m, beta);
  return beta;
}

double beta_mixture(const FrequencyGrid& grid, int slot, const PerturbationProfile& g0) {
  const auto& m = grid.mode(slot);
  const double density = grid.mode_count() / static_cast<double>(grid.N()) / grid.N();
  const double beta = m.gamma + density * g0.eval({m.kx, m.ky}, grid.spec());
  if (!(beta > 0.0)) throw_bad_variance(m, beta);
  return beta;
}

ModeField sample_invariant(const FrequencyGrid& grid, const RngStream& stream) {
  require_nonempty(grid);
  ModeField f;
  f.v.resize(grid.mode_count());
  for (int s = 0; s < grid.mode_count(); ++s) {
    double zp, zq;
    stream.normal_pair(static_cast<uint64_t>(s), zp, zq);
    const double sd = std::sqrt(0.5 * grid.mode(s).gamma);
    f.v[s] = {sd * zp, sd * zq};
  }
  return f;
}

SamplePair sample_perturbed_product(const FrequencyGrid& grid,
                                    const PerturbationProfile& g0, double alpha,
                                    const RngStream& stream, bool coupled) {
  require_nonempty(grid);
  if (!(alpha >= 1.0 && alpha <= 2.0))
    throw std::invalid_argument("sampler: need 1 <= alpha <= 2");
  SamplePair out;
  out.field.v.resize(grid.mode_count());
  if (coupled) out.baseline.emplace().v.resize(grid.mode_count());
  for (int s = 0; s < grid.mode_count(); ++s) {
    double zp, zq;
    stream.normal_pair(static_cast<uint64_t>(s), zp, zq);
    const double beta = beta_product(grid, s, g0, alpha);
    const double sd = std::sqrt(0.5 * beta);
    out.field.v[s] = {sd * zp, sd * zq};
    if (coupled) {
      const double sd0 = std::sqrt(0.5 * grid.mode(s).gamma);
      out.baseline->v[s] = {sd0 * zp, sd0 * zq};
    }
  }
  return out;
}

ModeField sample_perturbed_mixture(const FrequencyGrid& grid,
                                   const PerturbationProfile& g0,
                                   const RngStream& index_stream,
                                   const RngStream& gauss_stream) {
  require_nonempty(grid);
  const int j = static_cast<int>(
      index_stream.uniform_index(0, static_cast<uint32_t>(grid.mode_count())));
  ModeField f;
  f.v.resize(grid.mode_count());
  for (int s = 0; s < grid.mode_count(); ++s) {
    double zp, zq;
    gauss_stream.normal_pair(static_cast<uint64_t>(s), zp, zq);
    const double var = (s == j) ? beta_mixture(grid, s, g0) : grid.mode(s).gamma;
    const double sd = std::sqrt(0.5 * var);
    f.v[s] = {sd * zp, sd * zq};
  }
  return f;
}

double chi_square_product(const FrequencyGrid& grid, const PerturbationProfile& g0,
                          double alpha) {
  require_nonempty(grid);
  const double scale = std::pow(static_cast<double>(grid.N()), -alpha);
  double log_prod = 0.0;
  for (int s = 0; s < grid.mode_count(); ++s) {
    const auto& m = grid.mode(s);
    const double g = g0.eval({m.kx, m.ky}, grid.spec()) * scale;
    const double ratio = g / m.gamma;
    if (!(std::fabs(ratio) < 1.0))
      throw std::invalid_argument(
          "chi_square: divergent factor |g0| N^-alpha >= gamma at mode (" +
          std::to_string(m.ix) + "," + std::to_string(m.iy) + ")");
    log_prod -= std::log1p(-ratio * ratio);
  }
  return std::expm1(log_prod);
}

}  // namespace wavekin
