#pragma once

#include <optional>
#include <string>
#include <vector>

#include "domain.hpp"

namespace wavekin {

struct Rat64 {
  long long num = 0;
  long long den = 1;  // > 0, gcd(num, den) = 1

  static Rat64 make(long long n, long long d);
  double to_double() const { return static_cast<double>(num) / den; }
};

/// eta = u + v sqrt(d) with u, v rational and d a nonnegative integer.
/// Perfect-square d is folded into u at parse time, so v != 0 means eta is
/// irrational and the rational and sqrt(d) parts of a resonance test must
/// vanish separately.
struct EtaExact {
  Rat64 u;
  Rat64 v;
  long long d = 0;

  bool is_rational() const { return v.num == 0; }
  double to_double() const;

  /// Accepts "1", "2.7", "3/2", "sqrt2", "sqrt(2)", "2*sqrt3",
  /// "1/2+3*sqrt(5)", "1-sqrt2", ...
  static std::optional<EtaExact> parse(const std::string& text);
};

enum class ScanOrder { ThreeWave, FourWaveOffRes };

struct DenominatorScan {
  int N = 0;
  double min_abs = 0.0;          // smallest nonzero |denominator|
  long long exact_zero_count = 0;
  long long tuples = 0;
  std::vector<long long> histogram;  // decade bins of |denominator|, 1e-12..1e3
};

struct ScanBudgetExceeded : std::runtime_error {
  explicit ScanBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Brute-force small-denominator scan with every leg in D_N (both halves via
/// the k -> -k symmetry). Exact zeros are counted separately and never enter
/// the minimum. Refuses to run past the tuple budget rather than sampling.
DenominatorScan scan_small_denominators(const FrequencyGrid& grid, const EtaExact& eta,
                                        ScanOrder order,
                                        long long budget = 1000000000LL);

struct DecayFit {
  double nu_hat = 0.0;   // log(min) ~ log(c) - nu log(N)
  double c_hat = 0.0;
  double residual = 0.0; // RMS of the fit in log space
  double beta_hat = 0.0; // derived diagnostic: 2 nu_hat
};

DecayFit fit_denominator_decay(const std::vector<DenominatorScan>& scans);

struct ResonantTriple {
  int32_t j = -1, k = -1, l = -1;  // grid slots
  enum class Cls { TrivialPairing, XSwapFamily } cls = Cls::TrivialPairing;
  bool operator==(const ResonantTriple&) const = default;
};

struct ResonantModulus {
  int32_t m = -1;  // grid slot of the base mode
  std::vector<ResonantTriple> triples;
  long long trivial_count = 0;
  long long family_count = 0;
};

/// Exact four-wave resonances m = k - j + l, omega_m + omega_j = omega_k +
/// omega_l with all legs in D_N^+, enumerated through the structural
/// reduction ({m_x, j_x} = {k_x, l_x} as multisets, then the one-parameter
/// y-families filtered by lattice membership) and cross-validated against an
/// O(card^2) brute-force scan. A mismatch is a hard fault. Requires an
/// irrational eta.
ResonantModulus enumerate_resonant_modulus(const FrequencyGrid& grid, int m_slot,
                                           const EtaExact& eta);

}  // namespace wavekin
