#include "census.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wavekin {

namespace {

using i128 = __int128;

long long igcd(long long a, long long b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rat64 Rat64::make(long long n, long long d) {
  if (d == 0) throw std::invalid_argument("rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const long long g = std::max(1LL, igcd(n, d));
  return Rat64{n / g, d / g};
}

double EtaExact::to_double() const {
  return u.to_double() + v.to_double() * std::sqrt(static_cast<double>(d));
}

namespace {

bool parse_rational_token(const std::string& s, Rat64& out) {
  if (s.empty()) return false;
  size_t pos = 0;
  long long sign = 1;
  if (s[pos] == '+' || s[pos] == '-') {
    sign = s[pos] == '-' ? -1 : 1;
    ++pos;
  }
  long long num = 0, den = 1;
  bool any = false;
  while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) {
    num = num * 10 + (s[pos] - '0');
    ++pos;
    any = true;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) {
      num = num * 10 + (s[pos] - '0');
      den *= 10;
      ++pos;
      any = true;
    }
  } else if (pos < s.size() && s[pos] == '/') {
    ++pos;
    long long q = 0;
    bool qany = false;
    while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) {
      q = q * 10 + (s[pos] - '0');
      ++pos;
      qany = true;
    }
    if (!qany || q == 0) return false;
    den = q;
  }
  if (!any || pos != s.size()) return false;
  out = Rat64::make(sign * num, den);
  return true;
}

bool parse_sqrt_token(const std::string& s, long long& d) {
  if (s.rfind("sqrt", 0) != 0) return false;
  std::string rest = s.substr(4);
  if (!rest.empty() && rest.front() == '(' && rest.back() == ')')
    rest = rest.substr(1, rest.size() - 2);
  if (rest.empty()) return false;
  long long val = 0;
  for (char c : rest) {
    if (!isdigit(static_cast<unsigned char>(c))) return false;
    val = val * 10 + (c - '0');
  }
  d = val;
  return true;
}

}  // namespace

std::optional<EtaExact> EtaExact::parse(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) return std::nullopt;

  EtaExact eta;
  const size_t sq = s.find("sqrt");
  if (sq == std::string::npos) {
    if (!parse_rational_token(s, eta.u)) return std::nullopt;
  } else {
    // [u +|-] [v*] sqrt(d)
    std::string head = s.substr(0, sq);
    if (!parse_sqrt_token(s.substr(sq), eta.d)) return std::nullopt;
    Rat64 coeff{1, 1};
    if (!head.empty() && head.back() == '*') {
      head.pop_back();
      size_t split = head.find_last_of("+-");
      std::string coeff_str, u_str;
      if (split == std::string::npos || split == 0) {
        coeff_str = head;
      } else {
        coeff_str = head.substr(split);
        u_str = head.substr(0, split);
      }
      if (!parse_rational_token(coeff_str, coeff)) return std::nullopt;
      if (!u_str.empty() && !parse_rational_token(u_str, eta.u)) return std::nullopt;
    } else if (!head.empty()) {
      if (head == "+") {
      } else if (head == "-") {
        coeff = Rat64{-1, 1};
      } else if (head.back() == '+' || head.back() == '-') {
        if (!parse_rational_token(head.substr(0, head.size() - 1), eta.u))
          return std::nullopt;
        if (head.back() == '-') coeff = Rat64{-1, 1};
      } else {
        return std::nullopt;
      }
    }
    eta.v = coeff;
  }
  // Fold perfect squares into the rational part.
  if (eta.v.num != 0) {
    const long long r =
        static_cast<long long>(std::llround(std::sqrt(static_cast<double>(eta.d))));
    if (r * r == eta.d) {
      eta.u = Rat64::make(eta.u.num * eta.v.den + eta.v.num * r * eta.u.den,
                          eta.u.den * eta.v.den);
      eta.v = Rat64{0, 1};
      eta.d = 0;
    }
  }
  if (!(eta.to_double() > 0.0)) return std::nullopt;
  return eta;
}

namespace {

// Exact zero test for X/N^3 + eta * Y/(N*D) with integer X, Y, D != 0.
bool exact_zero(i128 X, i128 Y, i128 D, long long N, const EtaExact& eta) {
  if (!eta.is_rational()) return Y == 0 && X == 0;
  const i128 lhs = X * D * static_cast<i128>(eta.u.den) +
                   static_cast<i128>(eta.u.num) * Y * static_cast<i128>(N) *
                       static_cast<i128>(N);
  return lhs == 0;
}

struct LatticePoint {
  int ix, iy;
};

std::vector<LatticePoint> full_lattice(const FrequencyGrid& grid) {
  std::vector<LatticePoint> pts;
  pts.reserve(2 * grid.mode_count());
  for (const auto& m : grid.modes()) pts.push_back({m.ix, m.iy});
  for (const auto& m : grid.modes()) pts.push_back({-m.ix, -m.iy});
  return pts;
}

struct Histogram {
  static constexpr int kLo = -12, kHi = 3;
  std::vector<long long> bins = std::vector<long long>(kHi - kLo, 0);
  void add(double v) {
    if (v <= 0.0) return;
    int e = static_cast<int>(std::floor(std::log10(v)));
    e = std::clamp(e, kLo, kHi - 1);
    bins[e - kLo]++;
  }
};

}  // namespace

DenominatorScan scan_small_denominators(const FrequencyGrid& grid, const EtaExact& eta,
                                        ScanOrder order, long long budget) {
  if (grid.empty()) throw std::invalid_argument("census: empty grid");
  const long long N = grid.N();
  const long double etad = eta.to_double();
  DenominatorScan out;
  out.N = grid.N();
  Histogram hist;
  long double min_abs = 1e300L;

  const auto pts = full_lattice(grid);
  const long long M2 = static_cast<long long>(pts.size());

  auto in_lattice = [&grid](long long ix, long long iy) {
    if (ix > 0) return grid.slot_of(static_cast<int>(ix), static_cast<int>(iy)) >= 0;
    if (ix < 0) return grid.slot_of(static_cast<int>(-ix), static_cast<int>(-iy)) >= 0;
    return false;
  };

  if (order == ScanOrder::ThreeWave) {
    const long long planned = M2 * M2;
    if (planned > budget)
      throw ScanBudgetExceeded("census: three-wave scan needs " +
                               std::to_string(planned) + " tuples, budget " +
                               std::to_string(budget));
    for (const auto& k : pts) {
      for (const auto& j : pts) {
        const long long sx = k.ix + j.ix, sy = k.iy + j.iy;
        if (!in_lattice(sx, sy)) continue;
        ++out.tuples;
        const i128 X = static_cast<i128>(3LL * k.ix) * j.ix * sx;
        const i128 D = static_cast<i128>(k.ix) * j.ix * sx;
        const i128 Y = static_cast<i128>(sy) * sy * k.ix * j.ix -
                       static_cast<i128>(k.iy) * k.iy * j.ix * sx -
                       static_cast<i128>(j.iy) * j.iy * k.ix * sx;
        if (exact_zero(X, Y, D, N, eta)) {
          ++out.exact_zero_count;
          continue;
        }
        const long double val = std::fabs(
            static_cast<long double>(static_cast<long long>(X)) /
                ((long double)N * N * N) +
            etad * static_cast<long double>(static_cast<long long>(Y)) /
                ((long double)N * static_cast<long double>(static_cast<long long>(D))));
        min_abs = std::min(min_abs, val);
        hist.add(static_cast<double>(val));
      }
    }
  } else {
    const long long planned = grid.mode_count() * M2 * M2;
    if (planned > budget)
      throw ScanBudgetExceeded("census: four-wave scan needs " +
                               std::to_string(planned) + " tuples, budget " +
                               std::to_string(budget));
    // The sign flip (m,j,k,l) -> -(m,j,k,l) negates the denominator, so it is
    // enough to anchor m in D_N^+.
    for (const auto& gm : grid.modes()) {
      for (const auto& j : pts) {
        for (const auto& k : pts) {
          const long long lx = gm.ix + j.ix - k.ix, ly = gm.iy + j.iy - k.iy;
          if (!in_lattice(lx, ly)) continue;
          ++out.tuples;
          const i128 X = static_cast<i128>(gm.ix) * gm.ix * gm.ix +
                         static_cast<i128>(j.ix) * j.ix * j.ix -
                         static_cast<i128>(k.ix) * k.ix * k.ix -
                         static_cast<i128>(lx) * lx * lx;
          const i128 D = static_cast<i128>(gm.ix) * j.ix * k.ix * lx;
          const i128 Y = static_cast<i128>(gm.iy) * gm.iy * j.ix * k.ix * lx +
                         static_cast<i128>(j.iy) * j.iy * gm.ix * k.ix * lx -
                         static_cast<i128>(k.iy) * k.iy * gm.ix * j.ix * lx -
                         static_cast<i128>(ly) * ly * gm.ix * j.ix * k.ix;
          if (exact_zero(X, Y, D, N, eta)) {
            ++out.exact_zero_count;
            continue;
          }
          const long double val = std::fabs(
              static_cast<long double>(static_cast<long long>(X)) /
                  ((long double)N * N * N) +
              etad * static_cast<long double>(static_cast<long long>(Y)) /
                  ((long double)N *
                   static_cast<long double>(static_cast<long long>(D))));
          min_abs = std::min(min_abs, val);
          hist.add(static_cast<double>(val));
        }
      }
    }
  }
  out.min_abs = static_cast<double>(min_abs);
  out.histogram = hist.bins;
  return out;
}

DecayFit fit_denominator_decay(const std::vector<DenominatorScan>& scans) {
  if (scans.size() < 2) throw std::invalid_argument("fit: need at least two scans");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(scans.size());
  for (const auto& s : scans) {
    const double x = std::log(static_cast<double>(s.N));
    const double y = std::log(s.min_abs);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  DecayFit fit;
  fit.nu_hat = -slope;
  fit.c_hat = std::exp(intercept);
  fit.beta_hat = 2.0 * fit.nu_hat;
  double ss = 0.0;
  for (const auto& s : scans) {
    const double pred = intercept + slope * std::log(static_cast<double>(s.N));
    const double r = std::log(s.min_abs) - pred;
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

bool exact_four_wave(const GridMode& m, const GridMode& j, const GridMode& k,
                     const GridMode& l, long long N, const EtaExact& eta) {
  const i128 X = static_cast<i128>(m.ix) * m.ix * m.ix +
                 static_cast<i128>(j.ix) * j.ix * j.ix -
                 static_cast<i128>(k.ix) * k.ix * k.ix -
                 static_cast<i128>(l.ix) * l.ix * l.ix;
  const i128 Y = static_cast<i128>(m.iy) * m.iy * j.ix * k.ix * l.ix +
                 static_cast<i128>(j.iy) * j.iy * m.ix * k.ix * l.ix -
                 static_cast<i128>(k.iy) * k.iy * m.ix * j.ix * l.ix -
                 static_cast<i128>(l.iy) * l.iy * m.ix * j.ix * k.ix;
  const i128 D = static_cast<i128>(m.ix) * j.ix * k.ix * l.ix;
  return exact_zero(X, Y, D, N, eta);
}

}  // namespace

ResonantModulus enumerate_resonant_modulus(const FrequencyGrid& grid, int m_slot,
                                           const EtaExact& eta) {
  if (eta.is_rational())
    throw std::invalid_argument(
        "modulus: structural enumeration requires an irrational eta");
  if (m_slot < 0 || m_slot >= grid.mode_count())
    throw std::invalid_argument("modulus: base mode not in D_N^+");
  const auto& m = grid.mode(m_slot);
  const long long N = grid.N();

  auto classify = [&](int32_t j, int32_t k, int32_t l) {
    const bool trivial = (k == m_slot && l == j) || (k == j && l == m_slot);
    return trivial ? ResonantTriple::Cls::TrivialPairing
                   : ResonantTriple::Cls::XSwapFamily;
  };

  std::vector<ResonantTriple> structural;
  // Trivial pairings (k,l) = (m,j) and (j,m) for every j; they coincide at j = m.
  for (int32_t j = 0; j < grid.mode_count(); ++j) {
    structural.push_back({j, m_slot, j, ResonantTriple::Cls::TrivialPairing});
    if (j != m_slot)
      structural.push_back({j, j, m_slot, ResonantTriple::Cls::TrivialPairing});
  }
  // x-swap families: {m_x, j_x} = {k_x, l_x} as multisets. Case A fixes
  // k_x = m_x with shared column q = j_x = l_x; case B fixes l_x = m_x with
  // q = j_x = k_x. One y index remains free; the other two follow from an
  // exact rational relation and must land on the lattice.
  auto emit_family = [&](bool caseA) {
    for (int q = grid.ix_lo(); q <= grid.ix_hi(); ++q) {
      for (int wy = grid.iy_lo(); wy <= grid.iy_hi(); ++wy) {
        if (wy == m.iy) continue;  // degenerate: reduces to a trivial pairing
        const int w_slot = grid.slot_of(m.ix, wy);
        if (w_slot < 0) continue;
        const long long num = static_cast<long long>(q) * (m.iy + wy) +
                              static_cast<long long>(m.ix) * (m.iy - wy);
        const long long den = 2LL * m.ix;
        if (num % den != 0) continue;
        const long long other_hi = num / den;               // l_y (A) / k_y (B)
        const long long other_lo = other_hi - (m.iy - wy);  // j_y
        const int j_slot = grid.slot_of(q, static_cast<int>(other_lo));
        const int o_slot = grid.slot_of(q, static_cast<int>(other_hi));
        if (j_slot < 0 || o_slot < 0) continue;
        const int32_t k_slot = caseA ? w_slot : o_slot;
        const int32_t l_slot = caseA ? o_slot : w_slot;
        structural.push_back({j_slot, k_slot, l_slot, classify(j_slot, k_slot, l_slot)});
      }
    }
  };
  emit_family(true);
  emit_family(false);

  auto key = [](const ResonantTriple& t) {
    return (static_cast<uint64_t>(t.j) << 42) | (static_cast<uint64_t>(t.k) << 21) |
           static_cast<uint64_t>(t.l);
  };
  std::sort(structural.begin(), structural.end(),
            [&](const ResonantTriple& a, const ResonantTriple& b) {
              return key(a) < key(b);
            });
  structural.erase(std::unique(structural.begin(), structural.end(),
                               [&](const ResonantTriple& a, const ResonantTriple& b) {
                                 return key(a) == key(b);
                               }),
                   structural.end());

  // Every structural triple re-verifies in integer arithmetic.
  for (const auto& t : structural) {
    const auto &j = grid.mode(t.j), &k = grid.mode(t.k), &l = grid.mode(t.l);
    if (m.ix + j.ix != k.ix + l.ix || m.iy + j.iy != k.iy + l.iy)
      throw std::logic_error("modulus: structural triple violates m = k - j + l");
    if (!exact_four_wave(m, j, k, l, N, eta))
      throw std::logic_error("modulus: structural triple fails the exact test");
  }

  // Brute-force cross-validation: iterate (j,k), solve l = m + j - k.
  std::vector<ResonantTriple> brute;
  for (int32_t js = 0; js < grid.mode_count(); ++js) {
    const auto& j = grid.mode(js);
    for (int32_t ks = 0; ks < grid.mode_count(); ++ks) {
      const auto& k = grid.mode(ks);
      const int ls = grid.slot_of(m.ix + j.ix - k.ix, m.iy + j.iy - k.iy);
      if (ls < 0) continue;
      if (!exact_four_wave(m, j, k, grid.mode(ls), N, eta)) continue;
      brute.push_back({js, ks, static_cast<int32_t>(ls), classify(js, ks, ls)});
    }
  }
  std::sort(brute.begin(), brute.end(),
            [&](const ResonantTriple& a, const ResonantTriple& b) {
              return key(a) < key(b);
            });

  if (structural.size() != brute.size() ||
      !std::equal(structural.begin(), structural.end(), brute.begin(),
                  [&](const ResonantTriple& a, const ResonantTriple& b) {
                    return key(a) == key(b);
                  }))
    throw std::logic_error(
        "modulus: structural enumeration and brute force disagree (set equality "
        "failed)");

  ResonantModulus out;
  out.m = m_slot;
  out.triples = std::move(structural);
  for (const auto& t : out.triples) {
    if (t.cls == ResonantTriple::Cls::TrivialPairing)
      ++out.trivial_count;
    else
      ++out.family_count;
  }
  return out;
}

}  // namespace wavekin
