#pragma once

#include <complex>
#include <vector>

namespace wavekin {

/// Complex amplitudes V_k on D_N^+, V_k = P_k + i Q_k. The full-lattice field
/// is the Hermitian extension V_{-k} = conj(V_k) and is never stored.
struct ModeField {
  std::vector<std::complex<double>> v;
  double t = 0.0;
};

}  // namespace wavekin
