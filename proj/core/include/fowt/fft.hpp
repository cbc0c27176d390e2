#pragma once

#include <complex>
#include <vector>

namespace fowt::fft {

/// Real-to-complex DFT, X_k = sum_j x_j e^{-2 pi i jk/n}, returning n/2+1 bins.
std::vector<std::complex<double>> forward_real(const std::vector<double>& x);

/// Complex-to-real inverse of a half spectrum (n/2+1 bins) for length n.
/// Unnormalized: inverse_real(forward_real(x), n) == n * x.
std::vector<double> inverse_real(const std::vector<std::complex<double>>& half, std::size_t n);

}  // namespace fowt::fft
