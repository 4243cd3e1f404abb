#ifndef MLFSM_FFT_HPP
#define MLFSM_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace mlfsm {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

// Linear convolution of two real sequences (FFT-backed above a size cutoff,
// direct otherwise). Result length is x.size() + h.size() - 1.
std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h);

} // namespace mlfsm

#endif
