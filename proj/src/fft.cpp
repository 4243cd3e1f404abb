#include "mlfsm/fft.hpp"

#include <cmath>

#include "mlfsm/errors.hpp"

namespace mlfsm {

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw numerical_error("fft: size must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * 3.14159265358979323846 /
                           static_cast<double>(len);
        const std::complex<double> wbase(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const auto u = a[i + j];
                const auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wbase;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h) {
    if (x.empty() || h.empty()) return {};
    const std::size_t out_len = x.size() + h.size() - 1;

    // Direct form wins for short filters.
    if (static_cast<double>(x.size()) * static_cast<double>(h.size()) < 1 << 18) {
        std::vector<double> out(out_len, 0.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            for (std::size_t j = 0; j < h.size(); ++j) out[i + j] += xi * h[j];
        }
        return out;
    }

    std::size_t size = 1;
    while (size < out_len) size <<= 1;

    std::vector<std::complex<double>> fx(size), fh(size);
    for (std::size_t i = 0; i < x.size(); ++i) fx[i] = x[i];
    for (std::size_t i = 0; i < h.size(); ++i) fh[i] = h[i];
    fft_radix2(fx, false);
    fft_radix2(fh, false);
    for (std::size_t i = 0; i < size; ++i) fx[i] *= fh[i];
    fft_radix2(fx, true);

    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fx[i].real();
    return out;
}

} // namespace mlfsm
