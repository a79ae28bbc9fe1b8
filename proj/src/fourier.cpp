#include "flatlab/fourier.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace flatlab {

namespace {

void direct(std::vector<std::complex<double>>& a, bool inverse)
{
    const std::size_t n = a.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((j * k) % n) / static_cast<double>(n);
            s += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = s;
    }
    a = std::move(out);
}

}  // namespace

void fft(std::vector<std::complex<double>>& a, bool inverse)
{
    const std::size_t n = a.size();
    if (n <= 1) {
        return;
    }
    if ((n & (n - 1)) != 0) {
        direct(a, inverse);
    } else {
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) {
                j ^= bit;
            }
            j ^= bit;
            if (i < j) {
                std::swap(a[i], a[j]);
            }
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t k = 0; k < len / 2; ++k) {
                    const double t = ang * static_cast<double>(k);
                    const std::complex<double> w(std::cos(t), std::sin(t));
                    const auto u = a[i + k];
                    const auto v = a[i + k + len / 2] * w;
                    a[i + k] = u + v;
                    a[i + k + len / 2] = u - v;
                }
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) {
            x *= inv;
        }
    }
}

}  // namespace flatlab
