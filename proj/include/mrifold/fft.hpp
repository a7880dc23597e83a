#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "mrifold/grid.hpp"

namespace mrifold {
namespace detail {

inline constexpr double kPi = 3.14159265358979323846;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// In-place radix-2 FFT, standard (DC-first) order, no scaling.
/// sign = -1 forward, +1 inverse.
inline void fft_radix2(std::complex<double>* a, int n, int sign) {
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * kPi / len;
    const std::complex<double> step(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= step;
      }
    }
  }
}

/// O(n^2) fallback for even non-power-of-two sizes.
inline void dft_direct(std::complex<double>* a, int n, int sign) {
  std::vector<std::complex<double>> out(n);
  for (int k = 0; k < n; ++k) {
    std::complex<double> s(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
      const double ang = sign * 2.0 * kPi * (static_cast<long long>(j) * k % n) / n;
      s += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = s;
  }
  std::copy(out.begin(), out.end(), a);
}

inline void line_transform(std::complex<double>* a, int n, int sign) {
  if (is_pow2(n)) {
    fft_radix2(a, n, sign);
  } else {
    dft_direct(a, n, sign);
  }
}

/// Rotate both axes by n/2: converts between centered storage (frequency
/// r - n/2 at row r) and the standard DC-first FFT order. Involution for
/// even n.
inline SquareGrid<std::complex<double>> half_shift(const SquareGrid<std::complex<double>>& g) {
  const int n = g.size();
  SquareGrid<std::complex<double>> out(n);
  const int h = n / 2;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out((r + h) % n, (c + h) % n) = g(r, c);
  return out;
}

/// Unitary centered 2D transform; overall scale 1/n.
inline SquareGrid<std::complex<double>> centered_transform(
    const SquareGrid<std::complex<double>>& in, int sign) {
  const int n = in.size();
  if (n % 2 != 0) throw std::invalid_argument("dft: size must be even");
  SquareGrid<std::complex<double>> buf = half_shift(in);
  for (int r = 0; r < n; ++r) line_transform(buf.row(r), n, sign);
  std::vector<std::complex<double>> col(n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) col[r] = buf(r, c);
    line_transform(col.data(), n, sign);
    for (int r = 0; r < n; ++r) buf(r, c) = col[r];
  }
  const double scale = 1.0 / n;
  for (auto& v : buf.raw()) v *= scale;
  return half_shift(buf);
}

}  // namespace detail

/// Unitary 2D DFT with centered frequency indexing: X(a,b) with a = r - N/2.
/// Parseval holds exactly and inverse_dft(forward_dft(y)) == y.
inline KSpaceGrid forward_dft(const ComplexImage& y) { return detail::centered_transform(y, -1); }

inline KSpaceGrid forward_dft(const Image& y) { return forward_dft(to_complex(y)); }

/// Inverse of forward_dft (positive-exponent direction, unitary scale).
inline ComplexImage inverse_dft(const KSpaceGrid& x) { return detail::centered_transform(x, +1); }

}  // namespace mrifold
