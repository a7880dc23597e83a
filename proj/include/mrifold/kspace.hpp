#pragma once

#include <algorithm>
#include <complex>
#include <cstring>
#include <set>
#include <vector>

#include "mrifold/fft.hpp"
#include "mrifold/grid.hpp"

namespace mrifold {

/// Measured phase-encoding lines: the uniform set {b : b = 0 mod rho} plus
/// the low_lines unmeasured lines nearest to b = 0. Indices are centered
/// (b = storage row - n/2).
struct SamplingMask {
  int n = 0;
  int rho = 1;
  int low_lines = 0;
  std::vector<int> lines;  // sorted centered indices

  int line_count() const { return static_cast<int>(lines.size()); }
  int row_of(int line) const { return line + n / 2; }

  bool measures(int centered_b) const {
    return std::binary_search(lines.begin(), lines.end(), centered_b);
  }
};

/// Uniform lines at b = 0 (mod rho), then the low_lines not-yet-measured
/// lines with smallest |b|, ties broken toward negative b.
inline SamplingMask build_mask(int n, int rho, int low_lines) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("build_mask: n must be positive and even");
  if (rho < 1 || n % rho != 0) throw std::invalid_argument("build_mask: rho must divide n");
  if (low_lines < 0 || low_lines > n - n / rho)
    throw std::invalid_argument("build_mask: low_lines exceeds unmeasured line count");

  std::set<int> lines;
  for (int b = -n / 2; b < n / 2; ++b)
    if (((b % rho) + rho) % rho == 0) lines.insert(b);

  std::vector<int> unmeasured;
  for (int b = -n / 2; b < n / 2; ++b)
    if (!lines.count(b)) unmeasured.push_back(b);
  std::sort(unmeasured.begin(), unmeasured.end(),
            [](int a, int b) { return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b; });
  for (int i = 0; i < low_lines; ++i) lines.insert(unmeasured[i]);

  SamplingMask m;
  m.n = n;
  m.rho = rho;
  m.low_lines = low_lines;
  m.lines.assign(lines.begin(), lines.end());
  return m;
}

/// Acquisition speedup R = N / |lines|.
inline double reduction_factor(const SamplingMask& mask) {
  return static_cast<double>(mask.n) / mask.line_count();
}

/// Only the measured lines, in mask order. Zero-padded form is a full grid.
struct UndersampledKSpace {
  SamplingMask mask;
  std::vector<std::complex<double>> rows;  // line_count x n, row-major

  std::complex<double>* line(int i) { return rows.data() + static_cast<std::size_t>(i) * mask.n; }
  const std::complex<double>* line(int i) const {
    return rows.data() + static_cast<std::size_t>(i) * mask.n;
  }
};

inline UndersampledKSpace subsample(const KSpaceGrid& kspace, const SamplingMask& mask) {
  require_same_size(kspace.size(), mask.n, "subsample");
  UndersampledKSpace out;
  out.mask = mask;
  out.rows.resize(static_cast<std::size_t>(mask.line_count()) * mask.n);
  for (int i = 0; i < mask.line_count(); ++i) {
    const int r = mask.row_of(mask.lines[i]);
    std::copy(kspace.row(r), kspace.row(r) + mask.n, out.line(i));
  }
  return out;
}

/// Measured lines placed at their indices, zeros elsewhere.
inline KSpaceGrid zero_pad(const UndersampledKSpace& x) {
  KSpaceGrid out(x.mask.n);
  for (int i = 0; i < x.mask.line_count(); ++i) {
    const int r = x.mask.row_of(x.mask.lines[i]);
    std::copy(x.line(i), x.line(i) + x.mask.n, out.row(r));
  }
  return out;
}

/// Minimum-norm (l2) solution of S o F(y) = x: the inverse DFT of the
/// zero-padded data.
inline ComplexImage minimum_norm_solution(const UndersampledKSpace& x) {
  return inverse_dft(zero_pad(x));
}

/// Aliased magnitude image |F^-1(P(x))|.
inline Image zero_fill_recon(const UndersampledKSpace& x) {
  return magnitude(minimum_norm_solution(x));
}

/// Folding predicted by the Poisson summation formula for uniform
/// subsampling of factor rho along the phase-encoding (row) direction:
/// (1/rho) * sum_j y(r + j*N/rho, c), cyclic. The 1/rho scale makes this
/// exactly equal to the subsample -> zero-pad -> inverse-DFT pipeline under
/// the unitary convention.
inline ComplexImage predict_fold(const ComplexImage& y, int rho) {
  const int n = y.size();
  if (rho < 1 || n % rho != 0) throw std::invalid_argument("predict_fold: rho must divide n");
  ComplexImage out(n);
  const int step = n / rho;
  const double scale = 1.0 / rho;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      std::complex<double> s(0.0, 0.0);
      for (int j = 0; j < rho; ++j) s += y((r + j * step) % n, c);
      out(r, c) = scale * s;
    }
  }
  return out;
}

}  // namespace mrifold
