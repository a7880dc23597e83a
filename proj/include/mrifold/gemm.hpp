#pragma once

#include <cstddef>
#include <vector>

namespace mrifold {

/// C = A * B (row-major, A m x k, B k x n, C m x n), or C += A * B when
/// `accumulate`. Four independent output rows per outer step give the
/// compiler four FMA streams over the contiguous j loop; the column range is
/// additionally walked in tiles so the four C strips stay in L1 and a B tile
/// is reused from L2 across row blocks. Tiling only reorders work across
/// output elements — each c[i][j] still accumulates its k terms in the same
/// order, so results are bitwise independent of the tile size. This is the
/// hot kernel behind every convolution.
template <class T>
void gemm(int m, int n, int k, const T* a, const T* b, T* c, bool accumulate = false) {
  constexpr int kColTile = 1024;
  const std::size_t sn = static_cast<std::size_t>(n);
  if (!accumulate) {
    T* end = c + static_cast<std::size_t>(m) * sn;
    for (T* p = c; p != end; ++p) *p = T{};
  }
  for (int j0 = 0; j0 < n; j0 += kColTile) {
    const int j1 = (j0 + kColTile < n) ? j0 + kColTile : n;
    int i = 0;
    for (; i + 4 <= m; i += 4) {
      T* c0 = c + static_cast<std::size_t>(i) * sn;
      T* c1 = c0 + sn;
      T* c2 = c1 + sn;
      T* c3 = c2 + sn;
      const T* a0 = a + static_cast<std::size_t>(i) * k;
      for (int kk = 0; kk < k; ++kk) {
        const T v0 = a0[kk];
        const T v1 = a0[k + kk];
        const T v2 = a0[2 * k + kk];
        const T v3 = a0[3 * k + kk];
        const T* br = b + static_cast<std::size_t>(kk) * sn;
        for (int j = j0; j < j1; ++j) {
          c0[j] += v0 * br[j];
          c1[j] += v1 * br[j];
          c2[j] += v2 * br[j];
          c3[j] += v3 * br[j];
        }
      }
    }
    for (; i < m; ++i) {
      T* ci = c + static_cast<std::size_t>(i) * sn;
      const T* ai = a + static_cast<std::size_t>(i) * k;
      for (int kk = 0; kk < k; ++kk) {
        const T v = ai[kk];
        const T* br = b + static_cast<std::size_t>(kk) * sn;
        for (int j = j0; j < j1; ++j) ci[j] += v * br[j];
      }
    }
  }
}

/// out = A^T for row-major A (m x n); out is n x m.
template <class T>
void transpose(const T* a, int m, int n, T* out) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(j) * m + i] = a[static_cast<std::size_t>(i) * n + j];
}

}  // namespace mrifold
