#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mrifold {

/// Runtime failure of a numerical process (non-finite loss, diverged solve).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Square N x N array, row-major. Row index is the phase-encoding
/// (vertical) direction throughout the library.
template <class T>
class SquareGrid {
 public:
  SquareGrid() = default;
  explicit SquareGrid(int n, T fill = T{}) : n_(n), v_(static_cast<std::size_t>(n) * n, fill) {
    if (n <= 0) throw std::invalid_argument("SquareGrid: size must be positive");
  }

  int size() const { return n_; }
  std::size_t numel() const { return v_.size(); }

  T& operator()(int r, int c) { return v_[static_cast<std::size_t>(r) * n_ + c]; }
  const T& operator()(int r, int c) const { return v_[static_cast<std::size_t>(r) * n_ + c]; }

  T* row(int r) { return v_.data() + static_cast<std::size_t>(r) * n_; }
  const T* row(int r) const { return v_.data() + static_cast<std::size_t>(r) * n_; }

  std::vector<T>& raw() { return v_; }
  const std::vector<T>& raw() const { return v_; }

  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  friend bool operator==(const SquareGrid& a, const SquareGrid& b) {
    return a.n_ == b.n_ && a.v_ == b.v_;
  }

 private:
  int n_ = 0;
  std::vector<T> v_;
};

/// Real-valued magnitude image; ground-truth images live in [0,1].
using Image = SquareGrid<double>;
/// Complex image-domain data (inverse DFT output before taking magnitude).
using ComplexImage = SquareGrid<std::complex<double>>;
/// Complex k-space data. Storage row r holds the phase-encoding line with
/// centered frequency index r - N/2; same for columns.
using KSpaceGrid = SquareGrid<std::complex<double>>;

inline void require_same_size(int a, int b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": size mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

/// Elementwise magnitude.
inline Image magnitude(const ComplexImage& y) {
  Image out(y.size());
  for (std::size_t i = 0; i < y.numel(); ++i) out.raw()[i] = std::abs(y.raw()[i]);
  return out;
}

inline ComplexImage to_complex(const Image& y) {
  ComplexImage out(y.size());
  for (std::size_t i = 0; i < y.numel(); ++i) out.raw()[i] = y.raw()[i];
  return out;
}

template <class T>
double l2_norm(const SquareGrid<T>& g) {
  double s = 0.0;
  for (const auto& v : g.raw()) s += std::norm(std::complex<double>(v));
  return std::sqrt(s);
}

template <class T>
double l2_distance(const SquareGrid<T>& a, const SquareGrid<T>& b) {
  require_same_size(a.size(), b.size(), "l2_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i)
    s += std::norm(std::complex<double>(a.raw()[i]) - std::complex<double>(b.raw()[i]));
  return std::sqrt(s);
}

template <class T>
double max_abs_diff(const SquareGrid<T>& a, const SquareGrid<T>& b) {
  require_same_size(a.size(), b.size(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i)
    m = std::max(m, std::abs(std::complex<double>(a.raw()[i]) - std::complex<double>(b.raw()[i])));
  return m;
}

}  // namespace mrifold
