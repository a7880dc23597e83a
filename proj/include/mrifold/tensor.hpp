#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mrifold/grid.hpp"

namespace mrifold {

/// Feature map in (channel, row, column) order, contiguous row-major.
template <class T>
struct Tensor3 {
  int ch = 0, h = 0, w = 0;
  std::vector<T> v;

  Tensor3() = default;
  Tensor3(int c_, int h_, int w_, T fill = T{})
      : ch(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, fill) {
    if (c_ <= 0 || h_ <= 0 || w_ <= 0)
      throw std::invalid_argument("Tensor3: dimensions must be positive");
  }

  std::size_t numel() const { return v.size(); }
  std::size_t plane_size() const { return static_cast<std::size_t>(h) * w; }

  T& at(int c, int y, int x) { return v[(static_cast<std::size_t>(c) * h + y) * w + x]; }
  const T& at(int c, int y, int x) const {
    return v[(static_cast<std::size_t>(c) * h + y) * w + x];
  }

  T* plane(int c) { return v.data() + static_cast<std::size_t>(c) * plane_size(); }
  const T* plane(int c) const { return v.data() + static_cast<std::size_t>(c) * plane_size(); }

  void zero() { std::fill(v.begin(), v.end(), T{}); }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.ch == b.ch && a.h == b.h && a.w == b.w && a.v == b.v;
  }
};

template <class T>
bool same_shape(const Tensor3<T>& a, const Tensor3<T>& b) {
  return a.ch == b.ch && a.h == b.h && a.w == b.w;
}

template <class T>
void require_shape(const Tensor3<T>& t, int c, int h, int w, const char* what) {
  if (t.ch != c || t.h != h || t.w != w)
    throw std::invalid_argument(std::string(what) + ": tensor shape mismatch");
}

/// Single-channel tensor from a real image.
template <class T>
Tensor3<T> to_tensor(const Image& img) {
  Tensor3<T> t(1, img.size(), img.size());
  for (std::size_t i = 0; i < img.numel(); ++i) t.v[i] = static_cast<T>(img.raw()[i]);
  return t;
}

/// Back to an image; requires a single channel.
template <class T>
Image to_image(const Tensor3<T>& t) {
  if (t.ch != 1 || t.h != t.w) throw std::invalid_argument("to_image: need one square channel");
  Image img(t.h);
  for (std::size_t i = 0; i < img.numel(); ++i) img.raw()[i] = static_cast<double>(t.v[i]);
  return img;
}

}  // namespace mrifold
