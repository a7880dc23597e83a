#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mrifold/gemm.hpp"
#include "mrifold/tensor.hpp"

namespace mrifold {

/// Reusable buffers so the training loop never allocates per sample.
template <class T>
struct ConvScratch {
  std::vector<T> col;    // (in_ch * k * k) x (h * w)
  std::vector<T> colt;   // transposed col / transposed dY
  std::vector<T> dcol;   // gradient in col layout
  std::vector<T> wt;     // transposed kernel matrix
  std::vector<T> dwt;    // transposed kernel gradient
};

namespace detail {

/// col(row = ci*9 + ky*3 + kx, col = y*w + x) = x(ci, y+ky-1, x+kx-1), zero
/// outside the frame (the 3x3 zero-padding convolution as one matrix).
template <class T>
void im2col_3x3(const Tensor3<T>& x, std::vector<T>& col) {
  const int h = x.h, w = x.w;
  const std::size_t hw = x.plane_size();
  col.resize(static_cast<std::size_t>(x.ch) * 9 * hw);
  T* dst = col.data();
  for (int ci = 0; ci < x.ch; ++ci) {
    const T* src = x.plane(ci);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        T* row = dst;
        dst += hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + dy;
          T* out = row + static_cast<std::size_t>(y) * w;
          if (sy < 0 || sy >= h) {
            std::fill(out, out + w, T{});
            continue;
          }
          const T* in = src + static_cast<std::size_t>(sy) * w;
          if (dx < 0) {
            out[0] = T{};
            std::copy(in, in + (w - 1), out + 1);
          } else if (dx > 0) {
            std::copy(in + 1, in + w, out);
            out[w - 1] = T{};
          } else {
            std::copy(in, in + w, out);
          }
        }
      }
    }
  }
}

/// Adjoint of im2col_3x3: scatter-add the col-layout gradient back onto the
/// input frame. `dx_out` must be pre-zeroed.
template <class T>
void col2im_3x3(const std::vector<T>& dcol, Tensor3<T>& dx_out) {
  const int h = dx_out.h, w = dx_out.w;
  const std::size_t hw = dx_out.plane_size();
  const T* src = dcol.data();
  for (int ci = 0; ci < dx_out.ch; ++ci) {
    T* dst = dx_out.plane(ci);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const T* row = src;
        src += hw;
        for (int y = 0; y < h; ++y) {
          const int sy = y + dy;
          if (sy < 0 || sy >= h) continue;
          const T* in = row + static_cast<std::size_t>(y) * w;
          T* out = dst + static_cast<std::size_t>(sy) * w;
          if (dx < 0) {
            for (int x2 = 1; x2 < w; ++x2) out[x2 - 1] += in[x2];
          } else if (dx > 0) {
            for (int x2 = 0; x2 < w - 1; ++x2) out[x2 + 1] += in[x2];
          } else {
            for (int x2 = 0; x2 < w; ++x2) out[x2] += in[x2];
          }
        }
      }
    }
  }
}

}  // namespace detail

/// Same-size convolution, cross-correlation orientation, no bias. Kernel is
/// (out_ch, in_ch, k, k) row-major with k in {1, 3}; 3x3 zero-pads by one.
template <class T>
void conv_forward(const Tensor3<T>& x, const std::vector<T>& kernel, int out_ch, int ksize,
                  Tensor3<T>& out, ConvScratch<T>& scratch) {
  if (ksize != 1 && ksize != 3) throw std::invalid_argument("conv_forward: kernel must be 1x1 or 3x3");
  const int kdim = x.ch * ksize * ksize;
  if (kernel.size() != static_cast<std::size_t>(out_ch) * kdim)
    throw std::invalid_argument("conv_forward: kernel size does not match channels");
  require_shape(out, out_ch, x.h, x.w, "conv_forward");

  const T* col = x.v.data();
  if (ksize == 3) {
    detail::im2col_3x3(x, scratch.col);
    col = scratch.col.data();
  }
  gemm(out_ch, static_cast<int>(x.plane_size()), kdim, kernel.data(), col, out.v.data());
}

/// Backward pass of conv_forward. Adds the kernel gradient into `dkernel`
/// (batch accumulation); writes the input gradient to `dx` (overwritten).
template <class T>
void conv_backward(const Tensor3<T>& x, const std::vector<T>& kernel, int out_ch, int ksize,
                   const Tensor3<T>& dout, std::vector<T>& dkernel, Tensor3<T>& dx,
                   ConvScratch<T>& scratch) {
  const int kdim = x.ch * ksize * ksize;
  const int hw = static_cast<int>(x.plane_size());
  require_shape(dout, out_ch, x.h, x.w, "conv_backward");
  if (dkernel.size() != kernel.size())
    throw std::invalid_argument("conv_backward: gradient buffer size mismatch");
  require_shape(dx, x.ch, x.h, x.w, "conv_backward");

  const T* col = x.v.data();
  if (ksize == 3) {
    detail::im2col_3x3(x, scratch.col);
    col = scratch.col.data();
  }

  // dK = dY * col^T, computed as (col * dY^T)^T to keep the long dimension
  // on the gemm inner axis.
  scratch.colt.resize(static_cast<std::size_t>(hw) * out_ch);
  transpose(dout.v.data(), out_ch, hw, scratch.colt.data());
  scratch.dwt.resize(static_cast<std::size_t>(kdim) * out_ch);
  gemm(kdim, out_ch, hw, col, scratch.colt.data(), scratch.dwt.data());
  for (int i = 0; i < out_ch; ++i)
    for (int j = 0; j < kdim; ++j)
      dkernel[static_cast<std::size_t>(i) * kdim + j] +=
          scratch.dwt[static_cast<std::size_t>(j) * out_ch + i];

  // dX(col layout) = K^T * dY, then scatter back through the padding.
  scratch.wt.resize(kernel.size());
  transpose(kernel.data(), out_ch, kdim, scratch.wt.data());
  if (ksize == 3) {
    scratch.dcol.resize(static_cast<std::size_t>(kdim) * hw);
    gemm(kdim, hw, out_ch, scratch.wt.data(), dout.v.data(), scratch.dcol.data());
    dx.zero();
    detail::col2im_3x3(scratch.dcol, dx);
  } else {
    gemm(kdim, hw, out_ch, scratch.wt.data(), dout.v.data(), dx.v.data());
  }
}

/// Elementwise max(0, v).
template <class T>
Tensor3<T> relu(const Tensor3<T>& x) {
  Tensor3<T> out = x;
  for (auto& v : out.v) v = std::max(v, T{});
  return out;
}

/// In-place gradient gate: passes where the recorded relu *output* is
/// positive (equivalently where the input was).
template <class T>
void relu_backward(const Tensor3<T>& relu_out, Tensor3<T>& grad) {
  for (std::size_t i = 0; i < grad.v.size(); ++i)
    if (!(relu_out.v[i] > T{})) grad.v[i] = T{};
}

/// 2x2 stride-2 max pooling. `argmax` records the flat input index of each
/// block winner; ties go to the first element in row-major block order.
template <class T>
Tensor3<T> maxpool2x2(const Tensor3<T>& x, std::vector<int>& argmax) {
  if (x.h % 2 != 0 || x.w % 2 != 0)
    throw std::invalid_argument("maxpool2x2: spatial dims must be even");
  Tensor3<T> out(x.ch, x.h / 2, x.w / 2);
  argmax.resize(out.numel());
  std::size_t o = 0;
  for (int c = 0; c < x.ch; ++c) {
    for (int y = 0; y < x.h; y += 2) {
      for (int xx = 0; xx < x.w; xx += 2) {
        int best = static_cast<int>((static_cast<std::size_t>(c) * x.h + y) * x.w + xx);
        T bv = x.v[best];
        const int cand[3] = {best + 1, best + x.w, best + x.w + 1};
        for (int idx : cand)
          if (x.v[idx] > bv) {
            bv = x.v[idx];
            best = idx;
          }
        out.v[o] = bv;
        argmax[o] = best;
        ++o;
      }
    }
  }
  return out;
}

/// Routes each pooled gradient to its recorded argmax position.
template <class T>
Tensor3<T> maxpool2x2_backward(const Tensor3<T>& dout, const std::vector<int>& argmax, int in_h,
                               int in_w) {
  Tensor3<T> dx(dout.ch, in_h, in_w);
  for (std::size_t i = 0; i < dout.numel(); ++i) dx.v[argmax[i]] += dout.v[i];
  return dx;
}

/// Average unpooling: every input pixel fills its 2x2 output block.
template <class T>
Tensor3<T> avg_unpool2x2(const Tensor3<T>& x) {
  Tensor3<T> out(x.ch, 2 * x.h, 2 * x.w);
  for (int c = 0; c < x.ch; ++c)
    for (int y = 0; y < x.h; ++y) {
      const T* in = x.plane(c) + static_cast<std::size_t>(y) * x.w;
      T* o0 = out.plane(c) + static_cast<std::size_t>(2 * y) * out.w;
      T* o1 = o0 + out.w;
      for (int xx = 0; xx < x.w; ++xx) o0[2 * xx] = o0[2 * xx + 1] = o1[2 * xx] = o1[2 * xx + 1] = in[xx];
    }
  return out;
}

/// Adjoint of avg_unpool2x2: each 2x2 output block sums into its source.
template <class T>
Tensor3<T> avg_unpool2x2_backward(const Tensor3<T>& dout) {
  if (dout.h % 2 != 0 || dout.w % 2 != 0)
    throw std::invalid_argument("avg_unpool2x2_backward: spatial dims must be even");
  Tensor3<T> dx(dout.ch, dout.h / 2, dout.w / 2);
  for (int c = 0; c < dx.ch; ++c)
    for (int y = 0; y < dx.h; ++y) {
      const T* i0 = dout.plane(c) + static_cast<std::size_t>(2 * y) * dout.w;
      const T* i1 = i0 + dout.w;
      T* o = dx.plane(c) + static_cast<std::size_t>(y) * dx.w;
      for (int xx = 0; xx < dx.w; ++xx)
        o[xx] = i0[2 * xx] + i0[2 * xx + 1] + i1[2 * xx] + i1[2 * xx + 1];
    }
  return dx;
}

/// Channel concatenation, contracting-path features first.
template <class T>
Tensor3<T> concat_channels(const Tensor3<T>& a, const Tensor3<T>& b) {
  if (a.h != b.h || a.w != b.w)
    throw std::invalid_argument("concat_channels: spatial dims differ");
  Tensor3<T> out(a.ch + b.ch, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), out.v.begin());
  std::copy(b.v.begin(), b.v.end(), out.v.begin() + a.v.size());
  return out;
}

}  // namespace mrifold
