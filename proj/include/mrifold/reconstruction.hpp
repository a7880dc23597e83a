#pragma once

#include <stdexcept>

#include "mrifold/kspace.hpp"
#include "mrifold/unet.hpp"

namespace mrifold {

/// The four stages of the inference pipeline, kept for inspection and
/// difference images: aliased input, raw net output, corrected k-space, and
/// the image recovered from it.
struct ReconResult {
  Image aliased;
  Image unet_output;
  KSpaceGrid corrected_kspace;
  Image final;
};

/// Overwrite the measured lines of `predicted` with the measured data; rows
/// are copied verbatim so the measured lines survive bit-exactly.
inline KSpaceGrid kspace_correction(const KSpaceGrid& predicted,
                                    const UndersampledKSpace& measured) {
  require_same_size(predicted.size(), measured.mask.n, "kspace_correction");
  KSpaceGrid out = predicted;
  for (int i = 0; i < measured.mask.line_count(); ++i) {
    const int r = measured.mask.row_of(measured.mask.lines[i]);
    std::copy(measured.line(i), measured.line(i) + measured.mask.n, out.row(r));
  }
  return out;
}

/// Full pipeline: zero-fill, unfold with the net, transform back, restore the
/// measured lines, and take the magnitude of the inverse transform.
template <class T>
ReconResult reconstruct(const UndersampledKSpace& x, const UNetWeights<T>& weights) {
  if (weights.config.input_size != x.mask.n)
    throw std::invalid_argument("reconstruct: mask size does not match net input size");
  ReconResult res;
  res.aliased = zero_fill_recon(x);
  res.unet_output = unet_apply(weights, res.aliased);
  res.corrected_kspace = kspace_correction(forward_dft(res.unet_output), x);
  res.final = magnitude(inverse_dft(res.corrected_kspace));
  return res;
}

}  // namespace mrifold
