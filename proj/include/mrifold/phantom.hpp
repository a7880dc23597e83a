#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mrifold/grid.hpp"
#include "mrifold/random.hpp"

namespace mrifold {

/// Ellipse in normalized coordinates: the image square spans [-1,1] in both
/// row (vertical, phase-encoding) and column directions. `a` is the
/// semi-axis along the ellipse's own column direction at angle 0, `b` along
/// its row direction. Positive angle rotates column-axis toward +row.
struct Ellipse {
  double row = 0.0;
  double col = 0.0;
  double a = 0.1;
  double b = 0.1;
  double angle = 0.0;
  double intensity = 0.0;

  bool contains(double u, double v) const {
    const double du = u - row;
    const double dv = v - col;
    const double co = std::cos(angle);
    const double si = std::sin(angle);
    const double x = co * dv + si * du;
    const double y = -si * dv + co * du;
    return (x / a) * (x / a) + (y / b) * (y / b) <= 1.0;
  }
};

struct PhantomSpec {
  std::vector<Ellipse> base;
  std::vector<Ellipse> anomalies;
  std::uint64_t seed = 0;
};

namespace detail {

inline constexpr double kPiPhantom = 3.14159265358979323846;
inline constexpr double kDegree = kPiPhantom / 180.0;

/// Pixel-center coordinate in [-1,1): row r of an n-pixel image.
inline double pixel_coord(int r, int n) { return (2.0 * r + 1.0 - n) / n; }

inline void check_even_size(int n) {
  if (n < 16 || n % 2 != 0) throw std::invalid_argument("phantom: n must be even and >= 16");
}

/// Modified (Toft) Shepp-Logan table mapped to (row, col) with row = -y.
inline const std::vector<Ellipse>& shepp_logan_ellipses() {
  static const std::vector<Ellipse> table = [] {
    const double d = kDegree;
    return std::vector<Ellipse>{
        {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
        {0.0184, 0.0, 0.6624, 0.874, 0.0, -0.8},
        {0.0, 0.22, 0.11, 0.31, 18.0 * d, -0.2},
        {0.0, -0.22, 0.16, 0.41, -18.0 * d, -0.2},
        {-0.35, 0.0, 0.21, 0.25, 0.0, 0.1},
        {-0.1, 0.0, 0.046, 0.046, 0.0, 0.1},
        {0.1, 0.0, 0.046, 0.046, 0.0, 0.1},
        {0.605, -0.08, 0.046, 0.023, 0.0, 0.1},
        {0.605, 0.0, 0.023, 0.023, 0.0, 0.1},
        {0.605, 0.06, 0.023, 0.046, 0.0, 0.1},
    };
  }();
  return table;
}

}  // namespace detail

/// Sum of ellipse intensities at each pixel center, clamped to [0,1] after
/// the full summation. A pixel belongs to an ellipse iff its center lies
/// inside; no antialiasing.
inline Image render_phantom(const PhantomSpec& spec, int n) {
  detail::check_even_size(n);
  Image img(n);
  for (int r = 0; r < n; ++r) {
    const double u = detail::pixel_coord(r, n);
    for (int c = 0; c < n; ++c) {
      const double v = detail::pixel_coord(c, n);
      double s = 0.0;
      for (const auto& e : spec.base)
        if (e.contains(u, v)) s += e.intensity;
      for (const auto& e : spec.anomalies)
        if (e.contains(u, v)) s += e.intensity;
      img(r, c) = std::min(1.0, std::max(0.0, s));
    }
  }
  return img;
}

/// The standard 10-ellipse Shepp-Logan head phantom (modified intensities).
inline Image generate_shepp_logan(int n) {
  PhantomSpec spec;
  spec.base = detail::shepp_logan_ellipses();
  return render_phantom(spec, n);
}

inline PhantomSpec shepp_logan_spec() {
  PhantomSpec spec;
  spec.base = detail::shepp_logan_ellipses();
  return spec;
}

namespace detail {

inline double wrap_unit(double u) {
  // into [-1, 1)
  return u - 2.0 * std::floor((u + 1.0) / 2.0);
}

/// True if the ellipse `anom` crosses the boundary of `base`: some of its
/// sampled rim points are inside `base` and some are not.
inline bool crosses_boundary(const Ellipse& anom, const Ellipse& base) {
  bool seen_in = false, seen_out = false;
  const int k = 16;
  for (int i = 0; i <= k; ++i) {
    double u, v;
    if (i == k) {
      u = anom.row;
      v = anom.col;
    } else {
      const double t = 2.0 * kPiPhantom * i / k;
      const double x = anom.a * std::cos(t);
      const double y = anom.b * std::sin(t);
      const double co = std::cos(anom.angle);
      const double si = std::sin(anom.angle);
      v = anom.col + co * x - si * y;
      u = anom.row + si * x + co * y;
    }
    (base.contains(u, v) ? seen_in : seen_out) = true;
  }
  return seen_in && seen_out;
}

}  // namespace detail

/// Translates every anomaly center vertically by `fraction` of the image
/// height (cyclic). Base ellipses are untouched. If `boundary_warning` is
/// given it is set when a moved anomaly straddles a base-ellipse boundary;
/// the shifted spec is still returned.
inline PhantomSpec shift_anomalies(const PhantomSpec& spec, double fraction,
                                   bool* boundary_warning = nullptr) {
  PhantomSpec out = spec;
  for (auto& e : out.anomalies) e.row = detail::wrap_unit(e.row + 2.0 * fraction);
  if (boundary_warning) {
    *boundary_warning = false;
    for (const auto& anom : out.anomalies)
      for (const auto& base : out.base)
        if (detail::crosses_boundary(anom, base)) *boundary_warning = true;
  }
  return out;
}

/// Parameters of the random phantom family used for synthetic corpora.
struct PhantomFamily {
  int min_interior = 2;
  int max_interior = 6;
  int min_anomalies = 0;
  int max_anomalies = 3;
};

/// One random head-plus-structures phantom. Ellipse placement is spread over
/// the whole frame so that uniform-subsampling ambiguity is present in the
/// data distribution, not just in hand-built anomaly pairs.
inline PhantomSpec random_phantom_spec(Rng& rng, const PhantomFamily& fam = {}) {
  PhantomSpec spec;
  Ellipse head;
  head.row = rng.uniform(-0.15, 0.15);
  head.col = rng.uniform(-0.15, 0.15);
  head.a = rng.uniform(0.55, 0.85);
  head.b = rng.uniform(0.55, 0.85);
  head.angle = rng.uniform(0.0, detail::kPiPhantom);
  head.intensity = rng.uniform(0.35, 0.7);
  spec.base.push_back(head);

  const int k = rng.uniform_int(fam.min_interior, fam.max_interior);
  for (int i = 0; i < k; ++i) {
    Ellipse e;
    e.row = rng.uniform(-0.6, 0.6);
    e.col = rng.uniform(-0.6, 0.6);
    e.a = rng.uniform(0.06, 0.4);
    e.b = rng.uniform(0.06, 0.4);
    e.angle = rng.uniform(0.0, detail::kPiPhantom);
    e.intensity = rng.uniform(-0.35, 0.45);
    spec.base.push_back(e);
  }

  const int m = rng.uniform_int(fam.min_anomalies, fam.max_anomalies);
  for (int i = 0; i < m; ++i) {
    Ellipse e;
    e.row = rng.uniform(-0.8, 0.8);
    e.col = rng.uniform(-0.8, 0.8);
    e.a = rng.uniform(0.02, 0.075);
    e.b = rng.uniform(0.02, 0.075);
    e.angle = rng.uniform(0.0, detail::kPiPhantom);
    const double contrast = rng.uniform(0.3, 0.5);
    e.intensity = rng.uniform() < 0.7 ? contrast : -contrast;
    spec.anomalies.push_back(e);
  }
  return spec;
}

/// Deterministic corpus: image i depends only on (seed, i), so a prefix of
/// a larger dataset equals the smaller one.
inline std::vector<Image> generate_dataset(int count, int n, std::uint64_t seed) {
  if (count < 0) throw std::invalid_argument("generate_dataset: count must be >= 0");
  detail::check_even_size(n);
  std::vector<Image> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(i)));
    PhantomSpec spec = random_phantom_spec(rng);
    spec.seed = seed;
    out.push_back(render_phantom(spec, n));
  }
  return out;
}

}  // namespace mrifold
