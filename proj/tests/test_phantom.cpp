#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mrifold/phantom.hpp"

using namespace mrifold;

namespace {

// Independent oracle: the published modified Shepp-Logan table in its classic
// (x, y-up, ccw angle) convention, evaluated directly per pixel. Columns:
// intensity, x semi-axis, y semi-axis, x0, y0, rotation in degrees.
const double kClassicTable[10][6] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.605, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
};

Image classic_shepp_logan(int n) {
  const double pi = 3.14159265358979323846;
  Image img(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double x = (2.0 * c + 1.0 - n) / n;
      const double y = -(2.0 * r + 1.0 - n) / n;  // row axis points down
      double s = 0.0;
      for (const auto& e : kClassicTable) {
        const double phi = e[5] * pi / 180.0;
        const double dx = x - e[3], dy = y - e[4];
        const double xr = dx * std::cos(phi) + dy * std::sin(phi);
        const double yr = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((xr / e[1]) * (xr / e[1]) + (yr / e[2]) * (yr / e[2]) <= 1.0) s += e[0];
      }
      img(r, c) = std::min(1.0, std::max(0.0, s));
    }
  }
  return img;
}

PhantomSpec interior_anomaly_spec() {
  PhantomSpec spec;
  Ellipse head;
  head.a = head.b = 0.9;
  head.intensity = 0.5;
  spec.base.push_back(head);
  Ellipse anom;
  anom.row = -0.3;
  anom.a = anom.b = 0.08;
  anom.intensity = 0.4;
  spec.anomalies.push_back(anom);
  return spec;
}

}  // namespace

TEST_CASE("Shepp-Logan matches the classic table oracle", "[phantom]") {
  for (int n : {64, 100}) {
    Image mine = generate_shepp_logan(n);
    Image ref = classic_shepp_logan(n);
    CHECK(max_abs_diff(mine, ref) == 0.0);
  }
}

TEST_CASE("Shepp-Logan landmark values", "[phantom]") {
  Image img = generate_shepp_logan(256);
  SECTION("brain interior is skull minus brain tissue = 0.2") {
    CHECK(img(128, 128) == Catch::Approx(0.2).margin(1e-12));
  }
  SECTION("corners are empty") {
    CHECK(img(0, 0) == 0.0);
    CHECK(img(0, 255) == 0.0);
    CHECK(img(255, 0) == 0.0);
    CHECK(img(255, 255) == 0.0);
  }
  SECTION("skull rim is bright") {
    // Row through the center, just inside the outer ellipse's left edge.
    int c = 0;
    while (c < 256 && img(128, c) == 0.0) ++c;
    REQUIRE(c < 256);
    CHECK(img(128, c) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("values lie in [0,1]") {
    for (double v : img.raw()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("rendering is resolution consistent", "[phantom]") {
  Image lo = generate_shepp_logan(64);
  Image hi = generate_shepp_logan(128);
  double mad = 0.0;
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) {
      const double block = (hi(2 * r, 2 * c) + hi(2 * r, 2 * c + 1) + hi(2 * r + 1, 2 * c) +
                            hi(2 * r + 1, 2 * c + 1)) /
                           4.0;
      mad += std::abs(block - lo(r, c));
    }
  mad /= 64.0 * 64.0;
  CHECK(mad <= 0.05);
}

TEST_CASE("render_phantom basics", "[phantom]") {
  SECTION("empty spec renders black") {
    CHECK(l2_norm(render_phantom(PhantomSpec{}, 32)) == 0.0);
  }
  SECTION("clamping happens after the full sum") {
    Ellipse big;
    big.a = big.b = 2.0;  // covers the frame
    PhantomSpec spec;
    big.intensity = 0.8;
    spec.base.push_back(big);
    big.intensity = 0.6;
    spec.base.push_back(big);
    Image img = render_phantom(spec, 16);
    for (double v : img.raw()) CHECK(v == 1.0);  // 1.4 clamps to 1

    spec.base[1].intensity = -0.6;
    img = render_phantom(spec, 16);
    for (double v : img.raw()) CHECK(v == Catch::Approx(0.2).margin(1e-12));

    spec.base[1].intensity = -1.6;
    img = render_phantom(spec, 16);
    for (double v : img.raw()) CHECK(v == 0.0);  // -0.8 clamps to 0
  }
  SECTION("membership is a pixel-center test") {
    // Ellipse tight around one pixel center; neighbours stay outside.
    const int n = 16;
    PhantomSpec spec;
    Ellipse dot;
    dot.row = detail::pixel_coord(5, n);
    dot.col = detail::pixel_coord(9, n);
    dot.a = dot.b = 0.5 / n;  // under half the pixel pitch 2/n
    dot.intensity = 1.0;
    spec.base.push_back(dot);
    Image img = render_phantom(spec, n);
    CHECK(img(5, 9) == 1.0);
    CHECK(l2_norm(img) == 1.0);
  }
  SECTION("same spec renders identically") {
    Rng rng(7);
    PhantomSpec spec = random_phantom_spec(rng);
    CHECK(render_phantom(spec, 48) == render_phantom(spec, 48));
  }
  SECTION("size validation") {
    CHECK_THROWS_AS(render_phantom(PhantomSpec{}, 15), std::invalid_argument);
    CHECK_THROWS_AS(render_phantom(PhantomSpec{}, 8), std::invalid_argument);
  }
}

TEST_CASE("shift_anomalies moves only anomalies, cyclically", "[phantom]") {
  PhantomSpec spec = interior_anomaly_spec();

  SECTION("full-height shift is the identity") {
    PhantomSpec s = shift_anomalies(spec, 1.0);
    CHECK(render_phantom(s, 32) == render_phantom(spec, 32));
  }
  SECTION("base ellipses are untouched") {
    PhantomSpec s = shift_anomalies(spec, 0.25);
    REQUIRE(s.base.size() == spec.base.size());
    CHECK(s.base[0].row == spec.base[0].row);
    CHECK(s.anomalies[0].row != spec.anomalies[0].row);
  }
  SECTION("two quarter shifts equal one half shift") {
    PhantomSpec twice = shift_anomalies(shift_anomalies(spec, 0.25), 0.25);
    PhantomSpec once = shift_anomalies(spec, 0.5);
    CHECK(twice.anomalies[0].row == Catch::Approx(once.anomalies[0].row).margin(1e-12));
  }
  SECTION("rho applications of 1/rho return to the start") {
    PhantomSpec s = spec;
    for (int i = 0; i < 4; ++i) s = shift_anomalies(s, 0.25);
    CHECK(s.anomalies[0].row == Catch::Approx(spec.anomalies[0].row).margin(1e-12));
  }
  SECTION("a 1/rho shift with n divisible by rho is an exact row roll") {
    const int n = 32, rho = 4;
    PhantomSpec anom_only = spec;
    anom_only.base.clear();
    Image before = render_phantom(anom_only, n);
    Image after = render_phantom(shift_anomalies(anom_only, 1.0 / rho), n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        CHECK(after((r + n / rho) % n, c) == before(r, c));
  }
  SECTION("shift wraps into [-1, 1)") {
    PhantomSpec s = shift_anomalies(spec, 0.9);  // -0.3 + 1.8 = 1.5 -> -0.5
    CHECK(s.anomalies[0].row == Catch::Approx(-0.5).margin(1e-12));
  }
}

TEST_CASE("shift_anomalies boundary warning", "[phantom]") {
  PhantomSpec spec = interior_anomaly_spec();
  bool warn = true;
  // -0.3 -> 0.1: still well inside the 0.9-radius head.
  shift_anomalies(spec, 0.2, &warn);
  CHECK_FALSE(warn);
  // -0.3 -> -0.9: the anomaly now straddles the head's rim.
  warn = false;
  shift_anomalies(spec, 0.7, &warn);
  CHECK(warn);
}

TEST_CASE("random phantom corpus", "[phantom]") {
  SECTION("deterministic in the seed") {
    auto a = generate_dataset(4, 32, 99);
    auto b = generate_dataset(4, 32, 99);
    REQUIRE(a.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(a[i] == b[i]);
  }
  SECTION("a shorter run is a prefix of a longer one") {
    auto small = generate_dataset(3, 32, 123);
    auto big = generate_dataset(6, 32, 123);
    for (int i = 0; i < 3; ++i) CHECK(small[i] == big[i]);
  }
  SECTION("different seeds give different images") {
    auto a = generate_dataset(1, 32, 1);
    auto b = generate_dataset(1, 32, 2);
    CHECK(max_abs_diff(a[0], b[0]) > 0.0);
  }
  SECTION("count zero is fine, negative is not") {
    CHECK(generate_dataset(0, 32, 5).empty());
    CHECK_THROWS_AS(generate_dataset(-1, 32, 5), std::invalid_argument);
  }
  SECTION("images stay in [0,1] and are nontrivial") {
    auto imgs = generate_dataset(8, 32, 7);
    for (const auto& img : imgs) {
      double lo = 1e9, hi = -1e9;
      for (double v : img.raw()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(lo >= 0.0);
      CHECK(hi <= 1.0);
      CHECK(hi > 0.0);  // head ellipse always renders
    }
  }
}
