#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "mrifold/io.hpp"
#include "mrifold/phantom.hpp"
#include "mrifold/random.hpp"

using namespace mrifold;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory, removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("mrifold_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("raw f32 blobs", "[io]") {
  TempDir tmp("blob");
  SECTION("round trip is exact") {
    const std::vector<float> v = {0.0f, -1.5f, 3.25e-8f, 1e20f, -0.0f};
    write_f32(tmp.path / "a.f32", v);
    CHECK(read_f32(tmp.path / "a.f32", v.size()) == v);
  }
  SECTION("size mismatch is a data error") {
    write_f32(tmp.path / "b.f32", {1.0f, 2.0f});
    CHECK_THROWS_AS(read_f32(tmp.path / "b.f32", 3), DataError);
  }
  SECTION("missing file is a data error") {
    CHECK_THROWS_AS(read_f32(tmp.path / "missing.f32", 1), DataError);
  }
}

TEST_CASE("image blobs and PGM export", "[io]") {
  TempDir tmp("img");
  SECTION("image round trip keeps float-precision values") {
    const Image img = generate_shepp_logan(32);
    write_image_f32(tmp.path / "img.f32", img);
    const Image back = read_image_f32(tmp.path / "img.f32", 32);
    double worst = 0.0;
    for (std::size_t i = 0; i < img.numel(); ++i) {
      CHECK(back.raw()[i] == static_cast<double>(static_cast<float>(img.raw()[i])));
      worst = std::max(worst, std::abs(back.raw()[i] - img.raw()[i]));
    }
    CHECK(worst < 1e-6);
  }
  SECTION("PGM header and byte mapping") {
    Image img(16, 0.5);
    img(0, 0) = 0.0;
    img(0, 1) = 1.0;
    img(0, 2) = -3.0;  // clamps to 0
    img(0, 3) = 7.0;   // clamps to 255
    write_pgm(tmp.path / "img.pgm", img);
    const std::string data = slurp(tmp.path / "img.pgm");
    const std::string header = "P5\n16 16\n255\n";
    REQUIRE(data.substr(0, header.size()) == header);
    REQUIRE(data.size() == header.size() + 256);
    const auto* px = reinterpret_cast<const unsigned char*>(data.data() + header.size());
    CHECK(px[0] == 0);
    CHECK(px[1] == 255);
    CHECK(px[2] == 0);
    CHECK(px[3] == 255);
    CHECK(px[4] == 128);  // round(0.5 * 255)
  }
}

TEST_CASE("dataset directory", "[io]") {
  TempDir tmp("dataset");
  const auto images = generate_dataset(3, 16, 42);

  SECTION("round trip and rewrite determinism") {
    save_dataset(tmp.path / "d", images, 16, 42);
    const auto back = load_dataset(tmp.path / "d");
    REQUIRE(back.size() == images.size());
    for (std::size_t i = 0; i < images.size(); ++i)
      CHECK(max_abs_diff(back[i], images[i]) < 1e-6);

    const std::string manifest1 = slurp(tmp.path / "d" / "manifest.json");
    const std::string blob1 = slurp(tmp.path / "d" / "img_0000.f32");
    save_dataset(tmp.path / "d", images, 16, 42);
    CHECK(slurp(tmp.path / "d" / "manifest.json") == manifest1);
    CHECK(slurp(tmp.path / "d" / "img_0000.f32") == blob1);
    CHECK(fs::exists(tmp.path / "d" / "img_0002.pgm"));
  }
  SECTION("empty dataset") {
    save_dataset(tmp.path / "empty", {}, 16, 1);
    CHECK(load_dataset(tmp.path / "empty").empty());
  }
  SECTION("missing image file is a data error") {
    save_dataset(tmp.path / "d2", images, 16, 42);
    fs::remove(tmp.path / "d2" / "img_0001.f32");
    CHECK_THROWS_AS(load_dataset(tmp.path / "d2"), DataError);
  }
  SECTION("tampered manifest count is a data error") {
    save_dataset(tmp.path / "d3", images, 16, 42);
    json manifest = read_json_file(tmp.path / "d3" / "manifest.json");
    manifest["count"] = 7;
    write_json_file(tmp.path / "d3" / "manifest.json", manifest);
    CHECK_THROWS_AS(load_dataset(tmp.path / "d3"), DataError);
  }
}

TEST_CASE("mask JSON", "[io]") {
  TempDir tmp("mask");
  SECTION("round trip") {
    const SamplingMask mask = build_mask(64, 4, 12);
    save_mask(tmp.path / "mask.json", mask);
    const SamplingMask back = load_mask(tmp.path / "mask.json");
    CHECK(back.n == mask.n);
    CHECK(back.rho == mask.rho);
    CHECK(back.low_lines == mask.low_lines);
    CHECK(back.lines == mask.lines);
  }
  SECTION("inconsistent line list is a data error") {
    json j = mask_to_json(build_mask(64, 4, 12));
    j["lines"][0] = -31;  // not a line this (n, rho, L) produces
    CHECK_THROWS_AS(mask_from_json(j), DataError);
  }
  SECTION("missing field is a data error") {
    json j = mask_to_json(build_mask(64, 4, 0));
    j.erase("rho");
    CHECK_THROWS_AS(mask_from_json(j), DataError);
  }
}

TEST_CASE("undersampled k-space files", "[io]") {
  TempDir tmp("kspace");
  const SamplingMask mask = build_mask(32, 4, 4);
  const auto x = subsample(forward_dft(generate_shepp_logan(32)), mask);

  SECTION("round trip keeps float-precision values and the mask") {
    save_kspace(tmp.path / "x", x);
    const auto back = load_kspace(tmp.path / "x");
    CHECK(back.mask.lines == x.mask.lines);
    REQUIRE(back.rows.size() == x.rows.size());
    for (std::size_t i = 0; i < x.rows.size(); ++i) {
      CHECK(back.rows[i].real() == static_cast<double>(static_cast<float>(x.rows[i].real())));
      CHECK(back.rows[i].imag() == static_cast<double>(static_cast<float>(x.rows[i].imag())));
    }
  }
  SECTION("truncated blob is a data error") {
    save_kspace(tmp.path / "y", x);
    fs::resize_file(tmp.path / "y.f32", 10);
    CHECK_THROWS_AS(load_kspace(tmp.path / "y"), DataError);
  }
  SECTION("sidecar shape disagreement is a data error") {
    save_kspace(tmp.path / "z", x);
    json side = read_json_file(tmp.path / "z.json");
    side["lines"] = 5;
    write_json_file(tmp.path / "z.json", side);
    CHECK_THROWS_AS(load_kspace(tmp.path / "z"), DataError);
  }
}

TEST_CASE("weights checkpoint", "[io]") {
  TempDir tmp("weights");
  const UNetConfig cfg{16, 2, 4};
  const auto w = init_weights<float>(cfg, 123);

  SECTION("round trip is bit-exact") {
    save_weights(tmp.path / "ckpt", w, 123);
    const auto back = load_weights(tmp.path / "ckpt");
    CHECK(back.config.input_size == cfg.input_size);
    CHECK(back.config.depth == cfg.depth);
    CHECK(back.config.base_channels == cfg.base_channels);
    REQUIRE(back.layers.size() == w.layers.size());
    for (std::size_t i = 0; i < w.layers.size(); ++i) CHECK(back.layers[i] == w.layers[i]);
  }
  SECTION("manifest records every layer name and shape") {
    save_weights(tmp.path / "ckpt2", w, 123);
    const json manifest = read_json_file(tmp.path / "ckpt2" / "weights.json");
    const auto specs = layer_specs(cfg);
    REQUIRE(manifest.at("layers").size() == specs.size());
    CHECK(manifest.at("seed").get<std::uint64_t>() == 123);
    CHECK(manifest.at("layers").at(0).at("name").get<std::string>() == specs[0].name);
  }
  SECTION("tampered layer shape is a data error") {
    save_weights(tmp.path / "ckpt3", w, 123);
    json manifest = read_json_file(tmp.path / "ckpt3" / "weights.json");
    manifest["layers"][2]["out"] = 999;
    write_json_file(tmp.path / "ckpt3" / "weights.json", manifest);
    CHECK_THROWS_AS(load_weights(tmp.path / "ckpt3"), DataError);
  }
  SECTION("truncated layer blob is a data error") {
    save_weights(tmp.path / "ckpt4", w, 123);
    fs::resize_file(tmp.path / "ckpt4" / "enc0_conv0.f32", 3);
    CHECK_THROWS_AS(load_weights(tmp.path / "ckpt4"), DataError);
  }
}

TEST_CASE("loss history CSV", "[io]") {
  TempDir tmp("loss");
  SECTION("round trip is exact") {
    const std::vector<double> losses = {0.13236392373792613, 1.0 / 3.0, 2.5e-17, 42.0};
    save_loss_csv(tmp.path / "loss.csv", losses);
    CHECK(load_loss_csv(tmp.path / "loss.csv") == losses);
  }
  SECTION("header is present") {
    save_loss_csv(tmp.path / "loss.csv", {0.5});
    const std::string data = slurp(tmp.path / "loss.csv");
    CHECK(data.rfind("epoch,mean_loss\n0,0.5\n", 0) == 0);
  }
  SECTION("missing header is a data error") {
    std::ofstream(tmp.path / "bad.csv") << "0,0.5\n";
    CHECK_THROWS_AS(load_loss_csv(tmp.path / "bad.csv"), DataError);
  }
  SECTION("non-sequential epochs are a data error") {
    std::ofstream(tmp.path / "bad2.csv") << "epoch,mean_loss\n0,0.5\n2,0.4\n";
    CHECK_THROWS_AS(load_loss_csv(tmp.path / "bad2.csv"), DataError);
  }
}

TEST_CASE("metrics files", "[io]") {
  TempDir tmp("metrics");
  MetricsReport report;
  report.rows = {{0, "aliased", 0.04, 0.5}, {0, "unet", 0.02, 0.7}, {0, "corrected", 0.01, 0.9}};
  report.aggregates[0] = {1, 0.04, 0.0, 0.5, 0.0};
  report.aggregates[1] = {1, 0.02, 0.0, 0.7, 0.0};
  report.aggregates[2] = {1, 0.01, 0.0, 0.9, 0.0};

  SECTION("CSV layout") {
    save_metrics_csv(tmp.path / "m.csv", report);
    const std::string data = slurp(tmp.path / "m.csv");
    CHECK(data ==
          "image_id,stage,mse,ssim\n"
          "0,aliased,0.040000000000000001,0.5\n"
          "0,unet,0.02,0.69999999999999996\n"
          "0,corrected,0.01,0.90000000000000002\n");
  }
  SECTION("JSON aggregates") {
    save_metrics_json(tmp.path / "m.json", report);
    const json j = read_json_file(tmp.path / "m.json");
    CHECK(j.at("stages").at("corrected").at("mse_mean").get<double>() == 0.01);
    CHECK(j.at("stages").at("aliased").at("count").get<int>() == 1);
    CHECK(j.contains("spread"));
  }
}

TEST_CASE("training config JSON", "[io]") {
  SECTION("round trip") {
    TrainConfig cfg;
    cfg.learning_rate = 0.005;
    cfg.epochs = 42;
    cfg.seed = 99;
    const TrainConfig back = train_config_from_json(train_config_to_json(cfg));
    CHECK(back.learning_rate == cfg.learning_rate);
    CHECK(back.epochs == cfg.epochs);
    CHECK(back.seed == cfg.seed);
    CHECK(back.batch_size == cfg.batch_size);
  }
  SECTION("partial config fills defaults") {
    const TrainConfig cfg = train_config_from_json(json{{"epochs", 7}});
    CHECK(cfg.epochs == 7);
    CHECK(cfg.learning_rate == 0.001);
  }
  SECTION("invalid values are rejected") {
    CHECK_THROWS_AS(train_config_from_json(json{{"learning_rate", -1.0}}), std::invalid_argument);
  }
}
