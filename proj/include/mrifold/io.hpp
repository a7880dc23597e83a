#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrifold/kspace.hpp"
#include "mrifold/metrics.hpp"
#include "mrifold/training.hpp"
#include "mrifold/unet.hpp"

namespace mrifold {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian and assume a little-endian host");

/// Missing or corrupt on-disk artifact (CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Raw blobs

inline void write_f32(const std::filesystem::path& path, const std::vector<float>& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(float)));
  if (!out) throw DataError("short write: " + path.string());
}

inline std::vector<float> read_f32(const std::filesystem::path& path, std::size_t expect_count) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw DataError("cannot open: " + path.string());
  const auto bytes = static_cast<std::size_t>(in.tellg());
  if (bytes != expect_count * sizeof(float))
    throw DataError(path.string() + ": expected " + std::to_string(expect_count * sizeof(float)) +
                    " bytes, found " + std::to_string(bytes));
  std::vector<float> v(expect_count);
  in.seekg(0);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw DataError("short read: " + path.string());
  return v;
}

inline void write_image_f32(const std::filesystem::path& path, const Image& img) {
  std::vector<float> v(img.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(img.raw()[i]);
  write_f32(path, v);
}

inline Image read_image_f32(const std::filesystem::path& path, int n) {
  const auto v = read_f32(path, static_cast<std::size_t>(n) * n);
  Image img(n);
  for (std::size_t i = 0; i < v.size(); ++i) img.raw()[i] = v[i];
  return img;
}

/// 8-bit binary PGM; values clamped to [0,1] and scaled to 0..255.
inline void write_pgm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "P5\n" << img.size() << ' ' << img.size() << "\n255\n";
  std::vector<unsigned char> bytes(img.numel());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::min(1.0, std::max(0.0, img.raw()[i]));
    bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write: " + path.string());
}

// ---------------------------------------------------------------------------
// JSON helpers

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("short write: " + path.string());
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError("invalid JSON: " + path.string());
  return j;
}

// ---------------------------------------------------------------------------
// Dataset directory: manifest.json + one f32 blob and PGM preview per image.

inline std::string image_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img_%04d.f32", index);
  return buf;
}

inline void save_dataset(const std::filesystem::path& dir, const std::vector<Image>& images,
                         int n, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["count"] = images.size();
  manifest["n"] = n;
  manifest["seed"] = seed;
  json names = json::array();
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string name = image_file_name(static_cast<int>(i));
    write_image_f32(dir / name, images[i]);
    std::filesystem::path pgm = dir / name;
    pgm.replace_extension(".pgm");
    write_pgm(pgm, images[i]);
    names.push_back(name);
  }
  manifest["images"] = names;
  write_json_file(dir / "manifest.json", manifest);
}

inline std::vector<Image> load_dataset(const std::filesystem::path& dir) {
  const json manifest = read_json_file(dir / "manifest.json");
  try {
    const int n = manifest.at("n").get<int>();
    const auto names = manifest.at("images").get<std::vector<std::string>>();
    if (names.size() != manifest.at("count").get<std::size_t>())
      throw DataError(dir.string() + ": manifest count disagrees with image list");
    std::vector<Image> images;
    images.reserve(names.size());
    for (const auto& name : names) images.push_back(read_image_f32(dir / name, n));
    return images;
  } catch (const json::exception& e) {
    throw DataError(dir.string() + ": bad manifest (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------------------
// Sampling masks

inline json mask_to_json(const SamplingMask& mask) {
  return json{{"n", mask.n}, {"rho", mask.rho}, {"low_lines", mask.low_lines},
              {"lines", mask.lines}};
}

inline SamplingMask mask_from_json(const json& j) {
  try {
    SamplingMask m;
    m.n = j.at("n").get<int>();
    m.rho = j.at("rho").get<int>();
    m.low_lines = j.at("low_lines").get<int>();
    m.lines = j.at("lines").get<std::vector<int>>();
    const SamplingMask rebuilt = build_mask(m.n, m.rho, m.low_lines);
    if (rebuilt.lines != m.lines) throw DataError("mask lines disagree with (n, rho, low_lines)");
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad mask JSON (") + e.what() + ")");
  }
}

inline void save_mask(const std::filesystem::path& path, const SamplingMask& mask) {
  write_json_file(path, mask_to_json(mask));
}

inline SamplingMask load_mask(const std::filesystem::path& path) {
  return mask_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------
// Undersampled k-space: <base>.f32 holds (re, im) float pairs for the
// measured lines in mask order; <base>.json carries the shape and mask.

inline void save_kspace(const std::filesystem::path& base, const UndersampledKSpace& x) {
  std::vector<float> v;
  v.reserve(x.rows.size() * 2);
  for (const auto& z : x.rows) {
    v.push_back(static_cast<float>(z.real()));
    v.push_back(static_cast<float>(z.imag()));
  }
  std::filesystem::path blob = base;
  blob += ".f32";
  std::filesystem::path side = base;
  side += ".json";
  write_f32(blob, v);
  write_json_file(side, json{{"lines", x.mask.line_count()}, {"n", x.mask.n},
                             {"mask", mask_to_json(x.mask)}});
}

inline UndersampledKSpace load_kspace(const std::filesystem::path& base) {
  std::filesystem::path blob = base;
  blob += ".f32";
  std::filesystem::path side = base;
  side += ".json";
  const json j = read_json_file(side);
  try {
    UndersampledKSpace x;
    x.mask = mask_from_json(j.at("mask"));
    if (j.at("n").get<int>() != x.mask.n || j.at("lines").get<int>() != x.mask.line_count())
      throw DataError(side.string() + ": shape disagrees with mask");
    const auto v = read_f32(blob, static_cast<std::size_t>(x.mask.line_count()) * x.mask.n * 2);
    x.rows.resize(v.size() / 2);
    for (std::size_t i = 0; i < x.rows.size(); ++i) x.rows[i] = {v[2 * i], v[2 * i + 1]};
    return x;
  } catch (const json::exception& e) {
    throw DataError(side.string() + ": bad sidecar (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------------------
// Network weights: weights.json + one f32 blob per layer, row-major in
// (out, in, kh, kw) order — the in-memory layout, so blobs round-trip exactly.

inline void save_weights(const std::filesystem::path& dir, const UNetWeights<float>& w,
                         std::uint64_t seed = 0) {
  std::filesystem::create_directories(dir);
  const auto specs = layer_specs(w.config);
  json manifest;
  manifest["config"] = {{"input_size", w.config.input_size},
                        {"depth", w.config.depth},
                        {"base_channels", w.config.base_channels}};
  manifest["seed"] = seed;
  json layers = json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const std::string file = s.name + ".f32";
    write_f32(dir / file, w.layers[i]);
    layers.push_back(json{{"name", s.name}, {"out", s.out_ch}, {"in", s.in_ch},
                          {"kh", s.ksize}, {"kw", s.ksize}, {"file", file}});
  }
  manifest["layers"] = layers;
  write_json_file(dir / "weights.json", manifest);
}

inline UNetWeights<float> load_weights(const std::filesystem::path& dir) {
  const json manifest = read_json_file(dir / "weights.json");
  try {
    UNetConfig cfg;
    cfg.input_size = manifest.at("config").at("input_size").get<int>();
    cfg.depth = manifest.at("config").at("depth").get<int>();
    cfg.base_channels = manifest.at("config").at("base_channels").get<int>();
    cfg.validate();
    const auto specs = layer_specs(cfg);
    const auto& layers = manifest.at("layers");
    if (layers.size() != specs.size())
      throw DataError(dir.string() + ": layer count disagrees with config");
    UNetWeights<float> w;
    w.config = cfg;
    w.layers.resize(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const auto& entry = layers.at(i);
      const auto& s = specs[i];
      if (entry.at("name").get<std::string>() != s.name ||
          entry.at("out").get<int>() != s.out_ch || entry.at("in").get<int>() != s.in_ch ||
          entry.at("kh").get<int>() != s.ksize || entry.at("kw").get<int>() != s.ksize)
        throw DataError(dir.string() + ": layer " + s.name + " shape disagrees with config");
      w.layers[i] = read_f32(dir / entry.at("file").get<std::string>(), s.weight_count());
    }
    return w;
  } catch (const json::exception& e) {
    throw DataError(dir.string() + ": bad weights manifest (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------------------
// Loss history CSV: header then one `epoch,mean_loss` row per epoch, printed
// with 17 significant digits so values round-trip bit-exactly.

inline void save_loss_csv(const std::filesystem::path& path, const std::vector<double>& losses) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "epoch,mean_loss\n";
  char buf[64];
  for (std::size_t e = 0; e < losses.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", e, losses[e]);
    out << buf;
  }
  if (!out) throw DataError("short write: " + path.string());
}

inline std::vector<double> load_loss_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "epoch,mean_loss")
    throw DataError(path.string() + ": missing loss CSV header");
  std::vector<double> losses;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DataError(path.string() + ": malformed row: " + line);
    const std::size_t epoch = std::stoul(line.substr(0, comma));
    if (epoch != losses.size())
      throw DataError(path.string() + ": non-sequential epoch " + std::to_string(epoch));
    losses.push_back(std::stod(line.substr(comma + 1)));
  }
  return losses;
}

// ---------------------------------------------------------------------------
// Metrics report: CSV per-image rows; JSON aggregates.

inline void save_metrics_csv(const std::filesystem::path& path, const MetricsReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "image_id,stage,mse,ssim\n";
  char buf[96];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%.17g,%.17g\n", row.image_id, row.stage.c_str(),
                  row.mse, row.ssim);
    out << buf;
  }
  if (!out) throw DataError("short write: " + path.string());
}

inline json metrics_to_json(const MetricsReport& report) {
  json stages;
  for (int s = 0; s < 3; ++s) {
    const auto& agg = report.aggregates[s];
    stages[kStageNames[s]] = {{"count", agg.count},
                              {"mse_mean", agg.mse_mean},
                              {"mse_std", agg.mse_std},
                              {"ssim_mean", agg.ssim_mean},
                              {"ssim_std", agg.ssim_std}};
  }
  return json{{"spread", "sample standard deviation (n-1)"}, {"stages", stages}};
}

inline void save_metrics_json(const std::filesystem::path& path, const MetricsReport& report) {
  write_json_file(path, metrics_to_json(report));
}

// ---------------------------------------------------------------------------
// Training config

inline json train_config_to_json(const TrainConfig& cfg) {
  return json{{"learning_rate", cfg.learning_rate}, {"rms_decay", cfg.rms_decay},
              {"batch_size", cfg.batch_size},       {"epochs", cfg.epochs},
              {"seed", cfg.seed},                   {"epsilon", cfg.epsilon}};
}

inline TrainConfig train_config_from_json(const json& j) {
  try {
    TrainConfig cfg;
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.rms_decay = j.value("rms_decay", cfg.rms_decay);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad training config (") + e.what() + ")");
  }
}

}  // namespace mrifold
