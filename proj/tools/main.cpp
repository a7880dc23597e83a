// Command-line driver: dataset generation, training, reconstruction,
// separability probes, and the rho/L sweep experiments.
#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mrifold/fft.hpp"
#include "mrifold/io.hpp"
#include "mrifold/kspace.hpp"
#include "mrifold/metrics.hpp"
#include "mrifold/phantom.hpp"
#include "mrifold/reconstruction.hpp"
#include "mrifold/training.hpp"
#include "mrifold/unet.hpp"

namespace fs = std::filesystem;
using namespace mrifold;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every tunable the subcommands share. A --config JSON file overwrites these
// defaults first; explicit flags then overwrite the config.
struct Options {
  int n = 64;
  int rho = 4;
  int low_lines = 4;
  std::uint64_t seed = 0;
  int count = 200;
  int train_count = 200;
  int test_count = 50;
  int epochs = 150;
  int batch_size = 32;
  double lr = 0.001;
  double decay = 0.9;
  int depth = 3;
  int base_channels = 16;
  int checkpoint_every = 0;
  std::string out;
  std::string checkpoint;
  std::string dataset;
  std::string image;
  std::string kspace;
  std::string truth;
};

// Config keys mirror the long flag names exactly.
void apply_config(const json& j, Options& o) {
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n") o.n = value.get<int>();
      else if (key == "rho") o.rho = value.get<int>();
      else if (key == "low-lines") o.low_lines = value.get<int>();
      else if (key == "seed") o.seed = value.get<std::uint64_t>();
      else if (key == "count") o.count = value.get<int>();
      else if (key == "train-count") o.train_count = value.get<int>();
      else if (key == "test-count") o.test_count = value.get<int>();
      else if (key == "epochs") o.epochs = value.get<int>();
      else if (key == "batch-size") o.batch_size = value.get<int>();
      else if (key == "lr") o.lr = value.get<double>();
      else if (key == "decay") o.decay = value.get<double>();
      else if (key == "depth") o.depth = value.get<int>();
      else if (key == "base-channels") o.base_channels = value.get<int>();
      else if (key == "checkpoint-every") o.checkpoint_every = value.get<int>();
      else if (key == "out") o.out = value.get<std::string>();
      else if (key == "checkpoint") o.checkpoint = value.get<std::string>();
      else if (key == "dataset") o.dataset = value.get<std::string>();
      else if (key == "image") o.image = value.get<std::string>();
      else if (key == "kspace") o.kspace = value.get<std::string>();
      else if (key == "truth") o.truth = value.get<std::string>();
      else throw UsageError("config: unknown key \"" + key + "\"");
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

// The config file must be applied before CLI11 parses (flags override it), so
// it is pulled straight out of argv here.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config") {
      if (i + 1 >= argc) throw UsageError("--config needs a file path");
      return argv[i + 1];
    }
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

void need(const std::string& value, const char* message) {
  if (value.empty()) throw UsageError(message);
}

// rho=1 leaves no unmeasured lines, so any requested L is shrunk to fit.
SamplingMask clipped_mask(int n, int rho, int low_lines) {
  if (rho < 1 || n % rho != 0)
    throw UsageError("rho must be >= 1 and divide n (got n=" + std::to_string(n) +
                     ", rho=" + std::to_string(rho) + ")");
  const int available = n - n / rho;
  if (low_lines > available) {
    std::fprintf(stderr,
                 "warning: clipping low-lines from %d to %d (only %d unmeasured lines at rho=%d)\n",
                 low_lines, available, available, rho);
    low_lines = available;
  }
  return build_mask(n, rho, low_lines);
}

void write_image_pair(const fs::path& dir, const std::string& stem, const Image& img) {
  write_image_f32(dir / (stem + ".f32"), img);
  write_pgm(dir / (stem + ".pgm"), img);
}

// Full complex grid as interleaved re,im float32 plus a tiny sidecar.
void write_grid_kspace(const fs::path& base, const KSpaceGrid& g) {
  std::vector<float> packed(2 * g.numel());
  const std::vector<std::complex<double>>& p = g.raw();
  for (std::size_t i = 0; i < g.numel(); ++i) {
    packed[2 * i] = static_cast<float>(p[i].real());
    packed[2 * i + 1] = static_cast<float>(p[i].imag());
  }
  write_f32(base.string() + ".f32", packed);
  write_json_file(base.string() + ".json",
                  json{{"n", g.size()}, {"layout", "row-major re,im float32 pairs"}});
}

// Absolute difference scaled so the largest error maps to white in the PGM.
Image abs_diff_scaled(const Image& a, const Image& b) {
  require_same_size(a.size(), b.size(), "difference image");
  Image d(a.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    d.raw()[i] = std::abs(a.raw()[i] - b.raw()[i]);
    peak = std::max(peak, d.raw()[i]);
  }
  if (peak > 0.0)
    for (double& v : d) v /= peak;
  return d;
}

std::vector<ReconResult> reconstruct_all(const std::vector<Image>& images,
                                         const SamplingMask& mask, const UNetWeights<float>& w) {
  std::vector<ReconResult> out;
  out.reserve(images.size());
  for (const Image& y : images) out.push_back(reconstruct(subsample(forward_dft(y), mask), w));
  return out;
}

void print_metrics(const MetricsReport& report) {
  std::printf("%-10s %13s %13s %13s %13s\n", "stage", "mse_mean", "mse_std", "ssim_mean",
              "ssim_std");
  for (int s = 0; s < 3; ++s) {
    const StageAggregate& a = report.aggregates[s];
    std::printf("%-10s %13.6e %13.6e %13.6f %13.6f\n", kStageNames[s], a.mse_mean, a.mse_std,
                a.ssim_mean, a.ssim_std);
  }
}

TrainConfig train_config_from(const Options& o) {
  TrainConfig tc;
  tc.learning_rate = o.lr;
  tc.rms_decay = o.decay;
  tc.batch_size = o.batch_size;
  tc.epochs = o.epochs;
  tc.seed = o.seed;
  return tc;
}

int cmd_dataset(const Options& o) {
  need(o.out, "dataset: --out is required (flag or config)");
  std::vector<Image> images = generate_dataset(o.count, o.n, o.seed);
  save_dataset(o.out, images, o.n, o.seed);
  std::printf("wrote %d phantom images (n=%d, seed=%" PRIu64 ") to %s\n", o.count, o.n, o.seed,
              o.out.c_str());
  return 0;
}

int cmd_train(const Options& o) {
  need(o.dataset, "train: --dataset is required (flag or config)");
  need(o.out, "train: --out is required (flag or config)");
  std::vector<Image> images = load_dataset(o.dataset);
  if (images.empty()) throw DataError("train: dataset \"" + o.dataset + "\" holds no images");
  const int n = images.front().size();

  SamplingMask mask = clipped_mask(n, o.rho, o.low_lines);
  std::printf("training on %zu images: n=%d rho=%d L=%d -> %d/%d lines (R=%.3f)\n", images.size(),
              n, o.rho, mask.low_lines, mask.line_count(), n, reduction_factor(mask));

  const TrainConfig tc = train_config_from(o);
  const UNetConfig net{n, o.depth, o.base_channels};

  fs::create_directories(o.out);
  const fs::path dir = o.out;
  save_mask(dir / "mask.json", mask);
  write_json_file(dir / "train_config.json", train_config_to_json(tc));

  std::vector<TrainingPair> pairs = make_training_pairs(images, mask);
  auto echo = [](int ep, double loss) {
    std::printf("epoch %4d  loss %.8f\n", ep, loss);
    std::fflush(stdout);
  };
  std::function<void(const TrainState<float>&)> snapshot;
  if (o.checkpoint_every > 0) {
    snapshot = [&](const TrainState<float>& st) {
      if (st.epoch % o.checkpoint_every == 0 && st.epoch < tc.epochs) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "checkpoint_ep%04d", st.epoch);
        save_weights(dir / stem, st.weights, tc.seed);
      }
    };
  }

  TrainState<float> state = train<float>(pairs, tc, net, echo, snapshot);
  save_weights(dir / "checkpoint", state.weights, tc.seed);
  save_loss_csv(dir / "loss.csv", state.loss_history);
  if (state.loss_history.empty()) {
    std::printf("done: 0 epochs requested, checkpoint holds the untouched initialization\n");
  } else {
    const double first = state.loss_history.front();
    const double last = state.loss_history.back();
    std::printf("done: loss %.8f -> %.8f (ratio %.4f), checkpoint in %s\n", first, last,
                last / first, (dir / "checkpoint").string().c_str());
  }
  return 0;
}

int cmd_reconstruct(const Options& o) {
  need(o.checkpoint, "reconstruct: --checkpoint is required (flag or config)");
  need(o.out, "reconstruct: --out is required (flag or config)");
  UNetWeights<float> w = load_weights(o.checkpoint);

  UndersampledKSpace x;
  if (!o.kspace.empty()) {
    x = load_kspace(o.kspace);
  } else if (!o.image.empty()) {
    Image y = read_image_f32(o.image, o.n);
    x = subsample(forward_dft(y), clipped_mask(o.n, o.rho, o.low_lines));
  } else {
    throw UsageError("reconstruct: pass --image (raw f32 grid) or --kspace (file base)");
  }

  ReconResult res = reconstruct(x, w);

  fs::create_directories(o.out);
  const fs::path dir = o.out;
  save_mask(dir / "mask.json", x.mask);
  save_kspace(dir / "measured_kspace", x);
  write_image_pair(dir, "aliased", res.aliased);
  write_image_pair(dir, "unet", res.unet_output);
  write_image_pair(dir, "corrected", res.final);
  write_grid_kspace(dir / "corrected_kspace", res.corrected_kspace);

  json index;
  index["n"] = x.mask.n;
  index["stages"] = {"aliased", "unet", "corrected"};
  index["corrected_kspace"] = "corrected_kspace.f32";

  if (!o.truth.empty()) {
    Image t = read_image_f32(o.truth, x.mask.n);
    const Image* stages[3] = {&res.aliased, &res.unet_output, &res.final};
    json vs;
    for (int s = 0; s < 3; ++s) {
      write_image_pair(dir, std::string("diff_") + kStageNames[s], abs_diff_scaled(*stages[s], t));
      const double e = mse(*stages[s], t);
      const double sim = ssim(*stages[s], t);
      vs[kStageNames[s]] = {{"mse", e}, {"ssim", sim}};
      std::printf("%-10s mse %.8e  ssim %.6f\n", kStageNames[s], e, sim);
    }
    index["metrics_vs_truth"] = vs;
  }
  write_json_file(dir / "index.json", index);
  std::printf("wrote reconstruction stages to %s\n", o.out.c_str());
  return 0;
}

// Disc phantom with one off-centre anomaly; the pair differs only by shifting
// that anomaly n/rho rows, which makes the uniform-grid folds coincide.
int cmd_separability(const Options& o) {
  need(o.out, "separability: --out is required (flag or config)");

  PhantomSpec spec;
  Ellipse head;
  head.a = head.b = 0.9;
  head.intensity = 0.5;
  spec.base.push_back(head);
  Ellipse anomaly;
  anomaly.row = -0.3;
  anomaly.a = anomaly.b = 0.08;
  anomaly.intensity = 0.4;
  spec.anomalies.push_back(anomaly);

  bool wrapped = false;
  PhantomSpec moved = shift_anomalies(spec, 1.0 / o.rho, &wrapped);
  if (wrapped) std::fprintf(stderr, "warning: shifted anomaly wrapped across the frame edge\n");

  Image a = render_phantom(spec, o.n);
  Image b = render_phantom(moved, o.n);

  fs::create_directories(o.out);
  const fs::path dir = o.out;
  write_image_pair(dir, "truth_a", a);
  write_image_pair(dir, "truth_b", b);

  json report;
  report["n"] = o.n;
  report["rho"] = o.rho;
  report["shift_rows"] = o.n / o.rho;
  report["truth_distance"] = l2_distance(a, b);
  std::printf("truth pair distance %.6e (anomaly moved %d rows)\n", l2_distance(a, b),
              o.n / o.rho);

  std::vector<int> ls = {0};
  if (o.low_lines != 0) ls.push_back(o.low_lines);
  for (int requested : ls) {
    SamplingMask mask = clipped_mask(o.n, o.rho, requested);
    Image ra = zero_fill_recon(subsample(forward_dft(a), mask));
    Image rb = zero_fill_recon(subsample(forward_dft(b), mask));
    const double dist = l2_distance(ra, rb);
    const std::string stem = "recon_L" + std::to_string(mask.low_lines);
    write_image_pair(dir, stem + "_a", ra);
    write_image_pair(dir, stem + "_b", rb);
    report["distance"][std::to_string(mask.low_lines)] = dist;
    std::printf("L=%-3d ||recon_a - recon_b|| = %.6e%s\n", mask.low_lines, dist,
                mask.low_lines == 0 ? "  (folded copies collide)" : "");
  }
  write_json_file(dir / "report.json", report);
  return 0;
}

struct SweepCell {
  int rho;
  int low_lines;
};

int cmd_sweep(const Options& o) {
  need(o.out, "sweep: --out is required (flag or config)");

  // Fixed-L row over rho, then fixed-rho row over L; the shared (4,12) cell
  // appears once.
  std::vector<SweepCell> cells;
  for (int rho : {1, 4, 5, 6, 8}) cells.push_back({rho, 12});
  for (int low : {0, 1, 6, 8}) cells.push_back({4, low});

  std::vector<Image> train_images = generate_dataset(o.train_count, o.n, o.seed);
  std::vector<Image> test_images = generate_dataset(o.test_count, o.n, o.seed + 1);
  std::printf("sweep: n=%d, %d train / %d test images, %d epochs per cell\n", o.n, o.train_count,
              o.test_count, o.epochs);

  fs::create_directories(o.out);
  json rows = json::array();
  for (const SweepCell& cell : cells) {
    if (o.n % cell.rho != 0) {
      std::fprintf(stderr, "warning: skipping cell rho=%d L=%d (rho does not divide n=%d)\n",
                   cell.rho, cell.low_lines, o.n);
      continue;
    }
    SamplingMask mask = clipped_mask(o.n, cell.rho, cell.low_lines);
    const std::string name =
        "rho" + std::to_string(cell.rho) + "_L" + std::to_string(cell.low_lines);
    const fs::path cdir = fs::path(o.out) / name;
    fs::create_directories(cdir);
    save_mask(cdir / "mask.json", mask);

    const TrainConfig tc = train_config_from(o);
    const UNetConfig net{o.n, o.depth, o.base_channels};
    std::vector<TrainingPair> pairs = make_training_pairs(train_images, mask);
    TrainState<float> state = train<float>(pairs, tc, net);
    save_weights(cdir / "checkpoint", state.weights, tc.seed);
    save_loss_csv(cdir / "loss.csv", state.loss_history);

    std::vector<ReconResult> results = reconstruct_all(test_images, mask, state.weights);
    MetricsReport report = evaluate(results, test_images);
    save_metrics_csv(cdir / "metrics.csv", report);
    save_metrics_json(cdir / "metrics.json", report);
    write_image_pair(cdir, "sample_truth", test_images.front());
    write_image_pair(cdir, "sample_aliased", results.front().aliased);
    write_image_pair(cdir, "sample_unet", results.front().unet_output);
    write_image_pair(cdir, "sample_corrected", results.front().final);

    const double final_loss = state.loss_history.empty() ? 0.0 : state.loss_history.back();
    json row;
    row["rho"] = cell.rho;
    row["low_lines"] = cell.low_lines;
    row["mask_low_lines"] = mask.low_lines;
    row["lines"] = mask.line_count();
    row["R"] = reduction_factor(mask);
    row["final_loss"] = final_loss;
    for (int s = 0; s < 3; ++s) {
      row["mse"][kStageNames[s]] = report.aggregates[s].mse_mean;
      row["ssim"][kStageNames[s]] = report.aggregates[s].ssim_mean;
    }
    rows.push_back(row);
    std::printf("cell rho=%d L=%-2d  lines=%3d R=%.3f  loss %.6f  mse %0.6e/%0.6e/%0.6e  "
                "ssim %.4f/%.4f/%.4f\n",
                cell.rho, cell.low_lines, mask.line_count(), reduction_factor(mask), final_loss,
                report.aggregates[0].mse_mean, report.aggregates[1].mse_mean,
                report.aggregates[2].mse_mean, report.aggregates[0].ssim_mean,
                report.aggregates[1].ssim_mean, report.aggregates[2].ssim_mean);
    std::fflush(stdout);
  }

  json summary;
  summary["n"] = o.n;
  summary["seed"] = o.seed;
  summary["train_count"] = o.train_count;
  summary["test_count"] = o.test_count;
  summary["epochs"] = o.epochs;
  summary["cells"] = rows;
  write_json_file(fs::path(o.out) / "sweep.json", summary);
  std::printf("sweep table in %s\n", (fs::path(o.out) / "sweep.json").string().c_str());
  return 0;
}

int cmd_eval(const Options& o) {
  need(o.dataset, "eval: --dataset is required (flag or config)");
  need(o.checkpoint, "eval: --checkpoint is required (flag or config)");
  need(o.out, "eval: --out is required (flag or config)");
  std::vector<Image> images = load_dataset(o.dataset);
  if (images.empty()) throw DataError("eval: dataset \"" + o.dataset + "\" holds no images");
  UNetWeights<float> w = load_weights(o.checkpoint);

  const int n = images.front().size();
  SamplingMask mask = clipped_mask(n, o.rho, o.low_lines);
  std::vector<ReconResult> results = reconstruct_all(images, mask, w);
  MetricsReport report = evaluate(results, images);

  fs::create_directories(o.out);
  const fs::path dir = o.out;
  save_mask(dir / "mask.json", mask);
  save_metrics_csv(dir / "metrics.csv", report);
  save_metrics_json(dir / "metrics.json", report);
  print_metrics(report);
  std::printf("wrote metrics for %zu images to %s\n", images.size(), o.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  try {
    const std::string config_path = find_config_path(argc, argv);
    if (!config_path.empty()) apply_config(read_json_file(config_path), o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  CLI::App app{"undersampled-MRI reconstruction toolkit"};
  app.require_subcommand(1);
  std::string config_opt;  // already applied above; registered so parsing accepts the flag
  app.add_option("--config", config_opt, "JSON file whose keys mirror the long flags");

  CLI::App* ds = app.add_subcommand("dataset", "generate a phantom image corpus");
  ds->add_option("--count", o.count, "number of images")->capture_default_str();
  ds->add_option("--n", o.n, "image size in pixels per side")->capture_default_str();
  ds->add_option("--seed", o.seed, "corpus seed")->capture_default_str();
  ds->add_option("--out", o.out, "output directory");

  CLI::App* tr = app.add_subcommand("train", "train the unfolding network on a dataset");
  tr->add_option("--dataset", o.dataset, "dataset directory from the dataset command");
  tr->add_option("--rho", o.rho, "uniform undersampling factor")->capture_default_str();
  tr->add_option("--low-lines", o.low_lines, "extra low-frequency lines")->capture_default_str();
  tr->add_option("--seed", o.seed, "weight init + shuffle seed")->capture_default_str();
  tr->add_option("--epochs", o.epochs, "training epochs")->capture_default_str();
  tr->add_option("--batch-size", o.batch_size, "mini-batch size")->capture_default_str();
  tr->add_option("--lr", o.lr, "RMSProp learning rate")->capture_default_str();
  tr->add_option("--decay", o.decay, "RMSProp decay")->capture_default_str();
  tr->add_option("--depth", o.depth, "encoder/decoder levels")->capture_default_str();
  tr->add_option("--base-channels", o.base_channels, "channels at full resolution")
      ->capture_default_str();
  tr->add_option("--checkpoint-every", o.checkpoint_every,
                 "also save weights every K epochs (0 = final only)")
      ->capture_default_str();
  tr->add_option("--out", o.out, "output directory");

  CLI::App* rc = app.add_subcommand("reconstruct", "run the three-stage pipeline on one input");
  rc->add_option("--checkpoint", o.checkpoint, "weights directory");
  rc->add_option("--image", o.image, "raw f32 image; it is masked with --n/--rho/--low-lines");
  rc->add_option("--kspace", o.kspace, "measured k-space file base (as written by save)");
  rc->add_option("--truth", o.truth, "raw f32 reference for difference images and metrics");
  rc->add_option("--n", o.n, "image size for --image input")->capture_default_str();
  rc->add_option("--rho", o.rho, "uniform undersampling factor")->capture_default_str();
  rc->add_option("--low-lines", o.low_lines, "extra low-frequency lines")->capture_default_str();
  rc->add_option("--out", o.out, "output directory");

  CLI::App* sp = app.add_subcommand("separability",
                                    "show the fold collision a shifted anomaly pair produces");
  sp->add_option("--n", o.n, "image size")->capture_default_str();
  sp->add_option("--rho", o.rho, "uniform undersampling factor")->capture_default_str();
  sp->add_option("--low-lines", o.low_lines, "low-frequency lines for the second mask")
      ->capture_default_str();
  sp->add_option("--out", o.out, "output directory");

  CLI::App* sw = app.add_subcommand("sweep", "train/evaluate over the rho and L grids");
  sw->add_option("--n", o.n, "image size")->capture_default_str();
  sw->add_option("--seed", o.seed, "corpus + training seed")->capture_default_str();
  sw->add_option("--train-count", o.train_count, "training images")->capture_default_str();
  sw->add_option("--test-count", o.test_count, "held-out images")->capture_default_str();
  sw->add_option("--epochs", o.epochs, "epochs per cell")->capture_default_str();
  sw->add_option("--batch-size", o.batch_size, "mini-batch size")->capture_default_str();
  sw->add_option("--lr", o.lr, "RMSProp learning rate")->capture_default_str();
  sw->add_option("--decay", o.decay, "RMSProp decay")->capture_default_str();
  sw->add_option("--depth", o.depth, "encoder/decoder levels")->capture_default_str();
  sw->add_option("--base-channels", o.base_channels, "channels at full resolution")
      ->capture_default_str();
  sw->add_option("--out", o.out, "output directory");

  CLI::App* ev = app.add_subcommand("eval", "metrics for a checkpoint over a dataset");
  ev->add_option("--dataset", o.dataset, "dataset directory");
  ev->add_option("--checkpoint", o.checkpoint, "weights directory");
  ev->add_option("--rho", o.rho, "uniform undersampling factor")->capture_default_str();
  ev->add_option("--low-lines", o.low_lines, "extra low-frequency lines")->capture_default_str();
  ev->add_option("--out", o.out, "output directory");

  for (CLI::App* sub : {ds, tr, rc, sp, sw, ev})
    sub->add_option("--config", config_opt, "JSON file whose keys mirror the long flags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (ds->parsed()) return cmd_dataset(o);
    if (tr->parsed()) return cmd_train(o);
    if (rc->parsed()) return cmd_reconstruct(o);
    if (sp->parsed()) return cmd_separability(o);
    if (sw->parsed()) return cmd_sweep(o);
    if (ev->parsed()) return cmd_eval(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
