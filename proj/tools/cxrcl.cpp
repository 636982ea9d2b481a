/*
 * Copyright 2026 The cxrcl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <thread>

#include "config.hpp"
#include "cxrcl/bench/metrics.hpp"
#include "cxrcl/bench/report.hpp"
#include "cxrcl/bench/runner.hpp"
#include "cxrcl/bench/stream.hpp"
#include "cxrcl/cl/strategy.hpp"
#include "cxrcl/error.hpp"
#include "cxrcl/imaging/image_io.hpp"
#include "cxrcl/imaging/manifest.hpp"
#include "cxrcl/imaging/preprocess.hpp"
#include "cxrcl/nn/checkpoint.hpp"
#include "cxrcl/service/http_api.hpp"
#include "cxrcl/service/registry.hpp"
#include "cxrcl/service/service.hpp"
#include "cxrcl/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cxrcl::tools {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitRejected = 2;

struct Flags {
  std::optional<fs::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<std::size_t> k;
  std::optional<std::size_t> experiences;
  std::optional<fs::path> out;
  std::optional<std::string> addr;
  std::optional<fs::path> image;
};

// ---- preprocess ----

int cmd_preprocess(const Flags& flags) {
  const json cfg = read_config(flags.config);
  const fs::path manifest_path = config_path(cfg, "manifest", flags.config);
  const fs::path out = flags.out ? *flags.out : config_path(cfg, "out", flags.config);
  const auto strategy = parse_strategy(cfg.value("strategy", std::string("original")));
  require(strategy.has_value(), ErrorCode::kInvalidArgument, "unknown preprocessing strategy");
  PreprocessConfig pcfg{*strategy, cfg.value("equalize", false), cfg.value("crop_fraction", kDefaultCropFraction)};

  const DatasetManifest source = load_manifest(manifest_path);
  std::vector<std::string> errors;
  if (pcfg.strategy == Strategy::kSegmented) {
    for (const auto* split : {&source.train, &source.validation, &source.test}) {
      for (const auto& ref : *split) {
        if (!ref.mask_path) errors.push_back(ref.id + ": segmented strategy needs a mask_path");
      }
    }
  }
  if (!errors.empty()) {
    for (const auto& e : errors) std::cerr << "error: " << e << "\n";
    std::cerr << errors.size() << " image(s) cannot be processed\n";
    return kExitFailure;
  }

  fs::create_directories(out / "images");
  const bool copy = pcfg.strategy == Strategy::kOriginal && !pcfg.equalize;
  DatasetManifest derived;
  derived.strategy = pcfg.strategy;
  derived.equalize = pcfg.equalize;
  std::size_t count = 0;
  auto run = [&](const std::vector<SampleRef>& in, std::vector<SampleRef>& dst, const char* split) {
    fs::create_directories(out / "images" / split);
    for (const auto& ref : in) {
      SampleRef next = ref;
      if (copy) {
        next.image_path = out / "images" / split / (ref.id + ref.image_path.extension().string());
        fs::copy_file(ref.image_path, next.image_path, fs::copy_options::overwrite_existing);
      } else {
        const Image img = load_image(ref.image_path);
        std::optional<Image> mask;
        if (pcfg.strategy == Strategy::kSegmented) mask = load_image(*ref.mask_path);
        next.image_path = out / "images" / split / (ref.id + ".png");
        save_image(preprocess(img, pcfg, mask ? &*mask : nullptr), next.image_path);
        if (pcfg.strategy == Strategy::kSegmented) next.mask_path.reset();
      }
      dst.push_back(std::move(next));
      ++count;
    }
  };
  run(source.train, derived.train, "train");
  run(source.validation, derived.validation, "validation");
  run(source.test, derived.test, "test");
  save_manifest(derived, out / "manifest.json");
  std::cout << "preprocessed " << count << " images strategy=" << strategy_name(pcfg.strategy)
            << " equalize=" << (pcfg.equalize ? "true" : "false") << "\n";
  std::cout << "manifest: " << (out / "manifest.json").string() << "\n";
  return kExitOk;
}

// ---- train ----

service::Raster raster_from(const json& cfg) {
  if (!cfg.contains("raster")) return {};
  return {cfg["raster"].at(0).get<std::size_t>(), cfg["raster"].at(1).get<std::size_t>()};
}

nn::NetworkConfig network_from(const json& cfg, service::Raster raster, std::size_t outputs,
                               std::vector<std::size_t> fallback_hidden, std::uint64_t seed) {
  nn::NetworkConfig net;
  net.seed = seed;
  if (cfg.contains("network")) {
    net.layer_sizes = cfg["network"].get<std::vector<std::size_t>>();
  } else {
    net.layer_sizes.push_back(raster.width * raster.height);
    net.layer_sizes.insert(net.layer_sizes.end(), fallback_hidden.begin(), fallback_hidden.end());
    net.layer_sizes.push_back(outputs);
  }
  net.validate();
  require(net.layer_sizes.front() == raster.width * raster.height, ErrorCode::kInvalidArgument,
          "network input width does not match the raster");
  require(net.layer_sizes.back() == outputs, ErrorCode::kInvalidArgument,
          "network output width must be " + std::to_string(outputs));
  return net;
}

int cmd_train(const Flags& flags) {
  const json cfg = read_config(flags.config);
  const std::uint64_t seed = flags.seed.value_or(cfg.value("seed", std::uint64_t{0}));
  const std::string model = cfg.value("model", std::string("screening"));
  const fs::path out = flags.out ? *flags.out : config_path(cfg, "out", flags.config);
  const service::Raster raster = raster_from(cfg);
  const DatasetManifest manifest = load_manifest(config_path(cfg, "manifest", flags.config));
  nn::TrainConfig tc = train_config(cfg.value("train", json::object()));
  tc.seed = seed;

  const auto train = load_samples(manifest.train, raster.width, raster.height);
  const auto val = load_samples(manifest.validation, raster.width, raster.height);
  if (model == "screening") {
    const auto net = network_from(cfg, raster, kNumClasses, {128, 64}, seed);
    const auto result = nn::fit(nn::Network(net), train, val, tc);
    service::save_screening_checkpoint(out, result.network, raster, nullptr, json{{"seed", seed}});
    const auto test = load_samples(manifest.test, raster.width, raster.height);
    std::printf("model: screening\nepochs: %zu\nbest_epoch: %d\nval_accuracy: %.4f\n", result.history.size(),
                result.best_epoch, result.best_val_accuracy);
    if (!test.empty()) std::printf("test_accuracy: %.4f\n", nn::accuracy(nn::quantize_to_storage(result.network), test));
  } else if (model == "validator") {
    const auto net = network_from(cfg, raster, 2, {64}, seed);
    std::vector<Image> positives, negatives;
    for (const auto* split : {&train, &val}) {
      for (const auto& s : *split) positives.push_back(s.image);
    }
    std::mt19937_64 rng(seed);
    const std::size_t n = cfg.value("negatives", positives.size());
    for (std::size_t i = 0; i < n; ++i) negatives.push_back(synth::non_xray(raster.width, raster.height, rng));
    const auto result = service::train_validator(positives, negatives, net, tc);
    service::save_validator_checkpoint(out, result.network, raster);
    std::printf("model: validator\nepochs: %zu\ntrain_accuracy: %.4f\n", result.history.size(),
                result.history.empty() ? 0.0 : result.history[static_cast<std::size_t>(result.best_epoch - 1)].train_accuracy);
  } else {
    fail(ErrorCode::kInvalidArgument, "model must be screening or validator");
  }
  std::cout << "checkpoint: " << out.string() << "\n";
  return kExitOk;
}

// ---- bench ----

int cmd_bench(const Flags& flags) {
  const json cfg = read_config(flags.config);
  const std::uint64_t seed = flags.seed.value_or(cfg.value("seed", std::uint64_t{0}));
  json strategy_block = cfg.value("strategy", json{{"method", "naive"}});
  if (flags.method) {
    strategy_block = json{{"method", *flags.method}};
    if (cfg.contains("strategy") && cfg["strategy"].value("method", "") == *flags.method) strategy_block = cfg["strategy"];
  }
  if (flags.k) strategy_block["k"] = *flags.k;
  cl::StrategyConfig sc = cl::parse_strategy_config(strategy_block);
  if (!strategy_block.contains("seed")) sc.seed = seed;
  const std::size_t experiences = flags.experiences.value_or(cfg.value("experiences", bench::kDefaultExperiences));
  const service::Raster raster = raster_from(cfg);

  std::vector<bench::Experience> stream;
  std::vector<Sample> validation, test;
  if (cfg.contains("synthetic")) {
    synth::BlobStreamConfig bc;
    const json& s = cfg["synthetic"];
    bc.width = raster.width;
    bc.height = raster.height;
    bc.experiences = experiences;
    bc.train_per_experience = s.value("train_per_experience", bc.train_per_experience);
    bc.validation_per_experience = s.value("validation_per_experience", bc.validation_per_experience);
    bc.test_per_experience = s.value("test_per_experience", bc.test_per_experience);
    bc.drift_degrees = s.value("drift_degrees", bc.drift_degrees);
    bc.noise_sigma = s.value("noise_sigma", bc.noise_sigma);
    bc.seed = seed;
    auto data = synth::make_blob_stream(bc);
    stream = bench::stream_from_stages(std::move(data.experiences));
    validation = std::move(data.validation);
    test = std::move(data.test);
  } else {
    const DatasetManifest manifest = load_manifest(config_path(cfg, "manifest", flags.config));
    const auto pool = load_samples(manifest.train, raster.width, raster.height);
    validation = load_samples(manifest.validation, raster.width, raster.height);
    test = load_samples(manifest.test, raster.width, raster.height);
    stream = bench::make_stream(pool, experiences, seed);
  }
  require(!test.empty(), ErrorCode::kInvalidArgument, "benchmark needs a non-empty test set");

  const auto net_cfg = network_from(cfg, raster, kNumClasses, {128, 64}, seed);
  auto strategy = cl::make_strategy(sc, net_cfg);
  nn::Network net(net_cfg);
  bench::BenchmarkOptions opts;
  opts.seed = seed;
  opts.record_timing = cfg.value("timing", true);
  opts.context.train = train_config(cfg.value("train", json::object()));
  opts.context.train.seed = seed;
  if (cfg.value("use_validation", true)) opts.context.validation = validation;

  std::size_t largest_call = 0;
  std::set<std::string> test_ids;
  for (const auto& s : test) test_ids.insert(s.source_id);
  opts.context.audit = [&](std::span<const Sample> train) {
    largest_call = std::max(largest_call, train.size());
    for (const auto& s : train) {
      require(test_ids.count(s.source_id) == 0, ErrorCode::kContractViolation,
              "test sample " + s.source_id + " entered a training call");
    }
  };
  opts.on_experience = [&](std::size_t index, double acc) {
    std::printf("experience %zu/%zu accuracy %.2f memory %zu\n", index, stream.size(), acc,
                strategy->memory_size());
    std::fflush(stdout);
  };
  const auto report = bench::run_benchmark(*strategy, net, stream, test, opts);

  if (sc.kind == cl::StrategyKind::kGdumb) {
    require(largest_call <= *sc.capacity, ErrorCode::kContractViolation, "GDUMB trained on more than k samples");
    std::printf("capacity audit: pass (largest training call %zu <= k=%zu)\n", largest_call, *sc.capacity);
  }
  std::printf("strategy: %s\nseed: %llu\nexperiences: %zu\n", report.strategy.c_str(),
              static_cast<unsigned long long>(report.seed), report.accuracy_trace.size());
  std::printf("avg_accuracy: %.4f +- %.4f\navg_forgetting: %.4f +- %.4f\noverall_performance: %.4f\n",
              report.avg_accuracy, report.std_accuracy, report.avg_forgetting, report.std_forgetting, report.overall);
  std::printf("avg_eval_time_ms: %.4f\n", report.avg_eval_time_ms);

  std::optional<fs::path> report_path = flags.out;
  if (!report_path) report_path = optional_path(cfg, "report_path", flags.config);
  if (report_path) {
    const std::string fmt = cfg.value("format", report_path->extension() == ".json" ? "json" : "csv");
    require(fmt == "csv" || fmt == "json", ErrorCode::kInvalidArgument, "format must be csv or json");
    bench::emit_report(report, fmt == "json" ? bench::ReportFormat::kJson : bench::ReportFormat::kCsv, *report_path);
    std::cout << "report: " << report_path->string() << "\n";
  }
  return kExitOk;
}

// ---- serve ----

std::atomic<bool> g_interrupted{false};
extern "C" void on_signal(int) { g_interrupted = true; }

std::pair<std::string, int> split_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  require(colon != std::string::npos, ErrorCode::kInvalidArgument, "address must be HOST:PORT");
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidArgument, "address must be HOST:PORT");
  }
  require(port >= 0 && port <= 65535, ErrorCode::kInvalidArgument, "port out of range");
  return {addr.substr(0, colon), port};
}

service::RegistryConfig registry_config(const json& cfg, const std::optional<fs::path>& file, bool with_history) {
  service::RegistryConfig rc;
  rc.screening_checkpoint = config_path(cfg, "screening_checkpoint", file);
  rc.validator_checkpoint = config_path(cfg, "validator_checkpoint", file);
  if (with_history) rc.checkpoint_dir = config_path(cfg, "data_dir", file) / "checkpoints";
  if (cfg.contains("strategy")) rc.strategy = cl::parse_strategy_config(cfg["strategy"]);
  rc.learn = train_config(cfg.value("learn", json::object()), rc.learn);
  if (cfg.contains("preprocess")) {
    const auto s = parse_strategy(cfg["preprocess"].value("strategy", std::string("original")));
    require(s.has_value() && *s != Strategy::kSegmented, ErrorCode::kInvalidArgument,
            "service preprocessing must be original or cropped");
    rc.preprocess = {*s, cfg["preprocess"].value("equalize", false),
                     cfg["preprocess"].value("crop_fraction", kDefaultCropFraction)};
  }
  return rc;
}

int cmd_serve(const Flags& flags) {
  const json cfg = read_config(flags.config);
  const auto [host, port] = split_addr(flags.addr.value_or(cfg.value("addr", std::string("127.0.0.1:8080"))));
  service::ServiceConfig sc;
  sc.data_dir = config_path(cfg, "data_dir", flags.config);
  sc.benchmark_report = optional_path(cfg, "benchmark_report", flags.config);
  auto registry = service::ModelRegistry::open(registry_config(cfg, flags.config, true));
  service::Authenticator auth(service::UserDirectory::load(config_path(cfg, "users", flags.config)),
                              std::chrono::seconds(cfg.value("token_ttl_seconds", 8 * 3600)));
  service::ScreeningService svc(sc, std::move(registry));
  service::HttpApi api(svc, auth);
  const int bound = api.start(host, port);
  svc.start();
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << host << ":" << bound << std::endl;
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  api.stop();
  svc.stop();
  std::cout << "shutdown complete" << std::endl;
  return kExitOk;
}

// ---- classify ----

int cmd_classify(const Flags& flags) {
  const json cfg = read_config(flags.config);
  require(flags.image.has_value(), ErrorCode::kInvalidArgument, "classify needs an image path");
  const auto registry = service::ModelRegistry::open(registry_config(cfg, flags.config, false));
  const Image prepared = registry.prepare(load_image(*flags.image));
  const auto v = registry.validate_cxr(prepared);
  if (!v.valid) {
    std::cout << "rejected: not a chest X-ray\n";
    std::printf("validator_confidence: %.6f\n", v.confidence);
    return kExitRejected;
  }
  const auto p = registry.predict(prepared);
  std::cout << "label: " << label_name(p.label) << "\n";
  for (ClassLabel l : kAllLabels) std::printf("p(%s): %.6f\n", std::string(label_name(l)).c_str(), p.probabilities[ordinal(l)]);
  std::printf("validator_confidence: %.6f\n", v.confidence);
  return kExitOk;
}

// ---- checkpoint-inspect ----

int cmd_inspect(const Flags& flags) {
  require(flags.image.has_value(), ErrorCode::kInvalidArgument, "checkpoint-inspect needs a checkpoint path");
  const auto ck = nn::load_checkpoint(*flags.image);
  json header = nn::read_checkpoint_header(*flags.image);
  header["parameter_count"] = ck.network.parameters().count();
  header["checksum"] = nn::parameter_checksum(ck.network);
  std::cout << header.dump(2) << "\n";
  return kExitOk;
}

}  // namespace
}  // namespace cxrcl::tools

int main(int argc, char** argv) {
  using namespace cxrcl::tools;
  CLI::App app{"cxrcl: chest X-ray continual-learning toolkit"};
  app.require_subcommand(1);
  Flags flags;

  auto with_config = [&](CLI::App* sub) { sub->add_option("--config", flags.config, "JSON config file"); };
  auto* pre = app.add_subcommand("preprocess", "Apply a preprocessing strategy to a dataset manifest");
  with_config(pre);
  pre->add_option("--out", flags.out, "Output directory");

  auto* train = app.add_subcommand("train", "Fit a screening or validator model");
  with_config(train);
  train->add_option("--seed", flags.seed);
  train->add_option("--out", flags.out, "Checkpoint path");

  auto* bench = app.add_subcommand("bench", "Run a continual-learning benchmark");
  with_config(bench);
  bench->add_option("--seed", flags.seed);
  bench->add_option("--method", flags.method, "naive, ewc, lwf, gem or gdumb");
  bench->add_option("--k", flags.k, "Memory capacity for gem/gdumb");
  bench->add_option("--experiences", flags.experiences);
  bench->add_option("--out", flags.out, "Report path");

  auto* serve = app.add_subcommand("serve", "Run the screening service");
  with_config(serve);
  serve->add_option("--addr", flags.addr, "HOST:PORT");

  auto* classify = app.add_subcommand("classify", "Validate and classify one image offline");
  with_config(classify);
  classify->add_option("image", flags.image, "Image path")->required();

  auto* inspect = app.add_subcommand("checkpoint-inspect", "Print a checkpoint header");
  inspect->add_option("checkpoint", flags.image, "Checkpoint path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitRejected;
  }

  try {
    if (pre->parsed()) return cmd_preprocess(flags);
    if (train->parsed()) return cmd_train(flags);
    if (bench->parsed()) return cmd_bench(flags);
    if (serve->parsed()) return cmd_serve(flags);
    if (classify->parsed()) return cmd_classify(flags);
    if (inspect->parsed()) return cmd_inspect(flags);
  } catch (const cxrcl::Error& e) {
    std::cerr << "error (" << cxrcl::to_string(e.code()) << "): " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
