// Command-line front end: calibrate single pairs, run benchmark suites,
// generate synthetic datasets, and classify pair difficulty.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 calibration failure.
// Progress goes to standard error; results are written only to files.
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "v2icalib/data_io.hpp"
#include "v2icalib/errors.hpp"
#include "v2icalib/evaluation.hpp"
#include "v2icalib/pipeline.hpp"

namespace {

using namespace v2icalib;
namespace fs = std::filesystem;

bool g_quiet = false;

std::ostream& progress() {
  static std::ostream null_stream(nullptr);
  return g_quiet ? null_stream : std::cerr;
}

std::string format_double(double value) {
  std::array<char, 32> buf;
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

StrategyConfig resolve_strategy(const std::string& name) {
  if (name == "v1" || name == "v2" || name == "v3")
    return strategy_preset(name);
  if (fs::exists(name)) return load_strategy(name);
  throw ParseError("unknown strategy '" + name +
                   "' (expected v1, v2, v3, or a strategy file path)");
}

struct CalibrateArgs {
  std::string infra, veh, out, strategy = "v1";
  std::string gt, merged_ply;
  bool stable_output = false;
};

int run_calibrate(const CalibrateArgs& args) {
  const Scene inf = load_scene(args.infra);
  const Scene veh = load_scene(args.veh);
  const StrategyConfig config = resolve_strategy(args.strategy);

  const CalibrationResult result = calibrate(inf, veh, config);
  std::optional<RigidTransform> gt;
  if (!args.gt.empty()) gt = load_extrinsic(args.gt);

  export_result(result, args.out, gt, args.stable_output);
  if (!args.merged_ply.empty() && result.status == CalibrationStatus::kOk)
    export_merged_geometry(result, inf, veh, args.merged_ply);

  progress() << "calibrate: status " << to_string(result.status) << ", "
             << result.matches.pairs.size() << " matches, scene oIoU "
             << result.scene_oiou << "\n";
  return result.status == CalibrationStatus::kOk ? 0 : 2;
}

struct BenchmarkArgs {
  std::string dataset, report, strategy = "v1";
  int jobs = 1;
  double success_threshold = 2.0;
  bool stable_output = false;
};

int run_benchmark_cmd(const BenchmarkArgs& args) {
  const auto records = load_dataset(args.dataset);
  const StrategyConfig config = resolve_strategy(args.strategy);
  progress() << "benchmark: " << records.size() << " pairs, strategy "
             << args.strategy << ", jobs " << args.jobs << "\n";

  const BenchmarkReport report =
      run_benchmark(records, config, args.jobs, args.success_threshold);
  export_report(report, args.report, args.stable_output);

  for (const GroupAggregate& g : report.groups) {
    progress() << "  " << g.name << ": " << g.frames << " frames, success "
               << g.success_rate_pct << "%";
    if (g.mean_rte_m) progress() << ", mean RTE " << *g.mean_rte_m << " m";
    if (g.mean_rre_deg)
      progress() << ", mean RRE " << *g.mean_rre_deg << " deg";
    progress() << "\n";
  }
  return 0;
}

struct SynthArgs {
  std::string params_file, out;
  int count = 1;
  SynthParams params;
  std::vector<double> sweep_noise_center;
  // Inline values land here; only flags the user passed override the file.
  CLI::App* cmd = nullptr;
};

int run_synth(const SynthArgs& args) {
  SynthParams params = args.params;
  if (!args.params_file.empty()) {
    params = load_synth_params(args.params_file);
    // Explicit inline flags win over the params file.
    const auto passed = [&](const char* flag) {
      return args.cmd->count(flag) > 0;
    };
    if (passed("--seed")) params.seed = args.params.seed;
    if (passed("--n-common")) params.n_common = args.params.n_common;
    if (passed("--n-infra-only"))
      params.n_infra_only = args.params.n_infra_only;
    if (passed("--n-vehicle-only"))
      params.n_vehicle_only = args.params.n_vehicle_only;
    if (passed("--area")) params.area = args.params.area;
    if (passed("--gt-yaw-range")) params.gt_yaw_range = args.params.gt_yaw_range;
    if (passed("--gt-translation-range"))
      params.gt_translation_range = args.params.gt_translation_range;
    if (passed("--noise-center-sigma"))
      params.noise_center_sigma = args.params.noise_center_sigma;
    if (passed("--noise-yaw-sigma"))
      params.noise_yaw_sigma = args.params.noise_yaw_sigma;
    if (passed("--noise-size-sigma"))
      params.noise_size_sigma = args.params.noise_size_sigma;
  }

  if (args.sweep_noise_center.empty()) {
    save_dataset(synth_dataset(params, args.count), args.out, params);
    progress() << "synth: wrote " << args.count << " pairs to " << args.out
               << "\n";
    return 0;
  }
  for (const double sigma : args.sweep_noise_center) {
    SynthParams swept = params;
    swept.noise_center_sigma = sigma;
    const fs::path dir =
        fs::path(args.out) / ("noise_center_" + format_double(sigma));
    save_dataset(synth_dataset(swept, args.count), dir, swept);
    progress() << "synth: wrote " << args.count << " pairs to "
               << dir.string() << "\n";
  }
  return 0;
}

struct ClassifyArgs {
  std::string dataset, out;
};

int run_classify(const ClassifyArgs& args) {
  const auto records = load_dataset(args.dataset);
  nlohmann::ordered_json doc;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  int easy = 0;
  int hard = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Difficulty d = classify_difficulty(records[i]);
    (d == Difficulty::kEasy ? easy : hard)++;
    pairs.push_back({{"index", i}, {"difficulty", std::string(to_string(d))}});
  }
  doc["pairs"] = std::move(pairs);
  doc["counts"] = {{"easy", easy}, {"hard", hard}};

  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw IoError("cannot open " + args.out + " for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + args.out);

  progress() << "classify: " << easy << " easy, " << hard << " hard\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR extrinsic calibration from cooperative 3D detections"};
  app.require_subcommand(1);
  app.add_flag("--quiet", g_quiet, "suppress progress output");

  CalibrateArgs cal;
  CLI::App* cal_cmd =
      app.add_subcommand("calibrate", "calibrate one infra/vehicle pair");
  cal_cmd->add_option("--infra", cal.infra, "infrastructure scene JSON")
      ->required();
  cal_cmd->add_option("--veh", cal.veh, "vehicle scene JSON")->required();
  cal_cmd->add_option("--gt", cal.gt,
                      "ground-truth extrinsic for error reporting");
  cal_cmd->add_option("--strategy", cal.strategy,
                      "v1 | v2 | v3 | strategy file path");
  cal_cmd->add_option("--out", cal.out, "result JSON path")->required();
  cal_cmd->add_option("--merged-ply", cal.merged_ply,
                      "also export merged box geometry as PLY");
  cal_cmd->add_flag("--stable-output", cal.stable_output,
                    "zero wall-clock fields in the result file");

  BenchmarkArgs bench;
  CLI::App* bench_cmd =
      app.add_subcommand("benchmark", "run a dataset and write a report");
  bench_cmd->add_option("--dataset", bench.dataset,
                        "dataset directory or manifest path")
      ->required();
  bench_cmd->add_option("--strategy", bench.strategy,
                        "v1 | v2 | v3 | strategy file path");
  bench_cmd->add_option("--report", bench.report, "report JSON path")
      ->required();
  bench_cmd->add_option("--jobs", bench.jobs, "worker threads")
      ->envname("V2ICALIB_JOBS")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--success-threshold", bench.success_threshold,
                        "RTE success threshold in meters");
  bench_cmd->add_flag("--stable-output", bench.stable_output,
                      "zero wall-clock fields in the report");

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic dataset");
  synth.cmd = synth_cmd;
  synth_cmd->add_option("--params", synth.params_file,
                        "SynthParams JSON file (inline flags override)");
  synth_cmd->add_option("--n", synth.count, "number of frame pairs")
      ->required()
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--out", synth.out, "output dataset directory")
      ->required();
  synth_cmd->add_option("--seed", synth.params.seed, "base RNG seed");
  synth_cmd->add_option("--n-common", synth.params.n_common,
                        "objects visible from both ends");
  synth_cmd->add_option("--n-infra-only", synth.params.n_infra_only,
                        "objects only the infrastructure sees");
  synth_cmd->add_option("--n-vehicle-only", synth.params.n_vehicle_only,
                        "objects only the vehicle sees");
  synth_cmd->add_option("--area", synth.params.area,
                        "placement square side, meters");
  synth_cmd->add_option("--gt-yaw-range", synth.params.gt_yaw_range,
                        "max |yaw| of the random ground truth, radians");
  synth_cmd->add_option("--gt-translation-range",
                        synth.params.gt_translation_range,
                        "max ground-truth translation, meters");
  synth_cmd->add_option("--noise-center-sigma",
                        synth.params.noise_center_sigma,
                        "vehicle-side center noise sigma, meters");
  synth_cmd->add_option("--noise-yaw-sigma", synth.params.noise_yaw_sigma,
                        "vehicle-side yaw noise sigma, radians");
  synth_cmd->add_option("--noise-size-sigma", synth.params.noise_size_sigma,
                        "vehicle-side size noise sigma, meters");
  synth_cmd->add_option("--sweep-noise-center", synth.sweep_noise_center,
                        "generate one sub-directory per center-noise sigma");

  ClassifyArgs cls;
  CLI::App* cls_cmd =
      app.add_subcommand("classify", "label dataset pairs easy/hard");
  cls_cmd->add_option("--dataset", cls.dataset,
                      "dataset directory or manifest path")
      ->required();
  cls_cmd->add_option("--out", cls.out, "labels JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(cal_cmd)) return run_calibrate(cal);
    if (app.got_subcommand(bench_cmd)) return run_benchmark_cmd(bench);
    if (app.got_subcommand(synth_cmd)) return run_synth(synth);
    if (app.got_subcommand(cls_cmd)) return run_classify(cls);
  } catch (const CalibError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
