#include "posebench/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "posebench/confusion.hpp"
#include "posebench/error.hpp"
#include "posebench/evaluate.hpp"
#include "posebench/io.hpp"
#include "posebench/losses.hpp"
#include "posebench/plots.hpp"
#include "posebench/report.hpp"
#include "posebench/simulate.hpp"

namespace posebench {
namespace {

namespace fs = std::filesystem;

struct CommonInputs {
  std::string gt;
  std::string det;
  std::string pose_mode = "discrete";
  std::string iou_rule = "geq";
  double iou_threshold = 0.5;
  double origin_offset_deg = 0.0;
};

void add_inputs(CLI::App* cmd, CommonInputs& in) {
  cmd->add_option("--gt", in.gt, "ground-truth JSON-lines file")->required();
  cmd->add_option("--det", in.det, "detections JSON-lines file")->required();
  cmd->add_option("--pose-mode", in.pose_mode, "viewpoint rule for AVP")
      ->check(CLI::IsMember({"discrete", "continuous"}));
  cmd->add_option("--iou-rule", in.iou_rule, "overlap >= threshold or > threshold")
      ->check(CLI::IsMember({"geq", "strict"}));
  cmd->add_option("--iou-threshold", in.iou_threshold, "localization overlap threshold");
  cmd->add_option("--origin-offset-deg", in.origin_offset_deg, "center of view bin 0");
}

MatchOptions match_options(const CommonInputs& in) {
  return {in.iou_threshold, in.iou_rule == "strict" ? IouRule::kStrict : IouRule::kGreaterEqual};
}

PoseMode pose_mode(const CommonInputs& in) {
  return in.pose_mode == "continuous" ? PoseMode::kContinuous : PoseMode::kDiscrete;
}

struct Loaded {
  io::GtDataset gt;
  io::DetDataset det;
};

Loaded load_inputs(const CommonInputs& in, std::optional<io::AngleNeed> need) {
  Loaded l{io::load_gt(in.gt), io::load_det(in.det)};
  if (need) {
    io::require_angles(l.gt, *need, in.gt);
    io::require_angles(l.det, *need, in.det);
  }
  return l;
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

// Writes `svg` or `csv` depending on the extension of `out`; an SVG always
// gets its CSV twin next to it.
void write_figure(const fs::path& out, const std::string& svg, const std::string& csv,
                  std::ostream& log) {
  const std::string ext = lower_extension(out);
  if (ext == ".csv") {
    io::write_file(out, csv);
    log << "wrote " << out.string() << '\n';
  } else if (ext == ".svg") {
    fs::path twin = out;
    twin.replace_extension(".csv");
    io::write_file(out, svg);
    io::write_file(twin, csv);
    log << "wrote " << out.string() << " and " << twin.string() << '\n';
  } else {
    throw ValidationError("--out must end in .svg or .csv: " + out.string());
  }
}

int run_eval(const CommonInputs& in, const std::vector<int>& views,
             const std::vector<std::string>& metrics, const std::string& interp,
             const std::string& out_path, std::ostream& out) {
  EvalConfig config;
  config.views = views;
  config.pose_mode = pose_mode(in);
  config.matching = match_options(in);
  config.interpolation =
      interp == "11point" ? ApInterpolation::kElevenPoint : ApInterpolation::kAllPoint;
  config.origin_offset = Angle::from_degrees(in.origin_offset_deg);
  config.metrics = {false, false, false, false};
  for (const std::string& m : metrics) {
    if (m == "ap") config.metrics.ap = true;
    else if (m == "avp") config.metrics.avp = true;
    else if (m == "aos") config.metrics.aos = true;
    else if (m == "avp3d") config.metrics.avp3d = true;
    else throw ValidationError("unknown metric: " + m);
  }

  std::optional<io::AngleNeed> need;
  if (config.metrics.avp || config.metrics.aos) need = io::AngleNeed::kAzimuth;
  if (config.metrics.avp3d) need = io::AngleNeed::kAllAngles;
  const Loaded data = load_inputs(in, need);
  const auto gts = io::objects(data.gt);
  const auto dets = io::detections(data.det);

  const EvalReport report = evaluate(dets, gts, config);
  const std::vector<InputDigest> digests = {{"gt", in.gt, io::sha256_file(in.gt)},
                                            {"det", in.det, io::sha256_file(in.det)}};
  const std::string text = render_report(report, config, digests);
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    io::write_file(out_path, text);
    out << "wrote " << out_path << '\n';
  }
  return kExitOk;
}

int run_curves(const CommonInputs& in, const std::string& class_name, const std::string& metric,
               int views, const std::string& out_path, std::ostream& out) {
  const Loaded data = load_inputs(in, io::AngleNeed::kAzimuth);
  const auto gts = io::objects(data.gt);
  const auto dets = io::detections(data.det);
  const MatchTable table = match(dets, gts, class_name, match_options(in));
  if (table.n_gt == 0 && table.entries.empty()) {
    throw ValidationError("class '" + class_name + "' does not occur in the inputs");
  }

  std::vector<CurveSeries> series;
  series.push_back({"AP", precision_recall(table, table.n_gt)});
  if (metric == "avp") {
    const PoseRule rule =
        make_view_rule(pose_mode(in), views, Angle::from_degrees(in.origin_offset_deg));
    series.push_back({fmt::format("AVP{}", views), precision_recall(table, table.n_gt, &rule)});
  } else {
    series.push_back({"AOS", orientation_similarity_curve(table, table.n_gt)});
  }
  write_figure(out_path, curves_svg(series, class_name), curves_csv(series), out);
  return kExitOk;
}

int run_confusion(const CommonInputs& in, int views, const std::string& out_path,
                  std::ostream& out) {
  const Loaded data = load_inputs(in, io::AngleNeed::kAzimuth);
  const auto gts = io::objects(data.gt);
  const auto dets = io::detections(data.det);
  const ConfusionBreakdown b = breakdown(
      dets, gts, ViewBinning(views, Angle::from_degrees(in.origin_offset_deg)), match_options(in));
  write_figure(out_path, confusion_svg(b), confusion_csv(b), out);
  return kExitOk;
}

int run_losscheck(const std::string& loss, int trials, double step, double delta,
                  const std::string& huber_mode, std::uint64_t seed, std::ostream& out) {
  LossCheckOptions o;
  o.loss = parse_checked_loss(loss);
  o.trials = trials;
  o.step = step;
  o.huber = {delta, huber_mode == "norm" ? HuberMode::kNorm : HuberMode::kComponentwise};
  o.seed = seed;
  if (!(delta > 0.0)) throw ValidationError("--delta must be positive");
  const LossCheckSummary s = run_loss_check(o);
  constexpr double kTolerance = 1e-5;
  const bool pass = s.max_relative_error < kTolerance;
  out << fmt::format("loss={} trials={} step={} max_relative_error={:.3e} worst_trial={} {}\n",
                     to_string(o.loss), s.trials, o.step, s.max_relative_error, s.worst_trial,
                     pass ? "PASS" : "FAIL");
  return pass ? kExitOk : kExitValidation;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("POSEBENCH_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const std::string s(raw);
    if (s.front() == '-') throw std::invalid_argument("negative");
    const std::uint64_t v = std::stoull(s, &used, 0);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string("POSEBENCH_SEED is not an unsigned integer: ") + raw);
  }
}

int run_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                 const std::string& out_gt, const std::string& out_det, std::ostream& out) {
  ScenarioConfig config = io::load_scenario(scenario_path);
  if (seed) {
    config.seed = *seed;
  } else if (auto env = env_seed()) {
    config.seed = *env;
  }
  const SimulatedData data = generate(config);

  io::Json meta = {{"generator", "posebench simulate"},
                   {"version", POSEBENCH_VERSION},
                   {"rng", Rng::kAlgorithm},
                   {"distributions", Rng::kDistributions},
                   {"seed", config.seed},
                   {"scenario", io::scenario_to_json(config)}};
  io::GtDataset gt;
  meta["kind"] = "gt";
  gt.meta = meta;
  for (const auto& g : data.gts) gt.records.push_back(io::make_record(g));
  io::DetDataset det;
  meta["kind"] = "det";
  det.meta = meta;
  for (const auto& d : data.dets) det.records.push_back(io::make_record(d));

  io::save_gt(out_gt, gt);
  io::save_det(out_det, det);
  out << fmt::format("wrote {} ground-truth objects to {} and {} detections to {}\n",
                     gt.records.size(), out_gt, det.records.size(), out_det);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint detection and viewpoint evaluation toolkit", "posebench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", POSEBENCH_VERSION);

  CommonInputs eval_in;
  std::vector<int> eval_views{4, 8, 16, 24};
  std::vector<std::string> eval_metrics{"ap", "avp", "aos"};
  std::string eval_interp = "allpoint";
  std::string eval_out;
  auto* eval = app.add_subcommand("eval", "compute AP / AVP / AOS / geodesic AVP report");
  add_inputs(eval, eval_in);
  eval->add_option("--views", eval_views, "comma-separated view counts")->delimiter(',');
  eval->add_option("--metrics", eval_metrics, "subset of ap,avp,aos,avp3d")
      ->delimiter(',')
      ->check(CLI::IsMember({"ap", "avp", "aos", "avp3d"}));
  eval->add_option("--ap-interp", eval_interp, "precision envelope integration")
      ->check(CLI::IsMember({"allpoint", "11point"}));
  eval->add_option("--out", eval_out, "report path (stdout when omitted)");

  CommonInputs curves_in;
  std::string curves_class, curves_metric = "avp", curves_out;
  int curves_views = 8;
  auto* curves = app.add_subcommand("curves", "precision-recall curves for one class");
  add_inputs(curves, curves_in);
  curves->add_option("--class", curves_class, "class name")->required();
  curves->add_option("--metric", curves_metric, "avp or aos")
      ->check(CLI::IsMember({"avp", "aos"}));
  curves->add_option("--views", curves_views, "view count for AVP")->check(CLI::PositiveNumber);
  curves->add_option("--out", curves_out, "output .svg or .csv")->required();

  CommonInputs conf_in;
  int conf_views = 8;
  std::string conf_out;
  auto* conf = app.add_subcommand("confusion", "correct / nearby / opposite / other breakdown");
  add_inputs(conf, conf_in);
  conf->add_option("--views", conf_views, "analysis binning")->check(CLI::PositiveNumber);
  conf->add_option("--out", conf_out, "output .svg or .csv")->required();

  std::string lc_loss = "euclidean", lc_huber_mode = "componentwise";
  int lc_trials = 100;
  double lc_step = 1e-6, lc_delta = 1.0;
  std::uint64_t lc_seed = 0x5eed;
  auto* lc = app.add_subcommand("losscheck", "finite-difference gradient check");
  lc->add_option("--loss", lc_loss, "loss to check")
      ->check(CLI::IsMember({"xent", "euclidean", "huber", "cyclic", "class_xent", "bbox"}));
  lc->add_option("--trials", lc_trials, "random evaluation points")->check(CLI::PositiveNumber);
  lc->add_option("--step", lc_step, "central-difference step")->check(CLI::PositiveNumber);
  lc->add_option("--delta", lc_delta, "Huber threshold");
  lc->add_option("--huber-mode", lc_huber_mode, "componentwise or norm")
      ->check(CLI::IsMember({"componentwise", "norm"}));
  lc->add_option("--seed", lc_seed, "sampling seed");

  std::string sim_scenario, sim_gt, sim_det;
  std::optional<std::uint64_t> sim_seed;
  auto* sim = app.add_subcommand("simulate", "generate synthetic GT and detections");
  sim->add_option("--scenario", sim_scenario, "scenario JSON file")->required();
  sim->add_option("--seed", sim_seed, "overrides POSEBENCH_SEED and the scenario seed");
  sim->add_option("--out-gt", sim_gt, "ground-truth output")->required();
  sim->add_option("--out-det", sim_det, "detection output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*eval) return run_eval(eval_in, eval_views, eval_metrics, eval_interp, eval_out, out);
    if (*curves) {
      return run_curves(curves_in, curves_class, curves_metric, curves_views, curves_out, out);
    }
    if (*conf) return run_confusion(conf_in, conf_views, conf_out, out);
    if (*lc) return run_losscheck(lc_loss, lc_trials, lc_step, lc_delta, lc_huber_mode, lc_seed, out);
    if (*sim) return run_simulate(sim_scenario, sim_seed, sim_gt, sim_det, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace posebench
