// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <bit>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "posebench/confusion.hpp"
#include "posebench/evaluate.hpp"
#include "posebench/io.hpp"
#include "posebench/losses.hpp"
#include "posebench/simulate.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace posebench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

constexpr int kViews[] = {4, 8, 16, 24};

Outcome gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_name;
  for (CheckedLoss loss : {CheckedLoss::kXent, CheckedLoss::kEuclidean, CheckedLoss::kHuber,
                           CheckedLoss::kCyclicCosine, CheckedLoss::kClassXent,
                           CheckedLoss::kBbox}) {
    LossCheckOptions o;
    o.loss = loss;
    o.trials = 100;
    o.step = 1e-6;
    const LossCheckSummary s = run_loss_check(o);
    if (s.max_relative_error >= worst) {
      worst = s.max_relative_error;
      worst_name = to_string(loss);
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-5 && secs < 5.0,
          fmt::format("gradient suite, 6 losses x 100 points: max relative error {:.2e} ({}), "
                      "{:.2f} s",
                      worst, worst_name, secs)};
}

oracle::Rule oracle_rule(oracle::RuleKind kind, int views) {
  oracle::Rule r;
  r.kind = kind;
  r.views = views;
  return r;
}

Outcome metric_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(2024);
  std::size_t comparisons = 0, mismatches = 0, partial = 0;
  double worst = 0.0;
  auto compare = [&](double got, double want) {
    ++comparisons;
    const double err = std::abs(got - want);
    worst = std::max(worst, err);
    if (!(err <= 1e-9)) ++mismatches;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const testkit::Instance inst = testkit::random_instance(gen);
    const MatchTable t = match(inst.dets, inst.gts, "car");
    if (const double a = ap(t, t.n_gt); a > 0.0 && a < 1.0) ++partial;
    const oracle::Rule none;
    auto area = [&](const oracle::Rule& rule, oracle::Measure m) {
      return oracle::all_point_area(
          oracle::enumerate_thresholds(inst.dets, inst.gts, "car", 0.5, false, rule, m));
    };
    compare(ap(t, t.n_gt), area(none, oracle::Measure::kPrecision));
    compare(aos(t, t.n_gt), area(none, oracle::Measure::kOrientation));
    for (int v : kViews) {
      compare(avp(t, t.n_gt, DiscreteRule{ViewBinning(v)}),
              area(oracle_rule(oracle::RuleKind::kDiscrete, v), oracle::Measure::kPrecision));
      compare(avp(t, t.n_gt, ContinuousRule{v}),
              area(oracle_rule(oracle::RuleKind::kContinuous, v), oracle::Measure::kPrecision));
    }
    compare(avp(t, t.n_gt, GeodesicRule{}),
            area(oracle_rule(oracle::RuleKind::kGeodesic, 0), oracle::Measure::kPrecision));
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 30.0,
          fmt::format("metric oracle, 1000 instances ({} with 0 < AP < 1): {} comparisons, {} "
                      "beyond 1e-9 (max deviation {:.1e}), {:.2f} s",
                      partial, comparisons, mismatches, worst, secs)};
}

Outcome ordering_invariants() {
  std::mt19937_64 gen(3033);
  constexpr double kSlack = 1e-12;  // summation-order noise only
  std::size_t avp_over_ap = 0, aos_over_ap = 0, nest_4_8 = 0, nest_8_16 = 0, nest_8_24 = 0,
              continuous = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const testkit::Instance inst = testkit::random_instance(gen);
    const MatchTable t = match(inst.dets, inst.gts, "car");
    const double a = ap(t, t.n_gt);
    std::map<int, double> disc, cont;
    for (int v : kViews) {
      disc[v] = avp(t, t.n_gt, DiscreteRule{ViewBinning(v)});
      cont[v] = avp(t, t.n_gt, ContinuousRule{v});
      if (disc[v] > a + kSlack || cont[v] > a + kSlack) ++avp_over_ap;
    }
    if (aos(t, t.n_gt) > a + kSlack) ++aos_over_ap;
    if (disc[8] > disc[4] + kSlack) ++nest_4_8;
    if (disc[16] > disc[8] + kSlack) ++nest_8_16;
    if (disc[24] > disc[8] + kSlack) ++nest_8_24;
    if (cont[8] > cont[4] + kSlack || cont[16] > cont[8] + kSlack ||
        cont[24] > cont[16] + kSlack) {
      ++continuous;
    }
  }
  const std::size_t total =
      avp_over_ap + aos_over_ap + nest_4_8 + nest_8_16 + nest_8_24 + continuous;
  return {total == 0,
          fmt::format("ordering invariants, 1000 instances: violations AVP<=AP {}, AOS<=AP {}, "
                      "AVP4>=AVP8 {}, AVP8>=AVP16 {}, AVP8>=AVP24 {}, continuous monotone {}",
                      avp_over_ap, aos_over_ap, nest_4_8, nest_8_16, nest_8_24, continuous)};
}

Outcome geodesic() {
  std::mt19937_64 gen(4044);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, kPi);
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a[3] = {n(gen), n(gen), n(gen)}, b[3] = {n(gen), n(gen), n(gen)};
    const double ta = u(gen), tb = u(gen);
    const double got = geodesic_distance(Rotation::from_axis_angle({a[0], a[1], a[2]}, ta),
                                         Rotation::from_axis_angle({b[0], b[1], b[2]}, tb));
    const double want = oracle::relative_angle(oracle::axis_angle_quat(a[0], a[1], a[2], ta),
                                               oracle::axis_angle_quat(b[0], b[1], b[2], tb));
    worst = std::max(worst, std::abs(got - want));
    if (!(std::abs(got - want) <= 1e-9)) ++mismatches;
  }
  // Boundary: a pose whose distance equals the threshold is not correct.
  const Pose off30{Angle::from_degrees(30.0), Angle(), Angle()};
  const double d = geodesic_distance(rotation_from_pose(off30), rotation_from_pose({}));
  const bool strict_at_threshold = !pose_correct_geodesic(off30, {}, d);
  const bool thirty_degrees = !pose_correct_geodesic(off30, {});
  return {mismatches == 0 && strict_at_threshold && thirty_degrees,
          fmt::format("geodesic vs quaternion oracle, 1000 pairs: {} beyond 1e-9 (max {:.1e}); "
                      "strict at d = threshold: {}; 30 deg azimuth off is wrong: {}",
                      mismatches, worst, strict_at_threshold, thirty_degrees)};
}

Outcome paired_scenario() {
  const PairedScenario p = scenario_discrete_vs_continuous(42);
  EvalConfig config;
  const EvalReport disc = evaluate(p.discrete_like, p.gts, config);
  const EvalReport cont = evaluate(p.continuous_like, p.gts, config);
  bool avp_ok = true;
  std::string avp_text;
  for (int v : kViews) {
    avp_ok = avp_ok && disc.mean_avp.at(v) > cont.mean_avp.at(v);
    avp_text += fmt::format(" AVP{} {:.3f}/{:.3f}", v, disc.mean_avp.at(v), cont.mean_avp.at(v));
  }
  const bool aos_ok = *cont.mean_aos > *disc.mean_aos;
  return {avp_ok && aos_ok,
          fmt::format("paired scenario seed 42 (discrete-like/continuous-like):{} AOS "
                      "{:.3f}/{:.3f}",
                      avp_text, *disc.mean_aos, *cont.mean_aos)};
}

Outcome confusion_reproduction() {
  ScenarioConfig c;
  c.n_images = 1500;
  c.min_objects = 1;
  c.max_objects = 3;
  c.classes = {"car"};
  c.seed = 6066;

  c.pose_error = OppositeFlip{0.3, 0.0};
  const SimulatedData flip = generate(c);
  const ConfusionBreakdown fb = breakdown(flip.dets, flip.gts, ViewBinning(8));
  const std::size_t n_flip = fb.overall.total();
  const double opposite = fb.overall.fraction(ErrorCategory::kOpposite);
  const bool flip_ok = n_flip >= 2000 && std::abs(opposite - 0.3) <= 0.05;

  const BiasAttractor bias{Angle(), 0.2, 22.0 * kPi / 180.0};
  c.pose_error = bias;
  const SimulatedData attracted = generate(c);
  const ViewBinning eight(8);
  const int bias_bin = eight.bin_of(bias.bias);
  std::size_t errors = 0, concentrated = 0, in_bias_bin = 0, tps = 0;
  double baseline = 0.0;
  const MatchTable t = match(attracted.dets, attracted.gts, "car");
  for (const MatchEntry& e : t.entries) {
    if (e.status != MatchStatus::kTruePositive) continue;
    ++tps;
    const int pb = eight.bin_of(e.det_pose.azimuth), gb = eight.bin_of(e.gt_pose->azimuth);
    if (pb == bias_bin) ++in_bias_bin;
    const ErrorCategory cat = classify_error(e.det_pose.azimuth, e.gt_pose->azimuth, eight);
    if (cat == ErrorCategory::kCorrect) continue;
    ++errors;
    if (cat == ErrorCategory::kNearby || pb == bias_bin) ++concentrated;
    // A uniformly random wrong bin hits the target set {gb-1, gb+1, bias}
    // minus gb with this probability.
    std::set<int> targets = {(gb + 1) % 8, (gb + 7) % 8, bias_bin};
    targets.erase(gb);
    baseline += static_cast<double>(targets.size()) / 7.0;
  }
  const double share = errors ? static_cast<double>(concentrated) / errors : 0.0;
  const double base = errors ? baseline / errors : 1.0;
  const double bias_share = tps ? static_cast<double>(in_bias_bin) / tps : 0.0;
  const bool bias_ok = share > base && bias_share > 1.0 / 8.0;
  return {flip_ok && bias_ok,
          fmt::format("confusion: opposite_flip(0.3) opposite fraction {:.4f} over {} TPs; "
                      "bias_attractor nearby+bias share of errors {:.3f} vs uniform {:.3f}, "
                      "predictions in bias sector {:.3f} vs 0.125",
                      opposite, n_flip, share, base, bias_share)};
}

Outcome masking_contract() {
  std::mt19937_64 gen(7077);
  std::normal_distribution<double> n(0.0, 4.0);
  std::size_t nonzero = 0, checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int classes = 1 + trial % 12;
    const int fg = static_cast<int>(gen() % static_cast<std::uint64_t>(classes));
    std::vector<double> v(kAzimuthBins * static_cast<std::size_t>(classes));
    for (double& x : v) x = n(gen);
    const LossResult r = masked_softmax_xent(PoseLogits(v, fg),
                                             PoseLabel::discrete(static_cast<int>(gen() % 360), fg));
    for (std::size_t i = 0; i < r.grad.size(); ++i) {
      if (static_cast<int>(i / kAzimuthBins) == fg) continue;
      ++checked;
      if (std::bit_cast<std::uint64_t>(r.grad[i]) != 0) ++nonzero;
    }
  }
  return {nonzero == 0 && checked > 0,
          fmt::format("masking: {} off-block gradient entries checked, {} not bitwise +0.0",
                      checked, nonzero)};
}

Outcome end_to_end(const std::string& tool, const std::string& fixtures) {
  const fs::path dir = fs::temp_directory_path() / "posebench_acceptance";
  fs::create_directories(dir);
  std::vector<std::string> reports;
  for (const char* name : {"run1.json", "run2.json"}) {
    const std::string out = (dir / name).string();
    const std::string cmd = fmt::format(
        "\"{}\" eval --gt \"{}/zero_noise_gt.jsonl\" --det \"{}/zero_noise_det.jsonl\" "
        "--views 4,8,16,24 --metrics ap,avp,aos,avp3d --out \"{}\" > /dev/null",
        tool, fixtures, fixtures, out);
    if (std::system(cmd.c_str()) != 0) {
      return {false, "end-to-end: eval exited nonzero"};
    }
    reports.push_back(io::read_file(out));
  }
  fs::remove_all(dir);
  const io::Json doc = io::Json::parse(reports[0]);
  std::size_t values = 0, not_one = 0;
  auto check = [&](const io::Json& j) {
    ++values;
    if (j.get<double>() != 1.0) ++not_one;
  };
  for (const io::Json& row : doc["classes"]) {
    check(row["ap"]);
    check(row["aos"]);
    check(row["avp3d"]);
    for (const auto& [k, v] : row["avp"].items()) check(v);
  }
  check(doc["means"]["map"]);
  check(doc["means"]["maos"]);
  check(doc["means"]["mavp3d"]);
  for (const auto& [k, v] : doc["means"]["mavp"].items()) check(v);
  const bool identical = reports[0] == reports[1];
  return {identical && not_one == 0 && values > 0,
          fmt::format("end-to-end eval on zero-noise fixture: {} metric values, {} not 1.0; "
                      "reports byte-identical: {}",
                      values, not_one, identical)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: posebench_acceptance <posebench-binary> <fixture-dir>\n";
    return 2;
  }
  const std::vector<std::function<Outcome()>> criteria = {
      gradient_suite,
      metric_oracle,
      ordering_invariants,
      geodesic,
      paired_scenario,
      confusion_reproduction,
      masking_contract,
      [&] { return end_to_end(argv[1], argv[2]); },
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << o.detail
              << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failures,
                           criteria.size());
  return failures == 0 ? 0 : 1;
}
