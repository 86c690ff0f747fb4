#include "posebench/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "posebench/error.hpp"

namespace posebench {

PoseRule make_view_rule(PoseMode mode, int views, Angle origin_offset) {
  if (mode == PoseMode::kDiscrete) return DiscreteRule{ViewBinning(views, origin_offset)};
  if (views < 1) throw ValidationError("number of views must be >= 1");
  return ContinuousRule{views};
}

std::vector<std::string> class_names(std::span<const Detection> dets,
                                     std::span<const GroundTruthObject> gts) {
  std::set<std::string> names;
  for (const auto& g : gts) names.insert(g.class_name);
  for (const auto& d : dets) names.insert(d.class_name);
  return {names.begin(), names.end()};
}

ClassReport evaluate_class(const MatchTable& table, std::size_t n_det, const EvalConfig& config) {
  ClassReport row;
  row.class_name = table.class_name;
  row.n_gt = table.n_gt;
  row.n_det = n_det;
  row.tp = table.true_positives();
  row.fp = table.false_positives();
  row.ignored = table.ignored();
  row.evaluated = table.n_gt > 0;

  const auto interp = config.interpolation;
  if (config.metrics.ap) row.ap = ap(table, table.n_gt, interp);
  if (config.metrics.avp) {
    for (int v : config.views) {
      row.avp[v] = avp(table, table.n_gt, make_view_rule(config.pose_mode, v, config.origin_offset),
                       interp);
    }
  }
  if (config.metrics.aos) row.aos = aos(table, table.n_gt, interp);
  if (config.metrics.avp3d) {
    row.avp3d = avp(table, table.n_gt, GeodesicRule{config.geodesic_threshold}, interp);
  }
  return row;
}

namespace {

struct MeanAccumulator {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double value() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
};

struct Means {
  std::optional<double> ap, aos, avp3d;
  std::map<int, double> avp;
};

Means compute_means(const std::vector<ClassReport>& classes, const EvalConfig& config) {
  MeanAccumulator ap_acc, aos_acc, avp3d_acc;
  std::map<int, MeanAccumulator> avp_acc;
  if (config.metrics.avp) {
    for (int v : config.views) avp_acc[v];
  }
  for (const ClassReport& c : classes) {
    if (!c.evaluated) continue;
    if (c.ap) ap_acc.add(*c.ap);
    if (c.aos) aos_acc.add(*c.aos);
    if (c.avp3d) avp3d_acc.add(*c.avp3d);
    for (const auto& [v, value] : c.avp) avp_acc[v].add(value);
  }
  Means m;
  if (config.metrics.ap) m.ap = ap_acc.value();
  if (config.metrics.aos) m.aos = aos_acc.value();
  if (config.metrics.avp3d) m.avp3d = avp3d_acc.value();
  for (const auto& [v, acc] : avp_acc) m.avp[v] = acc.value();
  return m;
}

}  // namespace

EvalReport evaluate(std::span<const Detection> dets, std::span<const GroundTruthObject> gts,
                    const EvalConfig& config) {
  if (config.metrics.avp && config.views.empty()) {
    throw ValidationError("AVP requested without any view counts");
  }
  for (int v : config.views) {
    if (v < 1) throw ValidationError("number of views must be >= 1, got " + std::to_string(v));
  }

  EvalReport report;
  for (const std::string& name : class_names(dets, gts)) {
    const MatchTable table = match(dets, gts, name, config.matching);
    const auto n_det = static_cast<std::size_t>(std::count_if(
        dets.begin(), dets.end(), [&](const Detection& d) { return d.class_name == name; }));
    report.classes.push_back(evaluate_class(table, n_det, config));
  }
  const Means m = compute_means(report.classes, config);
  report.mean_ap = m.ap;
  report.mean_aos = m.aos;
  report.mean_avp3d = m.avp3d;
  report.mean_avp = m.avp;
  report.evaluated_classes = static_cast<std::size_t>(std::count_if(
      report.classes.begin(), report.classes.end(), [](const auto& c) { return c.evaluated; }));
  return report;
}

void check_report_consistency(const EvalReport& report) {
  auto check = [&](const std::optional<double>& stored, auto value_of, const std::string& what) {
    MeanAccumulator acc;
    bool any = false;
    for (const ClassReport& c : report.classes) {
      const std::optional<double> v = value_of(c);
      any |= v.has_value();
      if (c.evaluated && v) acc.add(*v);
    }
    if (!stored) {
      if (any) throw InvariantViolation("per-class " + what + " present without its mean");
      return;
    }
    if (*stored != acc.value()) {
      throw InvariantViolation("mean " + what + " does not match the per-class values");
    }
  };
  check(report.mean_ap, [](const ClassReport& c) { return c.ap; }, "AP");
  check(report.mean_aos, [](const ClassReport& c) { return c.aos; }, "AOS");
  check(report.mean_avp3d, [](const ClassReport& c) { return c.avp3d; }, "geodesic AVP");
  for (const auto& [v, stored] : report.mean_avp) {
    check(stored, [v = v](const ClassReport& c) -> std::optional<double> {
      auto it = c.avp.find(v);
      return it == c.avp.end() ? std::nullopt : std::optional<double>(it->second);
    }, "AVP@" + std::to_string(v));
  }
  for (const ClassReport& c : report.classes) {
    for (const auto& [v, _] : c.avp) {
      if (!report.mean_avp.contains(v)) {
        throw InvariantViolation("per-class AVP@" + std::to_string(v) + " present without its mean");
      }
    }
    auto in_unit = [](const std::optional<double>& x) { return !x || (*x >= 0.0 && *x <= 1.0); };
    bool ok = in_unit(c.ap) && in_unit(c.aos) && in_unit(c.avp3d);
    for (const auto& [v, value] : c.avp) ok = ok && value >= 0.0 && value <= 1.0;
    if (!ok) throw InvariantViolation("metric outside [0, 1] for class " + c.class_name);
  }
}

}  // namespace posebench
