#include "posebench/report.hpp"

#include "posebench/error.hpp"

namespace posebench {

using io::Json;

std::string to_string(PoseMode mode) {
  return mode == PoseMode::kDiscrete ? "discrete" : "continuous";
}

std::string to_string(IouRule rule) {
  return rule == IouRule::kGreaterEqual ? "geq" : "strict";
}

std::string to_string(ApInterpolation interp) {
  return interp == ApInterpolation::kAllPoint ? "allpoint" : "11point";
}

Json config_to_json(const EvalConfig& config) {
  Json metrics = Json::array();
  if (config.metrics.ap) metrics.push_back("ap");
  if (config.metrics.avp) metrics.push_back("avp");
  if (config.metrics.aos) metrics.push_back("aos");
  if (config.metrics.avp3d) metrics.push_back("avp3d");
  return {
      {"views", config.views},
      {"pose_mode", to_string(config.pose_mode)},
      {"metrics", metrics},
      {"iou_threshold", config.matching.iou_threshold},
      {"iou_rule", to_string(config.matching.iou_rule)},
      {"ap_interp", to_string(config.interpolation)},
      {"origin_offset_deg", config.origin_offset.degrees()},
      {"geodesic_threshold_rad", config.geodesic_threshold},
  };
}

namespace {

Json avp_json(const std::map<int, double>& avp) {
  Json out = Json::object();
  for (const auto& [v, value] : avp) out[std::to_string(v)] = value;
  return out;
}

std::map<int, double> avp_from(const Json& j) {
  std::map<int, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[std::stoi(it.key())] = it.value().get<double>();
  return out;
}

std::optional<double> opt(const Json& j, const char* key) {
  if (auto it = j.find(key); it != j.end()) return it->get<double>();
  return std::nullopt;
}

}  // namespace

Json report_to_json(const EvalReport& report, const EvalConfig& config,
                    const std::vector<InputDigest>& inputs) {
  Json inputs_json = Json::array();
  for (const auto& in : inputs) {
    inputs_json.push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
  }

  Json classes = Json::array();
  for (const ClassReport& c : report.classes) {
    Json row = {{"class", c.class_name}, {"evaluated", c.evaluated},
                {"n_gt", c.n_gt},        {"n_det", c.n_det},
                {"tp", c.tp},            {"fp", c.fp},
                {"ignored", c.ignored}};
    if (c.ap) row["ap"] = *c.ap;
    if (!c.avp.empty()) row["avp"] = avp_json(c.avp);
    if (c.aos) row["aos"] = *c.aos;
    if (c.avp3d) row["avp3d"] = *c.avp3d;
    classes.push_back(std::move(row));
  }

  Json means = {{"evaluated_classes", report.evaluated_classes}};
  if (report.mean_ap) means["map"] = *report.mean_ap;
  if (!report.mean_avp.empty()) means["mavp"] = avp_json(report.mean_avp);
  if (report.mean_aos) means["maos"] = *report.mean_aos;
  if (report.mean_avp3d) means["mavp3d"] = *report.mean_avp3d;

  return {
      {"tool", {{"name", "posebench"}, {"version", POSEBENCH_VERSION}}},
      {"config", config_to_json(config)},
      {"inputs", inputs_json},
      {"classes", classes},
      {"means", means},
  };
}

EvalReport report_from_json(const Json& doc) {
  EvalReport r;
  try {
    for (const Json& row : doc.at("classes")) {
      ClassReport c;
      c.class_name = row.at("class").get<std::string>();
      c.evaluated = row.at("evaluated").get<bool>();
      c.n_gt = row.at("n_gt").get<std::size_t>();
      c.n_det = row.at("n_det").get<std::size_t>();
      c.tp = row.at("tp").get<std::size_t>();
      c.fp = row.at("fp").get<std::size_t>();
      c.ignored = row.at("ignored").get<std::size_t>();
      c.ap = opt(row, "ap");
      c.aos = opt(row, "aos");
      c.avp3d = opt(row, "avp3d");
      if (auto it = row.find("avp"); it != row.end()) c.avp = avp_from(*it);
      r.classes.push_back(std::move(c));
    }
    const Json& means = doc.at("means");
    r.evaluated_classes = means.at("evaluated_classes").get<std::size_t>();
    r.mean_ap = opt(means, "map");
    r.mean_aos = opt(means, "maos");
    r.mean_avp3d = opt(means, "mavp3d");
    if (auto it = means.find("mavp"); it != means.end()) r.mean_avp = avp_from(*it);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string render_report(const EvalReport& report, const EvalConfig& config,
                          const std::vector<InputDigest>& inputs) {
  check_report_consistency(report);
  std::string text = report_to_json(report, config, inputs).dump(2) + "\n";
  try {
    check_report_consistency(report_from_json(Json::parse(text)));
  } catch (const ValidationError& e) {
    throw InvariantViolation(std::string("emitted report does not read back: ") + e.what());
  }
  return text;
}

}  // namespace posebench
