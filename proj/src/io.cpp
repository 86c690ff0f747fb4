#include "posebench/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "posebench/error.hpp"

namespace posebench::io {
namespace {

constexpr const char* kMetaKey = "_meta";

class LineContext {
 public:
  LineContext(const std::string& source, std::size_t line) : source_(source), line_(line) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ValidationError(fmt::format("{}:{}: field '{}': {}", source_, line_, field, what));
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(fmt::format("{}:{}: {}", source_, line_, what));
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

std::string take_string(Json& obj, const char* key, const LineContext& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) ctx.fail(key, "missing");
  if (!it->is_string() || it->get_ref<const std::string&>().empty()) {
    ctx.fail(key, "expected a nonempty string");
  }
  std::string value = it->get<std::string>();
  obj.erase(it);
  return value;
}

double as_finite(const Json& v, const char* key, const LineContext& ctx) {
  if (!v.is_number()) ctx.fail(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) ctx.fail(key, "must be finite");
  return d;
}

std::optional<double> take_angle(Json& obj, const char* key, const LineContext& ctx) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (it != obj.end()) obj.erase(it);
    return std::nullopt;
  }
  const double deg = as_finite(*it, key, ctx);
  obj.erase(it);
  return wrap_degrees(deg);
}

BoundingBox take_box(Json& obj, const LineContext& ctx) {
  auto it = obj.find("bbox");
  if (it == obj.end()) ctx.fail("bbox", "missing");
  if (!it->is_array() || it->size() != 4) ctx.fail("bbox", "expected [x1, y1, x2, y2]");
  std::array<double, 4> c{};
  for (std::size_t i = 0; i < 4; ++i) c[i] = as_finite((*it)[i], "bbox", ctx);
  obj.erase(it);
  try {
    return BoundingBox(c[0], c[1], c[2], c[3]);
  } catch (const ValidationError& e) {
    ctx.fail("bbox", e.what());
  }
}

Pose pose_from(const AngleFields& a) {
  return {Angle::from_degrees(a.azimuth_deg.value_or(0.0)),
          Angle::from_degrees(a.elevation_deg.value_or(0.0)),
          Angle::from_degrees(a.theta_deg.value_or(0.0))};
}

AngleFields take_angles(Json& obj, const LineContext& ctx) {
  AngleFields a;
  a.azimuth_deg = take_angle(obj, "azimuth_deg", ctx);
  a.elevation_deg = take_angle(obj, "elevation_deg", ctx);
  a.theta_deg = take_angle(obj, "theta_deg", ctx);
  return a;
}

// Splits a JSON-lines stream, handing each non-blank line to `on_record`.
template <typename Record, typename Fn>
Dataset<Record> parse_lines(std::istream& in, const std::string& source, Fn on_record) {
  Dataset<Record> data;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    const LineContext ctx(source, line_no);
    Json obj;
    try {
      obj = Json::parse(text);
    } catch (const Json::parse_error& e) {
      ctx.fail(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) ctx.fail("expected a JSON object");
    if (obj.contains(kMetaKey)) {
      if (!data.records.empty() || data.meta) ctx.fail("'_meta' is only allowed on the first line");
      data.meta = obj[kMetaKey];
      continue;
    }
    data.records.push_back(on_record(obj, ctx, line_no, data.records.size()));
  }
  return data;
}

Json angles_json(Json line, const AngleFields& a) {
  if (a.azimuth_deg) line["azimuth_deg"] = *a.azimuth_deg;
  if (a.elevation_deg) line["elevation_deg"] = *a.elevation_deg;
  if (a.theta_deg) line["theta_deg"] = *a.theta_deg;
  return line;
}

Json box_json(const BoundingBox& b) { return Json::array({b.x1(), b.y1(), b.x2(), b.y2()}); }

void append_extra(Json& line, const Json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) line[it.key()] = it.value();
}

template <typename Data, typename Fn>
void write_lines(std::ostream& out, const Data& data, Fn to_json) {
  if (data.meta) out << Json{{kMetaKey, *data.meta}}.dump() << '\n';
  for (const auto& r : data.records) out << to_json(r).dump() << '\n';
}

AngleFields snapped(const Pose& p) {
  return {wrap_degrees(rad_to_deg(p.azimuth.radians())),
          wrap_degrees(rad_to_deg(p.elevation.radians())),
          wrap_degrees(rad_to_deg(p.inplane.radians()))};
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

}  // namespace

GtDataset parse_gt(std::istream& in, const std::string& source) {
  return parse_lines<GtRecord>(
      in, source, [](Json& obj, const LineContext& ctx, std::size_t line, std::size_t) {
        GtRecord r{.object = {take_string(obj, "image", ctx), take_string(obj, "class", ctx),
                              take_box(obj, ctx), Pose{}, false},
                   .angles = {},
                   .line = line};
        r.angles = take_angles(obj, ctx);
        r.object.pose = pose_from(r.angles);
        if (auto it = obj.find("difficult"); it != obj.end()) {
          if (it->is_boolean()) {
            r.object.difficult = it->get<bool>();
          } else if (it->is_number_integer() && (*it == 0 || *it == 1)) {
            r.object.difficult = it->get<int>() == 1;
          } else {
            ctx.fail("difficult", "expected a boolean");
          }
          obj.erase(it);
        }
        r.extra = std::move(obj);
        return r;
      });
}

DetDataset parse_det(std::istream& in, const std::string& source) {
  return parse_lines<DetRecord>(
      in, source, [](Json& obj, const LineContext& ctx, std::size_t line, std::size_t index) {
        std::string image = take_string(obj, "image", ctx);
        std::string cls = take_string(obj, "class", ctx);
        BoundingBox box = take_box(obj, ctx);
        auto it = obj.find("score");
        if (it == obj.end()) ctx.fail("score", "missing");
        const double score = as_finite(*it, "score", ctx);
        obj.erase(it);
        DetRecord r{.detection = {std::move(image), std::move(cls), box, score, Pose{},
                                  static_cast<std::int64_t>(index)},
                    .angles = {},
                    .line = line};
        r.angles = take_angles(obj, ctx);
        r.detection.pose = pose_from(r.angles);
        r.extra = std::move(obj);
        return r;
      });
}

GtDataset load_gt(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_gt(in, path.string());
}

DetDataset load_det(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_det(in, path.string());
}

void write_gt(std::ostream& out, const GtDataset& data) {
  write_lines(out, data, [](const GtRecord& r) {
    Json line = {{"image", r.object.image_id},
                 {"class", r.object.class_name},
                 {"bbox", box_json(r.object.box)}};
    line = angles_json(std::move(line), r.angles);
    line["difficult"] = r.object.difficult;
    append_extra(line, r.extra);
    return line;
  });
}

void write_det(std::ostream& out, const DetDataset& data) {
  write_lines(out, data, [](const DetRecord& r) {
    Json line = {{"image", r.detection.image_id},
                 {"class", r.detection.class_name},
                 {"bbox", box_json(r.detection.box)},
                 {"score", r.detection.score}};
    line = angles_json(std::move(line), r.angles);
    append_extra(line, r.extra);
    return line;
  });
}

void save_gt(const std::filesystem::path& path, const GtDataset& data) {
  std::ostringstream out;
  write_gt(out, data);
  write_file(path, out.str());
}

void save_det(const std::filesystem::path& path, const DetDataset& data) {
  std::ostringstream out;
  write_det(out, data);
  write_file(path, out.str());
}

GtRecord make_record(const GroundTruthObject& object) {
  GtRecord r{.object = object, .angles = snapped(object.pose)};
  r.object.pose = pose_from(r.angles);
  return r;
}

DetRecord make_record(const Detection& detection) {
  DetRecord r{.detection = detection, .angles = snapped(detection.pose)};
  r.detection.pose = pose_from(r.angles);
  return r;
}

std::vector<GroundTruthObject> objects(const GtDataset& data) {
  std::vector<GroundTruthObject> out;
  out.reserve(data.records.size());
  for (const auto& r : data.records) out.push_back(r.object);
  return out;
}

std::vector<Detection> detections(const DetDataset& data) {
  std::vector<Detection> out;
  out.reserve(data.records.size());
  for (const auto& r : data.records) out.push_back(r.detection);
  return out;
}

namespace {

template <typename Data>
void require_angles_impl(const Data& data, AngleNeed need, const std::string& source) {
  for (const auto& r : data.records) {
    const char* missing = nullptr;
    if (!r.angles.azimuth_deg) {
      missing = "azimuth_deg";
    } else if (need == AngleNeed::kAllAngles) {
      if (!r.angles.elevation_deg) missing = "elevation_deg";
      else if (!r.angles.theta_deg) missing = "theta_deg";
    }
    if (missing) {
      throw ValidationError(fmt::format("{}:{}: field '{}': required by the requested metrics",
                                        source, r.line, missing));
    }
  }
}

}  // namespace

void require_angles(const GtDataset& data, AngleNeed need, const std::string& source) {
  require_angles_impl(data, need, source);
}

void require_angles(const DetDataset& data, AngleNeed need, const std::string& source) {
  require_angles_impl(data, need, source);
}

// Scenario files ------------------------------------------------------------

namespace {

class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(fmt::format("scenario {}: {}", where_, what));
  }

  const Json* get(const char* key) {
    seen_.push_back(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) {
    if (const Json* v = get(key)) {
      if (!v->is_number()) fail(fmt::format("'{}' must be a number", key));
      out = v->get<double>();
    }
  }

  void degrees(const char* key, double& out_radians) {
    double deg = rad_to_deg(out_radians);
    number(key, deg);
    out_radians = deg_to_rad(deg);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
        fail(fmt::format("unknown key '{}'", it.key()));
      }
    }
  }

 private:
  const Json& obj_;
  std::string where_;
  std::vector<std::string> seen_;
};

PoseErrorModel parse_pose_error(const Json& doc) {
  ObjectReader r(doc, "pose_error");
  const Json* model = r.get("model");
  if (!model || !model->is_string()) r.fail("'model' must be a string");
  const std::string name = model->get<std::string>();
  PoseErrorModel out;
  if (name == "gaussian_nearby") {
    GaussianNearby m;
    r.degrees("sigma_deg", m.sigma);
    out = m;
  } else if (name == "opposite_flip") {
    OppositeFlip m;
    r.number("p_flip", m.p_flip);
    r.degrees("sigma_deg", m.sigma);
    out = m;
  } else if (name == "bias_attractor") {
    BiasAttractor m;
    double bias = 0.0;
    r.degrees("bias_deg", bias);
    m.bias = Angle(bias);
    r.number("pull", m.pull);
    r.degrees("sigma_deg", m.sigma);
    out = m;
  } else {
    r.fail("unknown pose error model '" + name + "'");
  }
  r.finish();
  return out;
}

Json pose_error_json(const PoseErrorModel& model) {
  return std::visit(
      [](const auto& m) -> Json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, GaussianNearby>) {
          return {{"model", "gaussian_nearby"}, {"sigma_deg", rad_to_deg(m.sigma)}};
        } else if constexpr (std::is_same_v<M, OppositeFlip>) {
          return {{"model", "opposite_flip"}, {"p_flip", m.p_flip},
                  {"sigma_deg", rad_to_deg(m.sigma)}};
        } else {
          return {{"model", "bias_attractor"}, {"bias_deg", m.bias.degrees()},
                  {"pull", m.pull}, {"sigma_deg", rad_to_deg(m.sigma)}};
        }
      },
      model);
}

}  // namespace

ScenarioConfig parse_scenario(const Json& doc) {
  ScenarioConfig c;
  ObjectReader r(doc, "file");
  if (const Json* v = r.get("n_images")) {
    if (!v->is_number_unsigned()) r.fail("'n_images' must be a non-negative integer");
    c.n_images = v->get<std::size_t>();
  }
  if (const Json* v = r.get("objects_per_image")) {
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_integer() ||
        !(*v)[1].is_number_integer()) {
      r.fail("'objects_per_image' must be [min, max] integers");
    }
    c.min_objects = (*v)[0].get<int>();
    c.max_objects = (*v)[1].get<int>();
  }
  if (const Json* v = r.get("classes")) {
    if (!v->is_array()) r.fail("'classes' must be an array of strings");
    c.classes.clear();
    for (const auto& name : *v) {
      if (!name.is_string()) r.fail("'classes' must be an array of strings");
      c.classes.push_back(name.get<std::string>());
    }
  }
  if (const Json* v = r.get("image_size")) {
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
      r.fail("'image_size' must be [width, height]");
    }
    c.image_width = (*v)[0].get<double>();
    c.image_height = (*v)[1].get<double>();
  }
  r.number("difficult_rate", c.difficult_rate);
  if (const Json* v = r.get("azimuth_prior")) {
    ObjectReader p(*v, "azimuth_prior");
    const Json* kind = p.get("kind");
    if (!kind || !kind->is_string()) p.fail("'kind' must be \"uniform\" or \"concentrated\"");
    if (*kind == "uniform") {
      c.azimuth_prior.uniform = true;
    } else if (*kind == "concentrated") {
      c.azimuth_prior.uniform = false;
    } else {
      p.fail("'kind' must be \"uniform\" or \"concentrated\"");
    }
    double bias = c.azimuth_prior.bias.radians();
    p.degrees("bias_deg", bias);
    c.azimuth_prior.bias = Angle(bias);
    p.degrees("sigma_deg", c.azimuth_prior.sigma);
    p.finish();
  }
  if (const Json* v = r.get("elevation")) {
    ObjectReader e(*v, "elevation");
    e.degrees("mean_deg", c.elevation_mean);
    e.degrees("sigma_deg", c.elevation_sigma);
    e.finish();
  }
  r.degrees("inplane_sigma_deg", c.inplane_sigma);
  if (const Json* v = r.get("scores")) {
    ObjectReader s(*v, "scores");
    s.number("tp_mean", c.scores.tp_mean);
    s.number("tp_sigma", c.scores.tp_sigma);
    s.number("fp_mean", c.scores.fp_mean);
    s.number("fp_sigma", c.scores.fp_sigma);
    s.finish();
  }
  if (const Json* v = r.get("localization")) {
    ObjectReader l(*v, "localization");
    l.number("center_sigma", c.localization.center_sigma);
    l.number("size_sigma", c.localization.size_sigma);
    l.number("miss_rate", c.localization.miss_rate);
    l.number("fp_rate", c.localization.fp_rate);
    l.finish();
  }
  if (const Json* v = r.get("pose_error")) c.pose_error = parse_pose_error(*v);
  r.degrees("secondary_angle_sigma_deg", c.secondary_angle_sigma);
  if (const Json* v = r.get("seed")) {
    if (!v->is_number_unsigned()) r.fail("'seed' must be a non-negative integer");
    c.seed = v->get<std::uint64_t>();
  }
  r.finish();
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

Json scenario_to_json(const ScenarioConfig& c) {
  Json prior = {{"kind", c.azimuth_prior.uniform ? "uniform" : "concentrated"}};
  if (!c.azimuth_prior.uniform) {
    prior["bias_deg"] = c.azimuth_prior.bias.degrees();
    prior["sigma_deg"] = rad_to_deg(c.azimuth_prior.sigma);
  }
  return {
      {"n_images", c.n_images},
      {"objects_per_image", {c.min_objects, c.max_objects}},
      {"classes", c.classes},
      {"image_size", {c.image_width, c.image_height}},
      {"difficult_rate", c.difficult_rate},
      {"azimuth_prior", prior},
      {"elevation",
       {{"mean_deg", rad_to_deg(c.elevation_mean)}, {"sigma_deg", rad_to_deg(c.elevation_sigma)}}},
      {"inplane_sigma_deg", rad_to_deg(c.inplane_sigma)},
      {"scores",
       {{"tp_mean", c.scores.tp_mean},
        {"tp_sigma", c.scores.tp_sigma},
        {"fp_mean", c.scores.fp_mean},
        {"fp_sigma", c.scores.fp_sigma}}},
      {"localization",
       {{"center_sigma", c.localization.center_sigma},
        {"size_sigma", c.localization.size_sigma},
        {"miss_rate", c.localization.miss_rate},
        {"fp_rate", c.localization.fp_rate}}},
      {"pose_error", pose_error_json(c.pose_error)},
      {"secondary_angle_sigma_deg", rad_to_deg(c.secondary_angle_sigma)},
      {"seed", c.seed},
  };
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << bytes;
  if (!out) throw ValidationError("failed writing " + path.string());
}

std::string sha256_file(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw InvariantViolation("SHA-256 computation failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

}  // namespace posebench::io
