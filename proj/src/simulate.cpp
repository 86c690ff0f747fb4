#include "posebench/simulate.hpp"

#include <cmath>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "posebench/error.hpp"

namespace posebench {
namespace {

// Offset for the pose-error stream so it never aliases the main stream.
constexpr std::uint64_t kPoseStreamOffset = 0x9E3779B97F4A7C15ULL;

struct BaseDetection {
  Detection det;
  std::optional<std::size_t> gt;  // source object for localized detections
};

struct BaseScenario {
  std::vector<GroundTruthObject> gts;
  std::vector<BaseDetection> dets;
};

void require_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(fmt::format("{} must be in [0, 1], got {}", name, v));
  }
}

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{} must be finite and >= 0, got {}", name, v));
  }
}

void validate_model(const PoseErrorModel& model) {
  std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        require_non_negative(m.sigma, "pose error sigma");
        if constexpr (std::is_same_v<M, OppositeFlip>) require_unit(m.p_flip, "p_flip");
        if constexpr (std::is_same_v<M, BiasAttractor>) require_unit(m.pull, "pull");
      },
      model);
}

Pose random_pose(const ScenarioConfig& c, Rng& rng) {
  const double u = rng.uniform(-kPi, kPi);
  const double n = rng.normal();
  const double az = c.azimuth_prior.uniform ? u : c.azimuth_prior.bias.radians() +
                                                      c.azimuth_prior.sigma * n;
  const double el = c.elevation_mean + c.elevation_sigma * rng.normal();
  const double ip = c.inplane_sigma * rng.normal();
  return {Angle(az), Angle(el), Angle(ip)};
}

BaseScenario generate_base(const ScenarioConfig& c) {
  validate(c);
  Rng rng(c.seed);
  BaseScenario out;
  std::int64_t next_id = 0;
  const double w_img = c.image_width, h_img = c.image_height;

  for (std::size_t i = 0; i < c.n_images; ++i) {
    const std::string image_id = fmt::format("img{:06d}", i);
    const auto span = static_cast<std::uint64_t>(c.max_objects - c.min_objects + 1);
    const int n_objects = c.min_objects + static_cast<int>(rng.index(span));
    const std::size_t first_gt = out.gts.size();

    for (int k = 0; k < n_objects; ++k) {
      const std::string& cls = c.classes[rng.index(c.classes.size())];
      const double w = rng.uniform(0.1, 0.4) * w_img;
      const double h = rng.uniform(0.1, 0.4) * h_img;
      const double x1 = rng.uniform(0.0, w_img - w);
      const double y1 = rng.uniform(0.0, h_img - h);
      const Pose pose = random_pose(c, rng);
      const bool difficult = rng.bernoulli(c.difficult_rate);
      out.gts.push_back({image_id, cls, BoundingBox(x1, y1, x1 + w, y1 + h), pose, difficult});
    }

    for (std::size_t g = first_gt; g < out.gts.size(); ++g) {
      const GroundTruthObject& gt = out.gts[g];
      const LocalizationNoise& loc = c.localization;
      // Every draw happens unconditionally so that parameters never shift
      // the stream.
      const bool missed = rng.bernoulli(loc.miss_rate);
      const double dx = rng.normal(), dy = rng.normal(), dw = rng.normal(), dh = rng.normal();
      const double tp_score = rng.normal(c.scores.tp_mean, c.scores.tp_sigma);
      const bool spurious = rng.bernoulli(loc.fp_rate);
      const std::string& fp_cls = c.classes[rng.index(c.classes.size())];
      const double fw = rng.uniform(0.05, 0.3) * w_img;
      const double fh = rng.uniform(0.05, 0.3) * h_img;
      const double fx = rng.uniform(0.0, w_img - fw);
      const double fy = rng.uniform(0.0, h_img - fh);
      const double fp_score = rng.normal(c.scores.fp_mean, c.scores.fp_sigma);
      const Pose fp_pose = random_pose(c, rng);

      if (!missed) {
        const double bw = gt.box.x2() - gt.box.x1(), bh = gt.box.y2() - gt.box.y1();
        const double sx = loc.center_sigma * bw * dx, sy = loc.center_sigma * bh * dy;
        const double gx = 0.5 * bw * std::expm1(loc.size_sigma * dw);
        const double gy = 0.5 * bh * std::expm1(loc.size_sigma * dh);
        const BoundingBox box(gt.box.x1() + sx - gx, gt.box.y1() + sy - gy,
                              gt.box.x2() + sx + gx, gt.box.y2() + sy + gy);
        out.dets.push_back({{image_id, gt.class_name, box, tp_score, gt.pose, next_id++}, g});
      }
      if (spurious) {
        out.dets.push_back(
            {{image_id, fp_cls, BoundingBox(fx, fy, fx + fw, fy + fh), fp_score, fp_pose,
              next_id++},
             std::nullopt});
      }
    }
  }
  return out;
}

std::vector<Detection> apply_pose_errors(const BaseScenario& base, const ScenarioConfig& c,
                                         const PoseErrorModel& model) {
  Rng rng(c.seed + kPoseStreamOffset);
  std::vector<Detection> dets;
  dets.reserve(base.dets.size());
  for (const BaseDetection& b : base.dets) {
    Detection d = b.det;
    if (b.gt) {
      const Pose& truth = base.gts[*b.gt].pose;
      d.pose.azimuth = perturb_azimuth(truth.azimuth, model, rng);
      const double ne = rng.normal(), ni = rng.normal();
      d.pose.elevation = Angle(truth.elevation.radians() + c.secondary_angle_sigma * ne);
      d.pose.inplane = Angle(truth.inplane.radians() + c.secondary_angle_sigma * ni);
    }
    dets.push_back(std::move(d));
  }
  return dets;
}

}  // namespace

void validate(const ScenarioConfig& c) {
  if (c.classes.empty()) throw ValidationError("scenario needs at least one class");
  for (const auto& name : c.classes) {
    if (name.empty()) throw ValidationError("class names must be nonempty");
  }
  if (c.min_objects < 0 || c.max_objects < c.min_objects) {
    throw ValidationError("objects per image must satisfy 0 <= min <= max");
  }
  if (!(c.image_width > 0.0) || !(c.image_height > 0.0)) {
    throw ValidationError("image size must be positive");
  }
  require_unit(c.difficult_rate, "difficult_rate");
  require_unit(c.localization.miss_rate, "miss_rate");
  require_unit(c.localization.fp_rate, "fp_rate");
  require_non_negative(c.localization.center_sigma, "center_sigma");
  require_non_negative(c.localization.size_sigma, "size_sigma");
  require_non_negative(c.azimuth_prior.sigma, "azimuth prior sigma");
  require_non_negative(c.elevation_sigma, "elevation_sigma");
  require_non_negative(c.inplane_sigma, "inplane_sigma");
  require_non_negative(c.secondary_angle_sigma, "secondary_angle_sigma");
  require_non_negative(c.scores.tp_sigma, "tp score sigma");
  require_non_negative(c.scores.fp_sigma, "fp score sigma");
  if (!std::isfinite(c.scores.tp_mean) || !std::isfinite(c.scores.fp_mean) ||
      !std::isfinite(c.elevation_mean)) {
    throw ValidationError("scenario means must be finite");
  }
  validate_model(c.pose_error);
}

Angle perturb_azimuth(Angle truth, const PoseErrorModel& model, Rng& rng) {
  const double u = rng.uniform();
  const double n = rng.normal();
  return std::visit(
      [&](const auto& m) -> Angle {
        using M = std::decay_t<decltype(m)>;
        double a = truth.radians();
        if constexpr (std::is_same_v<M, OppositeFlip>) {
          if (u < m.p_flip) a += kPi;
        } else if constexpr (std::is_same_v<M, BiasAttractor>) {
          a += m.pull * Angle(m.bias.radians() - a).radians();
        }
        return Angle(a + m.sigma * n);
      },
      model);
}

SimulatedData generate(const ScenarioConfig& config) {
  BaseScenario base = generate_base(config);
  SimulatedData out;
  out.dets = apply_pose_errors(base, config, config.pose_error);
  out.gts = std::move(base.gts);
  return out;
}

ScenarioConfig PairedScenarioParams::default_paired_base() {
  ScenarioConfig c;
  c.n_images = 600;
  c.min_objects = 1;
  c.max_objects = 3;
  c.classes = {"bus"};
  c.elevation_mean = 10.0 * kPi / 180.0;
  c.elevation_sigma = 5.0 * kPi / 180.0;
  c.inplane_sigma = 3.0 * kPi / 180.0;
  c.localization = {0.06, 0.06, 0.1, 0.25};
  return c;
}

PairedScenario scenario_discrete_vs_continuous(std::uint64_t seed,
                                               const PairedScenarioParams& params) {
  ScenarioConfig config = params.base;
  config.seed = seed;
  validate_model(params.discrete_like);
  validate_model(params.continuous_like);
  const BaseScenario base = generate_base(config);
  PairedScenario out;
  out.discrete_like = apply_pose_errors(base, config, params.discrete_like);
  out.continuous_like = apply_pose_errors(base, config, params.continuous_like);
  out.gts = base.gts;
  return out;
}

}  // namespace posebench
