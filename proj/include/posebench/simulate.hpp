#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "posebench/matching.hpp"
#include "posebench/random.hpp"

namespace posebench {

/// Azimuth error around the true pose with wrapped Gaussian noise.
struct GaussianNearby {
  double sigma = 0.0;  // radians
};

/// With probability p_flip the prediction lands on the opposite side.
struct OppositeFlip {
  double p_flip = 0.0;
  double sigma = 0.0;
};

/// Prediction is pulled a fraction of the shortest arc towards `bias`.
struct BiasAttractor {
  Angle bias{};
  double pull = 0.0;  // in [0, 1]
  double sigma = 0.0;
};

using PoseErrorModel = std::variant<GaussianNearby, OppositeFlip, BiasAttractor>;

struct AzimuthPrior {
  bool uniform = true;
  Angle bias{};        // centre when not uniform
  double sigma = 1.0;  // spread when not uniform, radians
};

struct ScoreModel {
  double tp_mean = 0.75;
  double tp_sigma = 0.1;
  double fp_mean = 0.35;
  double fp_sigma = 0.15;
};

struct LocalizationNoise {
  double center_sigma = 0.0;  // fraction of box size
  double size_sigma = 0.0;    // log-scale
  double miss_rate = 0.0;
  double fp_rate = 0.0;  // chance of one spurious detection per GT object
};

struct ScenarioConfig {
  std::size_t n_images = 100;
  int min_objects = 1;
  int max_objects = 3;
  std::vector<std::string> classes{"car"};
  double image_width = 640.0;
  double image_height = 480.0;
  double difficult_rate = 0.0;
  AzimuthPrior azimuth_prior{};
  double elevation_mean = 0.0;   // GT elevation, radians
  double elevation_sigma = 0.0;
  double inplane_sigma = 0.0;    // GT in-plane, radians
  ScoreModel scores{};
  LocalizationNoise localization{};
  PoseErrorModel pose_error = GaussianNearby{};
  double secondary_angle_sigma = 0.0;  // prediction noise on elevation and in-plane
  std::uint64_t seed = 42;
};

/// Throws ValidationError on rates outside [0, 1], negative spreads, or an
/// empty class list.
void validate(const ScenarioConfig& config);

struct SimulatedData {
  std::vector<GroundTruthObject> gts;
  std::vector<Detection> dets;
};

/// Deterministic for a fixed config (seed included). Localization and scores
/// come from one stream; pose errors from a second stream derived from the
/// seed, so two pose models over the same seed share every other draw.
SimulatedData generate(const ScenarioConfig& config);

/// Pose of one prediction under `model`. Always consumes the same number of
/// draws from `rng`, whatever the parameters.
Angle perturb_azimuth(Angle truth, const PoseErrorModel& model, Rng& rng);

struct PairedScenario {
  std::vector<GroundTruthObject> gts;
  std::vector<Detection> discrete_like;
  std::vector<Detection> continuous_like;
};

struct PairedScenarioParams {
  ScenarioConfig base = default_paired_base();
  PoseErrorModel discrete_like = OppositeFlip{0.2, 3.0 * kPi / 180.0};
  PoseErrorModel continuous_like = BiasAttractor{Angle{}, 0.2, 22.0 * kPi / 180.0};

  static ScenarioConfig default_paired_base();
};

/// Shared GT and localization; only the azimuth error model differs between
/// the two detection sets.
PairedScenario scenario_discrete_vs_continuous(std::uint64_t seed,
                                               const PairedScenarioParams& params = {});

}  // namespace posebench
