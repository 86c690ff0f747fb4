#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "posebench/matching.hpp"
#include "posebench/simulate.hpp"

namespace posebench::io {

using Json = nlohmann::ordered_json;

/// Angle fields as they appear in a file, already wrapped into [-180, 180).
/// A missing field stays empty and reads as 0 in the typed pose.
struct AngleFields {
  std::optional<double> azimuth_deg;
  std::optional<double> elevation_deg;
  std::optional<double> theta_deg;

  friend bool operator==(const AngleFields&, const AngleFields&) = default;
};

struct GtRecord {
  GroundTruthObject object;
  AngleFields angles;
  std::size_t line = 0;  // 1-based source line, 0 when built in memory
  Json extra = Json::object();  // unknown fields, preserved in order
};

struct DetRecord {
  Detection detection;
  AngleFields angles;
  std::size_t line = 0;
  Json extra = Json::object();
};

/// Optional first line {"_meta": {...}} carries provenance (generator, seed).
template <typename Record>
struct Dataset {
  std::optional<Json> meta;
  std::vector<Record> records;
};

using GtDataset = Dataset<GtRecord>;
using DetDataset = Dataset<DetRecord>;

/// Throws ValidationError naming source, line and field on malformed input.
/// An empty stream gives an empty dataset.
GtDataset parse_gt(std::istream& in, const std::string& source = "<input>");
DetDataset parse_det(std::istream& in, const std::string& source = "<input>");
GtDataset load_gt(const std::filesystem::path& path);
DetDataset load_det(const std::filesystem::path& path);

void write_gt(std::ostream& out, const GtDataset& data);
void write_det(std::ostream& out, const DetDataset& data);
void save_gt(const std::filesystem::path& path, const GtDataset& data);
void save_det(const std::filesystem::path& path, const DetDataset& data);

/// Builds a record from in-memory radians. Angles are snapped to the degree
/// values that will be written, so a save/load cycle reproduces the record
/// exactly.
GtRecord make_record(const GroundTruthObject& object);
DetRecord make_record(const Detection& detection);

std::vector<GroundTruthObject> objects(const GtDataset& data);
std::vector<Detection> detections(const DetDataset& data);

enum class AngleNeed { kAzimuth, kAllAngles };

/// Throws ValidationError on the first record missing an angle `need`
/// requires.
void require_angles(const GtDataset& data, AngleNeed need, const std::string& source);
void require_angles(const DetDataset& data, AngleNeed need, const std::string& source);

/// Scenario files are JSON objects; angles in degrees. Unknown keys are
/// rejected.
ScenarioConfig parse_scenario(const Json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);
Json scenario_to_json(const ScenarioConfig& config);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Reads a whole file; throws ValidationError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes bytes, replacing the file; throws ValidationError on failure.
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace posebench::io
