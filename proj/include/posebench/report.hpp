#pragma once

#include <string>
#include <vector>

#include "posebench/evaluate.hpp"
#include "posebench/io.hpp"

namespace posebench {

struct InputDigest {
  std::string role;  // "gt" or "det"
  std::string path;
  std::string sha256;
};

std::string to_string(PoseMode mode);
std::string to_string(IouRule rule);
std::string to_string(ApInterpolation interp);

io::Json config_to_json(const EvalConfig& config);

/// Report document: tool name and version, config echo, input digests,
/// per-class rows, means. Serialization is deterministic (fixed key order,
/// shortest round-trip doubles).
io::Json report_to_json(const EvalReport& report, const EvalConfig& config,
                        const std::vector<InputDigest>& inputs);

/// Reads the per-class rows and means back; used to recompute the means
/// from the emitted document itself.
EvalReport report_from_json(const io::Json& doc);

/// Serializes, then re-parses the emitted text and checks that its means
/// agree with its per-class values. Throws InvariantViolation otherwise.
std::string render_report(const EvalReport& report, const EvalConfig& config,
                          const std::vector<InputDigest>& inputs);

}  // namespace posebench
