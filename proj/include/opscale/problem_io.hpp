#pragma once

// JSON problem files:
//
//   {"m": 5, "n": 5, "k": 7,
//    "matrices": [[a_11, a_12, ...], ...],     // k arrays of m*n, row-major
//    "meta": {"family": "hilbert", "seed": "1", "spec": {...}}}
//
// Numbers are written in shortest round-trip form, so save followed by load
// reproduces every entry bit for bit.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "opscale/cp_map.hpp"

namespace opscale {

struct ProblemMeta {
  std::string family;                 // "hilbert", "frame", "frame-extreme", ...
  std::optional<std::uint64_t> seed;  // stored as a decimal string
  nlohmann::json spec = nlohmann::json::object();
};

struct ProblemFile {
  ScalingProblem problem;
  ProblemMeta meta;
};

nlohmann::json problem_to_json(const ScalingProblem& p, const ProblemMeta& meta = {});

/// `source` names the document in error messages. Throws FormatError for
/// missing or mistyped fields, wrong counts and degenerate problems.
ProblemFile problem_from_json(const nlohmann::json& doc, std::string_view source);

/// Throws IoError if the file cannot be written.
void save_problem(const ScalingProblem& p, const std::filesystem::path& path,
                  const ProblemMeta& meta = {});

/// Throws IoError if the file cannot be read, FormatError if it is malformed.
ProblemFile read_problem_file(const std::filesystem::path& path);
ScalingProblem load_problem(const std::filesystem::path& path);

}  // namespace opscale
