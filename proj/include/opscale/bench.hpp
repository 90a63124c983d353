#pragma once

// Benchmark harness behind the `opscale` command line tool: instance
// generation, traced solves, runtime statistics over repeated runs and
// matplotlib scripts for the convergence plots.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opscale/problem_io.hpp"
#include "opscale/solvers.hpp"

namespace opscale::bench {

enum class Family { kHilbert, kFrame, kFrameExtreme };

std::string_view to_string(Family f);
/// Accepts "hilbert", "frame", "frame-extreme". Throws InvalidArgument.
Family parse_family(std::string_view name);

inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr double kDefaultTol = 1e-13;

struct FamilyParams {
  Index n = 5;
  Index k = 7;
  double kappa = 1e7;
  std::uint64_t seed = kDefaultSeed;
};

/// hilbert: n = 5, k = 7. frame: n = 50, k = 55, kappa = 1e7.
/// frame-extreme: n = 50, k = 52, kappa = 1e7.
FamilyParams default_params(Family f);

/// Iteration budget and SOR activation iteration used when the run
/// configuration leaves them open: 100 / 5 for the Hilbert family and
/// 200 / 20 for the frame families (and for files of unknown family).
int default_max_iters(std::string_view family);
int default_activation(std::string_view family);

struct GeneratedInstance {
  ScalingProblem problem;
  ProblemMeta meta;
};

GeneratedInstance generate(Family f, const FamilyParams& params);

struct RunConfig {
  std::optional<std::filesystem::path> instance;  // exactly one of instance / family
  std::optional<Family> family;
  FamilyParams params;
  std::vector<Algorithm> algorithms;
  std::optional<SorConfig> sor;  // default auto:<default_activation>
  std::optional<int> max_iters;  // default default_max_iters
  double tol = kDefaultTol;
  int repeats = 1;
  std::filesystem::path out_dir = ".";

  /// Throws InvalidArgument on an inconsistent configuration.
  void validate() const;
};

/// Header of every trace file, first line, no trailing spaces.
inline constexpr std::string_view kTraceHeader = "iter,grad_norm,elapsed_s,omega";
inline constexpr std::string_view kBenchHeader =
    "iter,algorithm,grad_norm,mean_elapsed_s,std_elapsed_s";

/// Floating-point fields use shortest round-trip formatting.
void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);
/// Throws FormatError (naming `source` and the line) on a bad header, a
/// malformed row, a non-increasing iteration or a decreasing elapsed time.
std::vector<TraceRow> parse_trace_csv(std::istream& in, std::string_view source);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

/// Mean and sample standard deviation of cumulative elapsed time at one
/// iteration, over all timed repeats of one algorithm.
struct RuntimeRow {
  int iter = 0;
  Algorithm algorithm = Algorithm::kFpi;
  double grad_norm = 0.0;
  double mean_elapsed_s = 0.0;
  double std_elapsed_s = 0.0;
};

/// Aggregates repeated solves of one algorithm on one instance. Rows cover
/// the iterations present in every run. Throws Error if the runs disagree
/// on a grad norm (solves are deterministic, timing aside).
std::vector<RuntimeRow> runtime_stats(std::span<const SolveReport> runs);

void write_bench_csv(std::ostream& out, std::span<const RuntimeRow> rows);
std::vector<RuntimeRow> parse_bench_csv(std::istream& in, std::string_view source);

struct GenResult {
  std::filesystem::path path;
  ScalingProblem problem;
  double grad_norm = 0.0;  // at the identity scaling
};

GenResult cmd_gen(Family f, const FamilyParams& params, const std::filesystem::path& out);

struct SolveResult {
  std::string family;
  std::vector<SolveReport> reports;
  std::vector<std::filesystem::path> traces;  // trace_<algo>.csv, one per report
  std::filesystem::path summary;              // summary.json
};

/// Runs every configured algorithm once and writes one trace per algorithm
/// plus a summary. Divergence is recorded in the summary, not raised.
SolveResult cmd_solve(const RunConfig& config);

struct BenchResult {
  std::string family;
  std::vector<RuntimeRow> rows;
  std::filesystem::path csv;  // bench.csv
};

/// Times `repeats` sequential solves per algorithm. With repeats >= 3 one
/// extra warm-up solve runs first and is discarded.
BenchResult cmd_bench(const RunConfig& config);

/// Writes a self-contained matplotlib script plotting grad norm against
/// iteration and against runtime for every input (trace or bench CSV).
/// OSI-family series are dashed, FPI-family series solid. Running the script
/// writes the figure next to it as <out stem>.png unless a path is given.
void cmd_plot(std::span<const std::filesystem::path> inputs, const std::filesystem::path& out);

}  // namespace opscale::bench
