#include "opscale/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "opscale/errors.hpp"
#include "opscale/instances.hpp"

namespace opscale::bench {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  return ec == std::errc() && ptr == last;
}

[[noreturn]] void bad_line(std::string_view source, int line, const std::string& what) {
  throw FormatError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

// Reads the header line, tolerating a trailing '\r'.
std::string read_line(std::istream& in, bool& ok) {
  std::string line;
  ok = static_cast<bool>(std::getline(in, line));
  if (ok && !line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

struct ResolvedRun {
  ScalingProblem problem;
  std::string family;
  std::string source;
  SorConfig sor;
  int max_iters;
};

ResolvedRun resolve(const RunConfig& config) {
  config.validate();
  ProblemFile file = config.instance
                         ? read_problem_file(*config.instance)
                         : [&] {
                             GeneratedInstance g = generate(*config.family, config.params);
                             return ProblemFile{std::move(g.problem), std::move(g.meta)};
                           }();
  const std::string family = file.meta.family;
  const std::string source =
      config.instance ? config.instance->string() : "generated:" + family;
  return {std::move(file.problem), family, source,
          config.sor.value_or(SorConfig::automatic(default_activation(family))),
          config.max_iters.value_or(default_max_iters(family))};
}

std::string series_label(const fs::path& path) {
  std::string stem = path.stem().string();
  if (stem.rfind("trace_", 0) == 0) stem = stem.substr(6);
  return stem;
}

bool dashed_label(std::string_view label) {
  try {
    return absorbs_scaling(parse_algorithm(label));
  } catch (const InvalidArgument&) {
    return label.rfind("osi", 0) == 0;
  }
}

constexpr std::string_view kPlotTemplate = R"PY(#!/usr/bin/env python3
"""Grad norm against iteration and against runtime.

Generated by `opscale plot`. FPI-family series are solid, OSI-family series
dashed. Usage: python3 SCRIPT [output.png]
"""
import json
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

DEFAULT_OUTPUT = "@OUTPUT@"

SERIES = json.loads(r"""@SERIES@""")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.abspath(__file__)), DEFAULT_OUTPUT)
    fig, (ax_iter, ax_time) = plt.subplots(1, 2, figsize=(12, 4.5))
    for s in SERIES:
        style = "--" if s["dashed"] else "-"
        (line,) = ax_iter.semilogy(s["iter"], s["grad_norm"], style, label=s["label"])
        ax_time.semilogy(s["elapsed"], s["grad_norm"], style, color=line.get_color(),
                         label=s["label"])
        if s["std"] is not None:
            lo = [max(e - d, 0.0) for e, d in zip(s["elapsed"], s["std"])]
            hi = [e + d for e, d in zip(s["elapsed"], s["std"])]
            ax_time.fill_betweenx(s["grad_norm"], lo, hi, color=line.get_color(), alpha=0.2)
    ax_iter.set_xlabel("iteration")
    ax_time.set_xlabel("runtime [s]")
    for ax in (ax_iter, ax_time):
        ax.set_ylabel("grad norm")
        ax.grid(True, which="both", alpha=0.3)
    ax_iter.legend()
    fig.tight_layout()
    fig.savefig(out)


if __name__ == "__main__":
    main()
)PY";

void replace_all(std::string& text, std::string_view key, const std::string& value) {
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::kHilbert:
      return "hilbert";
    case Family::kFrame:
      return "frame";
    case Family::kFrameExtreme:
      return "frame-extreme";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "hilbert") return Family::kHilbert;
  if (name == "frame") return Family::kFrame;
  if (name == "frame-extreme") return Family::kFrameExtreme;
  throw InvalidArgument("unknown family '" + std::string(name) +
                        "' (expected hilbert, frame or frame-extreme)");
}

FamilyParams default_params(Family f) {
  switch (f) {
    case Family::kHilbert:
      return {5, 7, 1e7, kDefaultSeed};
    case Family::kFrame:
      return {50, 55, 1e7, kDefaultSeed};
    case Family::kFrameExtreme:
      return {50, 52, 1e7, kDefaultSeed};
  }
  return {};
}

int default_max_iters(std::string_view family) { return family == "hilbert" ? 100 : 200; }

int default_activation(std::string_view family) { return family == "hilbert" ? 5 : 20; }

GeneratedInstance generate(Family f, const FamilyParams& params) {
  ProblemMeta meta;
  meta.family = std::string(to_string(f));
  meta.seed = params.seed;
  const Seed seed{params.seed};
  if (f == Family::kHilbert) {
    meta.spec = {{"n", params.n}, {"k", params.k}};
    return {hilbert_instance(params.n, params.k, seed), std::move(meta)};
  }
  FrameSpec spec{params.n, params.k, params.kappa, f == Family::kFrameExtreme};
  meta.spec = {{"n", spec.n}, {"k", spec.k}, {"kappa", spec.kappa}, {"extreme", spec.extreme}};
  return {frame_instance(spec, seed).problem, std::move(meta)};
}

void RunConfig::validate() const {
  if (instance.has_value() == family.has_value()) {
    throw InvalidArgument("give exactly one of an instance file or a family");
  }
  if (algorithms.empty()) throw InvalidArgument("algorithm list is empty");
  if (repeats < 1) throw InvalidArgument("repeats must be at least 1");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (max_iters && *max_iters < 1) throw InvalidArgument("max-iters must be at least 1");
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : rows) {
    out << r.iter << ',' << shortest(r.grad_norm) << ',' << shortest(r.elapsed_s) << ','
        << shortest(r.omega) << '\n';
  }
}

std::vector<TraceRow> parse_trace_csv(std::istream& in, std::string_view source) {
  bool ok = false;
  const std::string header = read_line(in, ok);
  if (!ok || header != kTraceHeader) {
    bad_line(source, 1, "expected header '" + std::string(kTraceHeader) + "'");
  }
  std::vector<TraceRow> rows;
  int lineno = 1;
  for (std::string line = read_line(in, ok); ok; line = read_line(in, ok)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 4) bad_line(source, lineno, "expected 4 fields");
    TraceRow row;
    if (!parse_number(fields[0], row.iter) || !parse_number(fields[1], row.grad_norm) ||
        !parse_number(fields[2], row.elapsed_s) || !parse_number(fields[3], row.omega)) {
      bad_line(source, lineno, "unparsable field in '" + line + "'");
    }
    if (!rows.empty() && row.iter <= rows.back().iter) {
      bad_line(source, lineno, "iteration numbers must increase");
    }
    if (!rows.empty() && row.elapsed_s < rows.back().elapsed_s) {
      bad_line(source, lineno, "elapsed time decreases");
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<TraceRow> read_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_trace_csv(in, path.string());
}

std::vector<RuntimeRow> runtime_stats(std::span<const SolveReport> runs) {
  if (runs.empty()) throw InvalidArgument("runtime_stats: no runs");
  std::size_t length = runs.front().trace.size();
  for (const SolveReport& r : runs) {
    if (r.algorithm != runs.front().algorithm) {
      throw InvalidArgument("runtime_stats: runs of different algorithms");
    }
    length = std::min(length, r.trace.size());
  }
  const auto count = static_cast<double>(runs.size());
  std::vector<RuntimeRow> rows;
  rows.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    const TraceRow& first = runs.front().trace[t];
    double sum = 0.0;
    for (const SolveReport& r : runs) {
      if (r.trace[t].grad_norm != first.grad_norm) {
        throw Error("runtime_stats: grad norm differs between repeats at iteration " +
                    std::to_string(first.iter));
      }
      sum += r.trace[t].elapsed_s;
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (const SolveReport& r : runs) sq += (r.trace[t].elapsed_s - mean) * (r.trace[t].elapsed_s - mean);
    const double var = runs.size() > 1 ? sq / (count - 1.0) : 0.0;
    rows.push_back({first.iter, runs.front().algorithm, first.grad_norm, mean,
                    std::sqrt(std::max(var, 0.0))});
  }
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const RuntimeRow> rows) {
  out << kBenchHeader << '\n';
  for (const RuntimeRow& r : rows) {
    out << r.iter << ',' << to_string(r.algorithm) << ',' << shortest(r.grad_norm) << ','
        << shortest(r.mean_elapsed_s) << ',' << shortest(r.std_elapsed_s) << '\n';
  }
}

std::vector<RuntimeRow> parse_bench_csv(std::istream& in, std::string_view source) {
  bool ok = false;
  const std::string header = read_line(in, ok);
  if (!ok || header != kBenchHeader) {
    bad_line(source, 1, "expected header '" + std::string(kBenchHeader) + "'");
  }
  std::vector<RuntimeRow> rows;
  int lineno = 1;
  for (std::string line = read_line(in, ok); ok; line = read_line(in, ok)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 5) bad_line(source, lineno, "expected 5 fields");
    RuntimeRow row;
    try {
      row.algorithm = parse_algorithm(fields[1]);
    } catch (const InvalidArgument& e) {
      bad_line(source, lineno, e.what());
    }
    if (!parse_number(fields[0], row.iter) || !parse_number(fields[2], row.grad_norm) ||
        !parse_number(fields[3], row.mean_elapsed_s) ||
        !parse_number(fields[4], row.std_elapsed_s) || row.std_elapsed_s < 0.0) {
      bad_line(source, lineno, "unparsable field in '" + line + "'");
    }
    rows.push_back(row);
  }
  return rows;
}

GenResult cmd_gen(Family f, const FamilyParams& params, const fs::path& out) {
  GeneratedInstance g = generate(f, params);
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  save_problem(g.problem, out, g.meta);
  const double err = grad_norm(g.problem);
  return {out, std::move(g.problem), err};
}

SolveResult cmd_solve(const RunConfig& config) {
  ResolvedRun run = resolve(config);
  ensure_directory(config.out_dir);

  SolveResult result;
  result.family = run.family;
  json entries = json::array();
  for (Algorithm a : config.algorithms) {
    SolveReport report = solve(run.problem, a, run.sor, run.max_iters, config.tol);
    const fs::path trace = config.out_dir / ("trace_" + std::string(to_string(a)) + ".csv");
    {
      std::ofstream out = open_output(trace);
      write_trace_csv(out, report.trace);
      if (!out) throw IoError("failed writing '" + trace.string() + "'");
    }
    json entry = {{"algorithm", to_string(a)},
                  {"status", to_string(report.status)},
                  {"iterations", report.iterations()},
                  {"initial_grad_norm", report.initial_grad_norm},
                  {"final_grad_norm", report.final_grad_norm()},
                  {"best_grad_norm", report.best_grad_norm()},
                  {"omega_estimate", nullptr},
                  {"omega_clamped", report.omega_clamped},
                  {"elapsed_s", report.trace.empty() ? 0.0 : report.trace.back().elapsed_s},
                  {"trace", trace.filename().string()}};
    if (report.omega_estimate) entry["omega_estimate"] = *report.omega_estimate;
    if (report.status == SolveStatus::kDiverged) entry["reason"] = report.reason;
    entries.push_back(std::move(entry));
    result.traces.push_back(trace);
    result.reports.push_back(std::move(report));
  }

  const json summary = {{"instance", run.source},
                        {"family", run.family},
                        {"m", run.problem.m()},
                        {"n", run.problem.n()},
                        {"k", run.problem.k()},
                        {"omega", run.sor.to_string()},
                        {"max_iters", run.max_iters},
                        {"tol", config.tol},
                        {"results", std::move(entries)}};
  result.summary = config.out_dir / "summary.json";
  std::ofstream out = open_output(result.summary);
  out << summary.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + result.summary.string() + "'");
  return result;
}

BenchResult cmd_bench(const RunConfig& config) {
  if (config.repeats < 2) throw InvalidArgument("bench needs repeats >= 2");
  ResolvedRun run = resolve(config);
  ensure_directory(config.out_dir);

  BenchResult result;
  result.family = run.family;
  for (Algorithm a : config.algorithms) {
    if (config.repeats >= 3) solve(run.problem, a, run.sor, run.max_iters, config.tol);
    std::vector<SolveReport> runs;
    runs.reserve(static_cast<std::size_t>(config.repeats));
    for (int r = 0; r < config.repeats; ++r) {
      runs.push_back(solve(run.problem, a, run.sor, run.max_iters, config.tol));
    }
    const std::vector<RuntimeRow> rows = runtime_stats(runs);
    result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  }
  result.csv = config.out_dir / "bench.csv";
  std::ofstream out = open_output(result.csv);
  write_bench_csv(out, result.rows);
  if (!out) throw IoError("failed writing '" + result.csv.string() + "'");
  return result;
}

void cmd_plot(std::span<const fs::path> inputs, const fs::path& out) {
  if (inputs.empty()) throw InvalidArgument("plot needs at least one trace file");
  json series = json::array();
  for (const fs::path& path : inputs) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    in.clear();
    in.seekg(0);

    if (header == kBenchHeader) {
      const std::vector<RuntimeRow> rows = parse_bench_csv(in, path.string());
      for (Algorithm a : kAllAlgorithms) {
        json s = {{"label", to_string(a)}, {"dashed", absorbs_scaling(a)},
                  {"iter", json::array()}, {"grad_norm", json::array()},
                  {"elapsed", json::array()}, {"std", json::array()}};
        for (const RuntimeRow& r : rows) {
          if (r.algorithm != a) continue;
          s["iter"].push_back(r.iter);
          s["grad_norm"].push_back(r.grad_norm);
          s["elapsed"].push_back(r.mean_elapsed_s);
          s["std"].push_back(r.std_elapsed_s);
        }
        if (!s["iter"].empty()) series.push_back(std::move(s));
      }
      continue;
    }

    const std::vector<TraceRow> rows = parse_trace_csv(in, path.string());
    const std::string label = series_label(path);
    json s = {{"label", label}, {"dashed", dashed_label(label)},
              {"iter", json::array()}, {"grad_norm", json::array()},
              {"elapsed", json::array()}, {"std", nullptr}};
    for (const TraceRow& r : rows) {
      s["iter"].push_back(r.iter);
      s["grad_norm"].push_back(r.grad_norm);
      s["elapsed"].push_back(r.elapsed_s);
    }
    series.push_back(std::move(s));
  }

  std::string script(kPlotTemplate);
  replace_all(script, "@OUTPUT@", fs::path(out).replace_extension(".png").filename().string());
  replace_all(script, "@SERIES@", series.dump());
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  std::ofstream file = open_output(out);
  file << script;
  if (!file) throw IoError("failed writing '" + out.string() + "'");
}

}  // namespace opscale::bench
