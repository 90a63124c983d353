// opscale: generate operator scaling instances, run the solvers, time them
// and emit plot scripts.
//
// Exit codes: 0 success (diverged solves included), 2 usage error,
// 3 I/O, format or numerical error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "opscale/bench.hpp"
#include "opscale/errors.hpp"

namespace {

namespace fs = std::filesystem;
using namespace opscale;
using namespace opscale::bench;

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

struct InstanceOptions {
  std::optional<std::string> family;
  std::optional<Index> n;
  std::optional<Index> k;
  std::optional<double> kappa;
  std::optional<std::uint64_t> seed;
  bool extreme = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--n", n, "dimension n");
    cmd.add_option("--k", k, "number of matrices / frame vectors");
    cmd.add_option("--kappa", kappa, "condition number of the frame factor");
    cmd.add_option("--seed", seed, "random seed");
    cmd.add_flag("--extreme", extreme, "frame family: replace A_1 by e_1 e_1^T");
  }

  std::pair<Family, FamilyParams> resolve() const {
    Family f = parse_family(*family);
    if (extreme) {
      if (f == Family::kHilbert) throw InvalidArgument("--extreme applies to frame families only");
      f = Family::kFrameExtreme;
    }
    FamilyParams params = default_params(f);
    if (n) params.n = *n;
    if (k) params.k = *k;
    if (kappa) params.kappa = *kappa;
    if (seed) params.seed = *seed;
    return {f, params};
  }
};

struct RunOptions {
  InstanceOptions instance_opts;
  std::optional<std::string> instance;
  std::vector<std::string> algos;
  std::optional<std::string> omega;
  std::optional<int> max_iters;
  double tol = kDefaultTol;
  int repeats = 1;
  std::string out = ".";

  void add_to(CLI::App& cmd) {
    auto* inst = cmd.add_option("--instance", instance, "problem file (JSON)");
    auto* fam = cmd.add_option("--family", instance_opts.family,
                               "generate instead: hilbert | frame | frame-extreme");
    inst->excludes(fam);
    instance_opts.add_to(cmd);
    cmd.add_option("--algo", algos,
                   "fpi | osi | fpi-chol-sor | osi-chol-sor | fpi-geo-sor | osi-geo-sor "
                   "(repeatable, default all)");
    cmd.add_option("--omega", omega, "auto:<p> | fixed:<w> | off (default auto:5 or auto:20)");
    cmd.add_option("--max-iters", max_iters, "iteration budget (default 100 or 200)");
    cmd.add_option("--tol", tol, "stop once the grad norm is at most tol")->capture_default_str();
    cmd.add_option("--out", out, "output directory")->capture_default_str();
  }

  RunConfig config() const {
    RunConfig c;
    if (instance) {
      c.instance = fs::path(*instance);
    } else if (instance_opts.family) {
      auto [f, params] = instance_opts.resolve();
      c.family = f;
      c.params = params;
    } else {
      throw InvalidArgument("give --instance or --family");
    }
    if (algos.empty()) {
      c.algorithms.assign(kAllAlgorithms.begin(), kAllAlgorithms.end());
    } else {
      for (const std::string& a : algos) c.algorithms.push_back(parse_algorithm(a));
    }
    if (omega) c.sor = SorConfig::parse(*omega);
    c.max_iters = max_iters;
    c.tol = tol;
    c.repeats = repeats;
    c.out_dir = out;
    c.validate();
    return c;
  }
};

void print_solve(const SolveResult& r) {
  std::cout << "family " << r.family << "\n";
  for (std::size_t i = 0; i < r.reports.size(); ++i) {
    const SolveReport& s = r.reports[i];
    std::cout << to_string(s.algorithm) << ": " << to_string(s.status) << " after "
              << s.iterations() << " iterations, grad norm " << s.final_grad_norm();
    if (s.omega_estimate) std::cout << ", omega " << *s.omega_estimate;
    if (s.status == SolveStatus::kDiverged) std::cout << " (" << s.reason << ")";
    std::cout << " -> " << r.traces[i].string() << "\n";
  }
  std::cout << "summary -> " << r.summary.string() << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Operator scaling by Sinkhorn-type iterations with overrelaxation", "opscale"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a problem file");
  std::string gen_family;
  InstanceOptions gen_opts;
  std::string gen_out;
  gen->add_option("family", gen_family, "hilbert | frame | frame-extreme")->required();
  gen_opts.add_to(*gen);
  gen->add_option("--out", gen_out, "output JSON file")->required();

  auto* solve_cmd = app.add_subcommand("solve", "run solvers, write traces and a summary");
  RunOptions solve_opts;
  solve_opts.add_to(*solve_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "time repeated solves");
  RunOptions bench_opts;
  bench_opts.repeats = 10;
  bench_opts.add_to(*bench_cmd);
  bench_cmd->add_option("--repeats", bench_opts.repeats, "timed runs per algorithm (>= 2)")
      ->capture_default_str();

  auto* plot = app.add_subcommand("plot", "write a matplotlib script for trace or bench CSVs");
  std::vector<std::string> plot_inputs;
  std::string plot_out;
  plot->add_option("files", plot_inputs, "trace_<algo>.csv or bench.csv files")->required();
  plot->add_option("--out", plot_out, "output script (.py)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      gen_opts.family = gen_family;
      auto [f, params] = gen_opts.resolve();
      const GenResult r = cmd_gen(f, params, gen_out);
      std::cout << "wrote " << r.path.string() << " (m=" << r.problem.m() << ", n=" << r.problem.n()
                << ", k=" << r.problem.k() << "), grad norm at identity " << r.grad_norm << "\n";
    } else if (solve_cmd->parsed()) {
      print_solve(cmd_solve(solve_opts.config()));
    } else if (bench_cmd->parsed()) {
      const RunConfig c = bench_opts.config();
      if (c.repeats < 2) throw InvalidArgument("--repeats must be at least 2");
      const BenchResult r = cmd_bench(c);
      std::cout << "family " << r.family << ", " << r.rows.size() << " rows -> " << r.csv.string()
                << "\n";
    } else if (plot->parsed()) {
      std::vector<fs::path> inputs(plot_inputs.begin(), plot_inputs.end());
      cmd_plot(inputs, plot_out);
      std::cout << "wrote " << plot_out << "\n";
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "opscale: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "opscale: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
