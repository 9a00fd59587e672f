#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "altraj/cli_io.hpp"
#include "altraj/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct OptimizeOptions {
  std::string problem_path;
  bool constrained = false;
  std::string samples_path;
  double dt = 0.01;
  std::string report_path;
};

int run_optimize(const OptimizeOptions& opt) {
  using Clock = std::chrono::steady_clock;
  const altraj::ProblemFile problem = altraj::load_problem(opt.problem_path);
  const altraj::ObjectiveConfig objective = problem.objective();
  const altraj::SolverConfig solver = problem.solver();
  const auto protos = problem.prototypes();

  const auto start = Clock::now();
  altraj::SolveReport report = [&]() {
    if (opt.constrained) {
      const auto constraints = problem.constraints();
      const altraj::Trajectory initial =
          altraj::initial_feasible_trajectory(protos, constraints, objective);
      return altraj::optimize_constrained(initial, constraints, objective, solver);
    }
    const Eigen::Matrix<double, Eigen::Dynamic, 3> zero_free =
        Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(altraj::count_free_rows(protos), 3);
    return altraj::optimize_unconstrained(protos, zero_free, objective, solver);
  }();
  const double solve_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();

  std::cout << "objective: " << report.objective_history.back() << "\n"
            << "total duration: " << report.trajectory.total_duration() << " s\n"
            << "iterations: " << report.iterations << " ("
            << (report.termination == altraj::TerminationReason::kThreshold ? "threshold"
                                                                            : "max-iterations")
            << ")\n"
            << "solve time: " << solve_ms << " ms\n";
  if (!report.tight_pieces.empty()) {
    std::cout << "tight pieces:";
    for (int m : report.tight_pieces) std::cout << ' ' << m;
    std::cout << "\n";
  }

  if (!opt.samples_path.empty()) {
    std::ofstream os(opt.samples_path);
    if (!os) throw altraj::ValidationError("cannot write samples file: " + opt.samples_path);
    altraj::write_samples_csv(altraj::dump_samples(report.trajectory, opt.dt), os);
  }
  if (!opt.report_path.empty()) {
    std::ofstream os(opt.report_path);
    if (!os) throw altraj::ValidationError("cannot write report file: " + opt.report_path);
    std::ostringstream history;
    history << "[";
    for (size_t i = 0; i < report.objective_history.size(); ++i) {
      history << (i ? "," : "") << report.objective_history[i];
    }
    history << "]";
    os << "{\n  \"objective\": " << report.objective_history.back()
       << ",\n  \"iterations\": " << report.iterations << ",\n  \"solve_ms\": " << solve_ms
       << ",\n  \"objective_history\": " << history.str() << ",\n  \"trajectory\": "
       << altraj::trajectory_json(report.trajectory) << "\n}\n";
  }
  return kExitOk;
}

int run_check(const std::string& problem_path, const std::string& trajectory_path) {
  const altraj::ProblemFile problem = altraj::load_problem(problem_path);
  const altraj::Trajectory traj = altraj::trajectory_from_json_file(trajectory_path);
  const auto verdicts = altraj::check_trajectory(traj, problem.constraints());
  bool feasible = true;
  for (size_t m = 0; m < verdicts.size(); ++m) {
    std::cout << "piece " << m << ": "
              << (verdicts[m].feasible ? (verdicts[m].tight ? "feasible (tight)" : "feasible")
                                       : "infeasible");
    if (verdicts[m].violated_constraint.has_value()) {
      std::cout << " (constraint " << *verdicts[m].violated_constraint << ")";
    }
    std::cout << "\n";
    feasible = feasible && verdicts[m].feasible;
  }
  std::cout << (feasible ? "trajectory feasible" : "trajectory infeasible") << "\n";
  return feasible ? kExitOk : kExitInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial-temporal piecewise-polynomial trajectory optimizer"};
  app.require_subcommand(1);

  OptimizeOptions opt;
  CLI::App* optimize = app.add_subcommand("optimize", "Solve a problem file");
  optimize->add_option("problem", opt.problem_path, "Problem JSON file")->required();
  optimize->add_flag("--constrained", opt.constrained, "Enforce the problem's constraints");
  optimize->add_option("--out-samples", opt.samples_path, "Write sampled trajectory CSV");
  optimize->add_option("--dt", opt.dt, "Sample spacing in seconds")->check(CLI::PositiveNumber);
  optimize->add_option("--report", opt.report_path, "Write solve report JSON");

  std::string check_problem, check_trajectory_path;
  CLI::App* check = app.add_subcommand("check", "Feasibility-check a trajectory file");
  check->add_option("problem", check_problem, "Problem JSON file (supplies the constraints)")
      ->required();
  check->add_option("trajectory", check_trajectory_path, "Trajectory JSON file")->required();

  std::vector<int> bench_pieces{10, 20, 30, 40, 50, 60};
  int bench_trials = 100;
  std::uint64_t bench_seed = 1;
  bool bench_median3 = false;
  std::string bench_out;
  CLI::App* bench = app.add_subcommand("bench", "Random-walk benchmark harness");
  bench->add_option("--pieces", bench_pieces, "Piece counts to benchmark")->delimiter(',');
  bench->add_option("--trials", bench_trials, "Instances per size")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "Base seed");
  bench->add_flag("--median3", bench_median3, "Report best-of-three timings");
  bench->add_option("--out", bench_out, "Write report JSON");

  int gen_pieces = 10;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "problem.json";
  CLI::App* gen = app.add_subcommand("gen", "Generate a random-walk problem");
  gen->add_option("--pieces", gen_pieces, "Number of pieces")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Output problem file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) return run_optimize(opt);
    if (check->parsed()) return run_check(check_problem, check_trajectory_path);
    if (bench->parsed()) {
      const altraj::BenchmarkReport report =
          altraj::run_benchmark(bench_pieces, bench_trials, bench_seed, bench_median3);
      std::cout << "pieces  trials  fail  uncon ms (sd)        con ms (sd)          cost ratio\n";
      for (const auto& s : report.sizes) {
        std::printf("%-7d %-7d %-5d %8.3f (%7.3f)   %8.3f (%7.3f)   %8.4f\n", s.pieces, s.trials,
                    s.failures, s.unconstrained_mean_ms, s.unconstrained_stddev_ms,
                    s.constrained_mean_ms, s.constrained_stddev_ms, s.mean_cost_ratio);
      }
      if (!bench_out.empty()) {
        std::ofstream os(bench_out);
        if (!os) throw altraj::ValidationError("cannot write report file: " + bench_out);
        os << altraj::benchmark_report_json(report) << "\n";
      }
      return kExitOk;
    }
    if (gen->parsed()) {
      altraj::save_problem(altraj::random_walk_problem(gen_pieces, gen_seed), gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return kExitOk;
    }
  } catch (const altraj::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const altraj::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const altraj::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
