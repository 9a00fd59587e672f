#include "altraj/cli_io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "altraj/errors.hpp"

namespace altraj {

namespace {

using nlohmann::json;

Eigen::Vector3d vec3_from_json(const json& j, const char* context) {
  if (!j.is_array() || j.size() != 3) {
    throw ValidationError(std::string(context) + ": expected an array of 3 numbers");
  }
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<size_t>(i)].is_number()) {
      throw ValidationError(std::string(context) + ": expected an array of 3 numbers");
    }
    v[i] = j[static_cast<size_t>(i)].get<double>();
  }
  return v;
}

json vec3_to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

// splitmix64; keeps the stream independent of the standard library's
// distribution implementations.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }
};

}  // namespace

ObjectiveConfig ProblemFile::objective() const {
  ObjectiveConfig config;
  config.rho = rho;
  config.d_min = d_min;
  config.d_max = d_max;
  config.weights = weights;
  config.order = order;
  return config;
}

SolverConfig ProblemFile::solver() const {
  SolverConfig solver;
  solver.max_iterations = max_iterations;
  solver.stop_threshold = stop_threshold;
  solver.relative_stop = stop_mode == "relative";
  return solver;
}

std::vector<ConstraintSpec> ProblemFile::constraints() const {
  std::vector<ConstraintSpec> specs;
  if (v_max.has_value()) specs.push_back(builtin_speed_constraint(*v_max));
  if (a_max.has_value()) specs.push_back(builtin_accel_constraint(*a_max));
  for (const Obstacle& o : obstacles) {
    specs.push_back(builtin_obstacle_constraint(o.center, o.r_safe));
  }
  return specs;
}

std::vector<WaypointDerivatives> ProblemFile::prototypes() const {
  const int S = (order + 1) / 2;
  std::vector<WaypointDerivatives> protos;
  protos.reserve(waypoints.size());
  for (size_t w = 0; w < waypoints.size(); ++w) {
    WaypointDerivatives p = WaypointDerivatives::zero(S);
    p.values.row(0) = waypoints[w].transpose();
    if (w == 0 || w + 1 == waypoints.size()) {
      p.fixed.assign(static_cast<size_t>(S), true);  // endpoint derivatives pinned (zero)
    }
    protos.push_back(std::move(p));
  }
  for (const Override& o : overrides) {
    if (o.waypoint < 0 || o.waypoint >= static_cast<int>(protos.size()) ||
        o.derivative_order < 0 || o.derivative_order >= S) {
      throw ValidationError("problem: override indices out of range");
    }
    auto& p = protos[static_cast<size_t>(o.waypoint)];
    p.fixed[static_cast<size_t>(o.derivative_order)] = true;
    p.values.row(o.derivative_order) = o.value.transpose();
  }
  return protos;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("problem parse error in " + path + ": " + e.what());
  }

  ProblemFile p;
  std::vector<std::string> violations;
  try {
    if (j.contains("format_version")) p.format_version = j["format_version"].get<int>();
    if (p.format_version != 1) violations.push_back("unsupported format_version");
    if (j.contains("order")) p.order = j["order"].get<int>();
    if (p.order < 3 || p.order % 2 == 0) violations.push_back("order must be odd and >= 3");
    if (j.contains("objective")) {
      const json& o = j["objective"];
      if (o.contains("rho")) p.rho = o["rho"].get<double>();
      if (o.contains("d_min")) p.d_min = o["d_min"].get<int>();
      if (o.contains("d_max")) p.d_max = o["d_max"].get<int>();
      if (o.contains("weights")) p.weights = o["weights"].get<std::vector<double>>();
    }
    if (j.contains("constraints")) {
      const json& c = j["constraints"];
      p.v_max.reset();
      p.a_max.reset();
      if (c.contains("v_max")) p.v_max = c["v_max"].get<double>();
      if (c.contains("a_max")) p.a_max = c["a_max"].get<double>();
      if (c.contains("obstacles")) {
        for (const json& ob : c["obstacles"]) {
          ProblemFile::Obstacle obstacle;
          obstacle.center = vec3_from_json(ob.at("center"), "obstacle center");
          obstacle.r_safe = ob.at("r_safe").get<double>();
          p.obstacles.push_back(obstacle);
        }
      }
    }
    if (!j.contains("waypoints")) {
      violations.push_back("missing required field: waypoints");
    } else {
      for (const json& w : j["waypoints"]) {
        p.waypoints.push_back(vec3_from_json(w, "waypoint"));
      }
      if (p.waypoints.size() < 2) violations.push_back("need at least 2 waypoints");
    }
    if (j.contains("fixed_derivatives")) {
      for (const json& o : j["fixed_derivatives"]) {
        ProblemFile::Override ov;
        ov.waypoint = o.at("waypoint").get<int>();
        ov.derivative_order = o.at("order").get<int>();
        ov.value = vec3_from_json(o.at("value"), "fixed derivative value");
        p.overrides.push_back(ov);
      }
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      if (s.contains("max_iterations")) p.max_iterations = s["max_iterations"].get<int>();
      if (s.contains("stop_threshold")) p.stop_threshold = s["stop_threshold"].get<double>();
      if (s.contains("mode")) p.stop_mode = s["mode"].get<std::string>();
      if (p.stop_mode != "absolute" && p.stop_mode != "relative") {
        violations.push_back("solver.mode must be \"absolute\" or \"relative\"");
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError("problem field error in " + path + ": " + e.what());
  }
  if (p.v_max.has_value() && !(*p.v_max > 0.0)) violations.push_back("v_max must be positive");
  if (p.a_max.has_value() && !(*p.a_max > 0.0)) violations.push_back("a_max must be positive");
  if (!violations.empty()) {
    std::string message = "problem validation failed:";
    for (const auto& v : violations) message += "\n  - " + v;
    throw ValidationError(message);
  }
  try {
    p.objective().validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("problem validation failed: ") + e.what());
  }
  return p;
}

void save_problem(const ProblemFile& p, const std::string& path) {
  json j;
  j["format_version"] = p.format_version;
  j["order"] = p.order;
  j["objective"] = {{"rho", p.rho}, {"d_min", p.d_min}, {"d_max", p.d_max}, {"weights", p.weights}};
  json constraints = json::object();
  if (p.v_max.has_value()) constraints["v_max"] = *p.v_max;
  if (p.a_max.has_value()) constraints["a_max"] = *p.a_max;
  if (!p.obstacles.empty()) {
    json obstacles = json::array();
    for (const auto& o : p.obstacles) {
      obstacles.push_back({{"center", vec3_to_json(o.center)}, {"r_safe", o.r_safe}});
    }
    constraints["obstacles"] = obstacles;
  }
  j["constraints"] = constraints;
  json waypoints = json::array();
  for (const auto& w : p.waypoints) waypoints.push_back(vec3_to_json(w));
  j["waypoints"] = waypoints;
  if (!p.overrides.empty()) {
    json overrides = json::array();
    for (const auto& o : p.overrides) {
      overrides.push_back({{"waypoint", o.waypoint},
                           {"order", o.derivative_order},
                           {"value", vec3_to_json(o.value)}});
    }
    j["fixed_derivatives"] = overrides;
  }
  j["solver"] = {{"max_iterations", p.max_iterations},
                 {"stop_threshold", p.stop_threshold},
                 {"mode", p.stop_mode}};
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write problem file: " + path);
  out << j.dump(2) << "\n";
}

std::vector<SampleRow> dump_samples(const Trajectory& traj, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dump_samples: dt must be positive");
  const double total = traj.total_duration();
  std::vector<SampleRow> rows;
  auto sample_at = [&](double t) {
    SampleRow row;
    row.t = t;
    row.position = traj.evaluate(t, 0);
    row.velocity = traj.evaluate(t, 1);
    row.acceleration = traj.evaluate(t, 2);
    return row;
  };
  const double t_end_guard = total - 1e-12 * std::max(total, 1.0);
  for (double t = 0.0; t < t_end_guard; t += dt) {
    rows.push_back(sample_at(t));
    if (rows.size() > 50'000'000) throw ValidationError("dump_samples: dt too small");
  }
  rows.push_back(sample_at(total));
  return rows;
}

void write_samples_csv(const std::vector<SampleRow>& rows, std::ostream& os) {
  os << "t,px,py,pz,vx,vy,vz,ax,ay,az\n";
  os.precision(12);
  for (const SampleRow& r : rows) {
    os << r.t << ',' << r.position.x() << ',' << r.position.y() << ',' << r.position.z() << ','
       << r.velocity.x() << ',' << r.velocity.y() << ',' << r.velocity.z() << ','
       << r.acceleration.x() << ',' << r.acceleration.y() << ',' << r.acceleration.z() << '\n';
  }
}

ProblemFile random_walk_problem(int num_pieces, std::uint64_t seed) {
  if (num_pieces < 1) throw ValidationError("random_walk_problem: need at least one piece");
  ProblemFile p;  // benchmark defaults
  SplitMix64 rng(seed);
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  p.waypoints.push_back(position);
  for (int m = 0; m < num_pieces; ++m) {
    for (int ax = 0; ax < 3; ++ax) position[ax] += rng.uniform(-3.0, 8.0);
    p.waypoints.push_back(position);
  }
  p.stop_mode = "relative";
  p.stop_threshold = 0.001;
  return p;
}

namespace {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<int>& piece_counts, int trials,
                              std::uint64_t seed, bool median_of_three) {
  if (trials < 1) throw ValidationError("benchmark: trials must be positive");
  for (int m : piece_counts) {
    if (m < 1) throw ValidationError("benchmark: piece counts must be positive");
  }
  BenchmarkReport report;
  report.seed = seed;
  using Clock = std::chrono::steady_clock;
  const int repeats = median_of_three ? 3 : 1;

  for (int pieces : piece_counts) {
    BenchmarkSizeResult result;
    result.pieces = pieces;
    result.trials = trials;
    std::vector<double> times_u, times_c, ratios;
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t instance_seed =
          seed ^ (0x51ed27f0a4cd3c85ULL * static_cast<std::uint64_t>(pieces)) ^
          static_cast<std::uint64_t>(trial) * 0x2545f4914f6cdd1dULL;
      const ProblemFile problem = random_walk_problem(pieces, instance_seed);
      const ObjectiveConfig objective = problem.objective();
      const SolverConfig solver = problem.solver();
      const auto protos = problem.prototypes();
      const auto constraints = problem.constraints();
      try {
        const Eigen::Matrix<double, Eigen::Dynamic, 3> zero_free =
            Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(count_free_rows(protos), 3);
        double best_u = 0.0, cost_u = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
          const auto start = Clock::now();
          const SolveReport r = optimize_unconstrained(protos, zero_free, objective, solver);
          const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
          if (rep == 0 || ms < best_u) best_u = ms;
          cost_u = r.objective_history.back();
        }
        double best_c = 0.0, cost_c = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
          const auto start = Clock::now();
          const Trajectory initial = initial_feasible_trajectory(protos, constraints, objective);
          const SolveReport r = optimize_constrained(initial, constraints, objective, solver);
          const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
          if (rep == 0 || ms < best_c) best_c = ms;
          cost_c = r.objective_history.back();
        }
        times_u.push_back(best_u);
        times_c.push_back(best_c);
        ratios.push_back(cost_c / cost_u);
      } catch (const std::exception&) {
        ++result.failures;
      }
    }
    result.unconstrained_mean_ms = mean_of(times_u);
    result.unconstrained_stddev_ms = stddev_of(times_u);
    result.constrained_mean_ms = mean_of(times_c);
    result.constrained_stddev_ms = stddev_of(times_c);
    result.mean_cost_ratio = mean_of(ratios);
    report.sizes.push_back(result);
  }
  return report;
}

std::string benchmark_report_json(const BenchmarkReport& report) {
  json j;
  j["seed"] = report.seed;
  j["sizes"] = json::array();
  for (const auto& s : report.sizes) {
    j["sizes"].push_back({{"pieces", s.pieces},
                          {"trials", s.trials},
                          {"failures", s.failures},
                          {"unconstrained_mean_ms", s.unconstrained_mean_ms},
                          {"unconstrained_stddev_ms", s.unconstrained_stddev_ms},
                          {"constrained_mean_ms", s.constrained_mean_ms},
                          {"constrained_stddev_ms", s.constrained_stddev_ms},
                          {"unconstrained_normalized_cost", s.unconstrained_normalized_cost},
                          {"mean_cost_ratio", s.mean_cost_ratio}});
  }
  return j.dump(2);
}

std::string trajectory_json(const Trajectory& traj) {
  json j;
  j["format_version"] = 1;
  j["order"] = traj.order();
  j["durations"] = traj.durations();
  j["waypoints"] = json::array();
  for (const auto& w : traj.waypoints()) {
    json rows = json::array();
    for (int r = 0; r < w.values.rows(); ++r) {
      rows.push_back(json::array({w.values(r, 0), w.values(r, 1), w.values(r, 2)}));
    }
    json fixed = json::array();
    for (bool f : w.fixed) fixed.push_back(f);
    j["waypoints"].push_back({{"values", rows}, {"fixed", fixed}});
  }
  return j.dump(2);
}

Trajectory trajectory_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trajectory file: " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("trajectory parse error in " + path + ": " + e.what());
  }
  const json& j = root.contains("trajectory") ? root["trajectory"] : root;
  try {
    const auto durations = j.at("durations").get<std::vector<double>>();
    std::vector<WaypointDerivatives> waypoints;
    for (const json& w : j.at("waypoints")) {
      const json& rows = w.at("values");
      WaypointDerivatives wp;
      wp.values.resize(static_cast<Eigen::Index>(rows.size()), 3);
      for (size_t r = 0; r < rows.size(); ++r) {
        const Eigen::Vector3d v = vec3_from_json(rows[r], "waypoint derivative row");
        wp.values.row(static_cast<Eigen::Index>(r)) = v.transpose();
      }
      if (w.contains("fixed")) {
        wp.fixed = w["fixed"].get<std::vector<bool>>();
      } else {
        wp.fixed.assign(rows.size(), true);
      }
      waypoints.push_back(std::move(wp));
    }
    return Trajectory(std::move(waypoints), durations);
  } catch (const json::exception& e) {
    throw ValidationError("trajectory field error in " + path + ": " + e.what());
  }
}

}  // namespace altraj
