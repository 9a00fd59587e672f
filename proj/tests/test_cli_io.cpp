#include "altraj/cli_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "altraj/errors.hpp"
#include "doctest.h"

namespace {

using altraj::ProblemFile;
using altraj::Trajectory;
using altraj::ValidationError;
using altraj::WaypointDerivatives;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  os << content;
}

}  // namespace

TEST_CASE("load_problem applies benchmark defaults") {
  const std::string path = temp_path("altraj_minimal.json");
  write_file(path, R"({"waypoints": [[0,0,0],[1,2,3]]})");
  const ProblemFile p = altraj::load_problem(path);
  CHECK(p.order == 5);
  CHECK(p.rho == 512.0);
  CHECK(p.d_min == 3);
  CHECK(p.d_max == 3);
  CHECK(p.weights == std::vector<double>{1.0});
  REQUIRE(p.v_max.has_value());
  REQUIRE(p.a_max.has_value());
  CHECK(*p.v_max == 5.0);
  CHECK(*p.a_max == 3.5);
  CHECK(p.waypoints.size() == 2);

  const auto protos = p.prototypes();
  CHECK(protos.size() == 2);
  CHECK(altraj::count_free_rows(protos) == 0);  // endpoints fully pinned
  std::remove(path.c_str());
}

TEST_CASE("load_problem validation errors") {
  const std::string path = temp_path("altraj_bad.json");
  write_file(path, R"({"order": 5})");
  CHECK_THROWS_AS(altraj::load_problem(path), ValidationError);
  write_file(path, R"({"waypoints": [[0,0,0]]})");
  CHECK_THROWS_AS(altraj::load_problem(path), ValidationError);
  write_file(path, R"({"waypoints": [[0,0,0],[1,0,0]], "order": 4})");
  CHECK_THROWS_AS(altraj::load_problem(path), ValidationError);
  write_file(path, R"({not json)");
  CHECK_THROWS_AS(altraj::load_problem(path), ValidationError);
  CHECK_THROWS_AS(altraj::load_problem(temp_path("altraj_missing_file.json")),
                  ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("problem save/load round trip preserves the bounds bit-exactly") {
  ProblemFile p;
  p.waypoints = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1.5, -2.25, 3.125)};
  p.v_max = 5.0;
  p.a_max = 3.5;
  ProblemFile::Obstacle obstacle;
  obstacle.center = Eigen::Vector3d(0.5, 0.25, -1.0);
  obstacle.r_safe = 0.125;
  p.obstacles.push_back(obstacle);
  ProblemFile::Override ov;
  ov.waypoint = 1;
  ov.derivative_order = 1;
  ov.value = Eigen::Vector3d(0.5, 0, 0);
  p.overrides.push_back(ov);

  const std::string path = temp_path("altraj_roundtrip.json");
  altraj::save_problem(p, path);
  const ProblemFile q = altraj::load_problem(path);
  CHECK(*q.v_max == *p.v_max);
  CHECK(*q.a_max == *p.a_max);
  CHECK(q.waypoints.size() == p.waypoints.size());
  for (size_t i = 0; i < p.waypoints.size(); ++i) {
    CHECK((q.waypoints[i] - p.waypoints[i]).norm() == 0.0);
  }
  REQUIRE(q.obstacles.size() == 1);
  CHECK(q.obstacles[0].r_safe == 0.125);
  REQUIRE(q.overrides.size() == 1);
  CHECK(q.overrides[0].waypoint == 1);
  std::remove(path.c_str());

  // the override pins the end velocity in the prototypes
  const auto protos = q.prototypes();
  CHECK(protos[1].fixed[1]);
  CHECK(protos[1].values(1, 0) == 0.5);
}

TEST_CASE("dump_samples") {
  std::vector<WaypointDerivatives> wps;
  for (int w = 0; w < 2; ++w) {
    WaypointDerivatives wp = WaypointDerivatives::zero(3);
    wp.fixed.assign(3, true);
    wp.values(0, 0) = static_cast<double>(w);
    wps.push_back(wp);
  }
  const Trajectory traj(wps, {1.0});

  const auto rows = altraj::dump_samples(traj, 0.25);
  REQUIRE(rows.size() == 5);
  CHECK(rows.front().t == 0.0);
  CHECK(rows.back().t == 1.0);
  CHECK(rows.back().position.x() == doctest::Approx(1.0));
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].t > rows[i - 1].t);

  // velocities match finite differences of positions to O(dt^2)
  const auto fine = altraj::dump_samples(traj, 0.001);
  for (size_t i = 1; i + 1 < fine.size(); i += 100) {
    const Eigen::Vector3d fd =
        (fine[i + 1].position - fine[i - 1].position) / (fine[i + 1].t - fine[i - 1].t);
    CHECK((fd - fine[i].velocity).norm() < 1e-4);
  }

  CHECK_THROWS_AS(altraj::dump_samples(traj, 0.0), ValidationError);

  std::ostringstream os;
  altraj::write_samples_csv(rows, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,px,py,pz,vx,vy,vz,ax,ay,az\n", 0) == 0);
}

TEST_CASE("samples of a constrained solve respect the bounds") {
  const ProblemFile problem = altraj::random_walk_problem(4, 99);
  const auto protos = problem.prototypes();
  const auto constraints = problem.constraints();
  const auto config = problem.objective();
  const Trajectory initial = altraj::initial_feasible_trajectory(protos, constraints, config);
  const auto result = altraj::optimize_constrained(initial, constraints, config, problem.solver());
  double peak_speed = 0.0, peak_accel = 0.0;
  for (const auto& row : altraj::dump_samples(result.trajectory, 0.002)) {
    peak_speed = std::max(peak_speed, row.velocity.norm());
    peak_accel = std::max(peak_accel, row.acceleration.norm());
  }
  CHECK(peak_speed <= *problem.v_max + 1e-6);
  CHECK(peak_accel <= *problem.a_max + 1e-6);
}

TEST_CASE("random_walk_problem is deterministic with uniform [-3, 8] steps") {
  const ProblemFile a = altraj::random_walk_problem(60, 42);
  const ProblemFile b = altraj::random_walk_problem(60, 42);
  REQUIRE(a.waypoints.size() == 61);
  for (size_t i = 0; i < a.waypoints.size(); ++i) {
    CHECK((a.waypoints[i] - b.waypoints[i]).norm() == 0.0);
  }
  const ProblemFile c = altraj::random_walk_problem(60, 43);
  CHECK((a.waypoints.back() - c.waypoints.back()).norm() > 0.0);

  // per-axis step statistics: mean 2.5 over a large sample
  double sum = 0.0;
  long count = 0;
  for (int seed = 0; seed < 400; ++seed) {
    const ProblemFile p = altraj::random_walk_problem(100, 1000 + seed);
    for (size_t w = 1; w < p.waypoints.size(); ++w) {
      const Eigen::Vector3d step = p.waypoints[w] - p.waypoints[w - 1];
      sum += step.sum();
      count += 3;
    }
  }
  CHECK(sum / static_cast<double>(count) == doctest::Approx(2.5).epsilon(0.02));
}

TEST_CASE("trajectory json round trip") {
  std::vector<WaypointDerivatives> wps;
  for (int w = 0; w < 3; ++w) {
    WaypointDerivatives wp = WaypointDerivatives::zero(3);
    wp.fixed.assign(3, true);
    wp.values(0, 0) = static_cast<double>(w);
    wp.values(1, 1) = 0.25 * w;
    wps.push_back(wp);
  }
  const Trajectory traj(wps, {1.0, 2.0});
  const std::string path = temp_path("altraj_traj.json");
  write_file(path, altraj::trajectory_json(traj));
  const Trajectory loaded = altraj::trajectory_from_json_file(path);
  CHECK(loaded.piece_count() == 2);
  CHECK(loaded.order() == 5);
  CHECK(loaded.durations() == traj.durations());
  for (int w = 0; w < 3; ++w) {
    CHECK((loaded.waypoints()[static_cast<size_t>(w)].values -
           traj.waypoints()[static_cast<size_t>(w)].values)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  std::remove(path.c_str());
}

TEST_CASE("benchmark harness on a tiny workload") {
  const auto report = altraj::run_benchmark({3, 5}, 3, 7);
  REQUIRE(report.sizes.size() == 2);
  for (const auto& s : report.sizes) {
    CHECK(s.trials == 3);
    CHECK(s.failures == 0);
    CHECK(s.unconstrained_normalized_cost == 1.0);
    CHECK(s.mean_cost_ratio >= 1.0 - 1e-9);
    CHECK(s.unconstrained_mean_ms > 0.0);
    CHECK(s.constrained_mean_ms > 0.0);
  }
  const std::string json = altraj::benchmark_report_json(report);
  CHECK(json.find("mean_cost_ratio") != std::string::npos);
}
