#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fastron/bench.hpp"

namespace fastron::bench {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError(key + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) fail(where + "." + k, "unknown key");
  }
}

double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

double get_positive(const json& obj, const std::string& where, const char* key, double fallback) {
  const double v = get_number(obj, where, key, fallback);
  if (!(v > 0.0)) fail(where + "." + key, "must be positive");
  return v;
}

std::size_t get_count(const json& obj, const std::string& where, const char* key,
                      std::size_t fallback, std::size_t min_value = 0) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    fail(where + "." + key, "expected an integer");
  }
  const auto i = v.get<std::int64_t>();
  if (i < static_cast<std::int64_t>(min_value)) {
    fail(where + "." + key, "must be >= " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(i);
}

std::vector<double> get_vector(const json& v, const std::string& where, std::size_t size) {
  if (!v.is_array()) fail(where, "expected an array");
  if (size != 0 && v.size() != size) fail(where, "expected " + std::to_string(size) + " values");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(where, "expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Vec3 get_vec3(const json& v, const std::string& where) {
  const auto x = get_vector(v, where, 3);
  return {x[0], x[1], x[2]};
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) fail(where + "." + key, "expected a string");
  return obj.at(key).get<std::string>();
}

Mat3 rotation_from_rpy(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

ConvexBody parse_body(const json& j, const std::string& where) {
  const std::string type = get_string(j, where, "type", "box");
  try {
    if (type == "box") {
      check_keys(j, where, {"type", "center", "half_extents", "rpy"});
      if (!j.contains("center") || !j.contains("half_extents")) {
        fail(where, "box needs center and half_extents");
      }
      const Mat3 r = j.contains("rpy") ? rotation_from_rpy(get_vec3(j.at("rpy"), where + ".rpy"))
                                       : Mat3::Identity();
      return ConvexBody::box(get_vec3(j.at("center"), where + ".center"),
                             get_vec3(j.at("half_extents"), where + ".half_extents"), r);
    }
    if (type == "capsule") {
      check_keys(j, where, {"type", "a", "b", "radius"});
      if (!j.contains("a") || !j.contains("b")) fail(where, "capsule needs a and b");
      return ConvexBody::capsule(get_vec3(j.at("a"), where + ".a"),
                                 get_vec3(j.at("b"), where + ".b"),
                                 get_positive(j, where, "radius", 0.0));
    }
  } catch (const ContractViolation& e) {
    fail(where, e.what());
  }
  fail(where + ".type", "expected \"box\" or \"capsule\"");
}

RobotConfig parse_robot(const json& j) {
  const std::string where = "robot";
  check_keys(j, where, {"type", "rod_length", "radius", "link_shape", "joints"});
  RobotConfig r;
  const std::string type = get_string(j, where, "type", "dof2");
  if (type == "dof2") {
    r.type = RobotConfig::Type::kDof2;
  } else if (type == "dof4") {
    r.type = RobotConfig::Type::kDof4;
  } else if (type == "custom") {
    r.type = RobotConfig::Type::kCustom;
  } else {
    fail(where + ".type", "expected dof2, dof4 or custom");
  }
  r.rod_length = get_positive(j, where, "rod_length", r.rod_length);
  r.radius = get_positive(j, where, "radius", 0.05 * r.rod_length);
  const std::string shape = get_string(j, where, "link_shape", "capsule");
  if (shape == "capsule") {
    r.link_shape = LinkShape::kCapsule;
  } else if (shape == "box") {
    r.link_shape = LinkShape::kBox;
  } else {
    fail(where + ".link_shape", "expected capsule or box");
  }
  if (r.type == RobotConfig::Type::kCustom) {
    if (!j.contains("joints") || !j.at("joints").is_array() || j.at("joints").empty()) {
      fail(where + ".joints", "custom robots need a non-empty joints array");
    }
    std::size_t idx = 0;
    for (const auto& jj : j.at("joints")) {
      const std::string w = where + ".joints[" + std::to_string(idx++) + "]";
      check_keys(jj, w, {"axis", "translation", "rpy", "lower", "upper", "bodies"});
      RevoluteJoint joint;
      if (jj.contains("axis")) joint.axis = get_vec3(jj.at("axis"), w + ".axis").normalized();
      Pose mount = Pose::Identity();
      if (jj.contains("translation")) mount.translate(get_vec3(jj.at("translation"), w));
      if (jj.contains("rpy")) mount.rotate(rotation_from_rpy(get_vec3(jj.at("rpy"), w)));
      joint.mount = mount;
      joint.lower = get_number(jj, w, "lower", -3.141592653589793);
      joint.upper = get_number(jj, w, "upper", 3.141592653589793);
      if (!(joint.lower < joint.upper)) fail(w, "lower must be below upper");
      if (jj.contains("bodies")) {
        std::size_t b = 0;
        for (const auto& body : jj.at("bodies")) {
          joint.bodies.push_back(parse_body(body, w + ".bodies[" + std::to_string(b++) + "]"));
        }
      }
      r.custom_joints.push_back(std::move(joint));
    }
  }
  return r;
}

ObstacleConfig parse_obstacles(const json& j) {
  const std::string where = "obstacles";
  check_keys(j, where, {"count", "count_min", "count_max", "size_min", "size_max",
                        "placement_min", "placement_max", "base_clearance", "fixed", "motion"});
  ObstacleConfig o;
  const std::size_t count = get_count(j, where, "count", o.count_max);
  o.count_min = get_count(j, where, "count_min", count);
  o.count_max = get_count(j, where, "count_max", count);
  if (o.count_min > o.count_max) fail(where + ".count_min", "must not exceed count_max");
  o.size_min = get_positive(j, where, "size_min", o.size_min);
  o.size_max = get_positive(j, where, "size_max", std::max(o.size_max, o.size_min));
  if (o.size_min > o.size_max) fail(where + ".size_min", "must not exceed size_max");
  if (j.contains("placement_min")) o.placement_min = get_vec3(j.at("placement_min"), where);
  if (j.contains("placement_max")) o.placement_max = get_vec3(j.at("placement_max"), where);
  if ((o.placement_max - o.placement_min).minCoeff() < 0.0) {
    fail(where + ".placement_max", "must be >= placement_min on every axis");
  }
  o.base_clearance = get_number(j, where, "base_clearance", o.base_clearance);
  if (o.base_clearance < 0.0) fail(where + ".base_clearance", "must be non-negative");
  if (j.contains("fixed")) {
    if (!j.at("fixed").is_array()) fail(where + ".fixed", "expected an array");
    std::size_t i = 0;
    for (const auto& b : j.at("fixed")) {
      o.fixed.push_back(parse_body(b, where + ".fixed[" + std::to_string(i++) + "]"));
    }
  }
  if (j.contains("motion")) {
    const auto& m = j.at("motion");
    const std::string w = where + ".motion";
    check_keys(m, w, {"mode", "steps", "speed", "teleport_every"});
    const std::string mode = get_string(m, w, "mode", "translate");
    if (mode == "none") {
      o.motion.mode = MotionConfig::Mode::kNone;
    } else if (mode == "translate") {
      o.motion.mode = MotionConfig::Mode::kTranslate;
    } else if (mode == "teleport") {
      o.motion.mode = MotionConfig::Mode::kTeleport;
    } else {
      fail(w + ".mode", "expected none, translate or teleport");
    }
    o.motion.steps = get_count(m, w, "steps", 50, 1);
    o.motion.speed = get_positive(m, w, "speed", o.motion.speed);
    o.motion.teleport_every = get_count(m, w, "teleport_every", o.motion.teleport_every, 1);
  }
  return o;
}

void parse_fastron(const json& j, ScenarioConfig& c) {
  const std::string where = "fastron";
  check_keys(j, where, {"gamma", "beta", "iter_max", "max_support", "initial_samples",
                        "active_max", "kappa", "sigma"});
  c.train.gamma = get_positive(j, where, "gamma", c.train.gamma);
  c.train.beta = get_number(j, where, "beta", c.train.beta);
  if (c.train.beta < 1.0) fail(where + ".beta", "must be >= 1");
  c.train.iter_max = get_count(j, where, "iter_max", c.train.iter_max, 1);
  c.train.max_support = get_count(j, where, "max_support", c.train.max_support, 1);
  c.sampler.initial_samples = get_count(j, where, "initial_samples", c.sampler.initial_samples, 1);
  c.sampler.active_max = get_count(j, where, "active_max", c.sampler.active_max, 1);
  c.sampler.kappa = get_count(j, where, "kappa", c.sampler.kappa);
  c.sampler.sigma = get_number(j, where, "sigma", 0.0);
  if (c.sampler.sigma < 0.0) fail(where + ".sigma", "must be non-negative");
}

Region parse_region(const json& j, const std::string& where, std::size_t dof) {
  check_keys(j, where, {"min", "max"});
  if (!j.contains("min") || !j.contains("max")) fail(where, "region needs min and max");
  Region r{get_vector(j.at("min"), where + ".min", dof), get_vector(j.at("max"), where + ".max", dof)};
  for (std::size_t k = 0; k < dof; ++k) {
    if (!(r.lo[k] >= -1.0 && r.hi[k] <= 1.0 && r.lo[k] <= r.hi[k])) {
      fail(where, "bounds must satisfy -1 <= min <= max <= 1");
    }
  }
  return r;
}

void parse_planner(const json& j, ScenarioConfig& c) {
  const std::string where = "planner";
  check_keys(j, where, {"algorithm", "edge_resolution", "step_size", "goal_bias",
                        "max_iterations", "start_region", "goal_region", "endpoint_attempts"});
  auto& p = c.planner.params;
  const std::string algo = get_string(j, where, "algorithm", "rrt_connect");
  if (algo == "rrt") {
    p.kind = PlannerKind::kRrt;
  } else if (algo == "rrt_connect") {
    p.kind = PlannerKind::kRrtConnect;
  } else {
    fail(where + ".algorithm", "expected rrt or rrt_connect");
  }
  p.edge_resolution = get_positive(j, where, "edge_resolution", p.edge_resolution);
  p.step_size = get_positive(j, where, "step_size", p.step_size);
  p.goal_bias = get_number(j, where, "goal_bias", p.goal_bias);
  if (p.goal_bias < 0.0 || p.goal_bias > 1.0) fail(where + ".goal_bias", "must lie in [0, 1]");
  p.max_iterations = get_count(j, where, "max_iterations", p.max_iterations, 1);
  c.planner.endpoint_attempts = get_count(j, where, "endpoint_attempts", 1000, 1);
  if (j.contains("start_region")) {
    c.planner.start_region = parse_region(j.at("start_region"), where + ".start_region", c.dof());
  }
  if (j.contains("goal_region")) {
    c.planner.goal_region = parse_region(j.at("goal_region"), where + ".goal_region", c.dof());
  }
}

void parse_thresholds(const json& j, Thresholds& t) {
  const std::string where = "thresholds";
  check_keys(j, where, {"min_mean_accuracy", "max_support", "min_query_speedup",
                        "accuracy_after_step", "min_certified_fraction", "exact_oracle_calls",
                        "proxy_not_slower", "trends"});
  if (j.contains("min_mean_accuracy")) t.min_mean_accuracy = get_number(j, where, "min_mean_accuracy", 0);
  if (j.contains("max_support")) t.max_support = get_number(j, where, "max_support", 0);
  if (j.contains("min_query_speedup")) t.min_query_speedup = get_number(j, where, "min_query_speedup", 0);
  if (j.contains("accuracy_after_step")) t.accuracy_after_step = get_count(j, where, "accuracy_after_step", 0);
  if (j.contains("min_certified_fraction")) {
    t.min_certified_fraction = get_number(j, where, "min_certified_fraction", 0);
  }
  for (const char* flag : {"exact_oracle_calls", "proxy_not_slower"}) {
    if (!j.contains(flag)) continue;
    if (!j.at(flag).is_boolean()) fail(where + "." + flag, "expected a boolean");
    (std::string_view(flag) == "exact_oracle_calls" ? t.exact_oracle_calls : t.proxy_not_slower) =
        j.at(flag).get<bool>();
  }
  if (j.contains("trends")) {
    check_keys(j.at("trends"), where + ".trends", {"accuracy", "tpr", "tnr", "support_count"});
    for (const auto& [metric, dir] : j.at("trends").items()) {
      const std::string d = dir.is_string() ? dir.get<std::string>() : "";
      if (d != "non_decreasing" && d != "non_increasing") {
        fail(where + ".trends." + metric, "expected non_decreasing or non_increasing");
      }
      t.trends.emplace_back(metric, d == "non_decreasing" ? 1 : -1);
    }
  }
}

}  // namespace

std::size_t ScenarioConfig::dof() const {
  switch (robot.type) {
    case RobotConfig::Type::kDof2: return 2;
    case RobotConfig::Type::kDof4: return 4;
    case RobotConfig::Type::kCustom: return robot.custom_joints.size();
  }
  return 0;
}

ScenarioConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  check_keys(root, "config", {"robot", "obstacles", "fastron", "planner", "eval", "sweep",
                              "thresholds", "seed", "description"});
  ScenarioConfig c;
  if (root.contains("robot")) c.robot = parse_robot(root.at("robot"));
  if (root.contains("obstacles")) c.obstacles = parse_obstacles(root.at("obstacles"));
  if (c.robot.type == RobotConfig::Type::kDof4) {
    c.train.gamma = 10.0;
    c.sampler.initial_samples = 4000;
  }
  if (root.contains("fastron")) parse_fastron(root.at("fastron"), c);
  if (root.contains("planner")) parse_planner(root.at("planner"), c);
  if (root.contains("eval")) {
    const auto& e = root.at("eval");
    check_keys(e, "eval", {"test_points", "timing_calls", "timing_batch"});
    c.eval.test_points = get_count(e, "eval", "test_points", c.eval.test_points, 1);
    c.eval.timing_calls = get_count(e, "eval", "timing_calls", c.eval.timing_calls, 1);
    c.eval.timing_batch = get_count(e, "eval", "timing_batch", c.eval.timing_batch, 1);
  }
  if (root.contains("sweep")) {
    const auto& s = root.at("sweep");
    check_keys(s, "sweep", {"parameter", "values"});
    SweepConfig sw;
    const std::string param = get_string(s, "sweep", "parameter", "");
    if (param == "beta") {
      sw.parameter = SweepConfig::Parameter::kBeta;
    } else if (param == "gamma") {
      sw.parameter = SweepConfig::Parameter::kGamma;
    } else if (param == "obstacle_count") {
      sw.parameter = SweepConfig::Parameter::kObstacleCount;
    } else {
      fail("sweep.parameter", "expected beta, gamma or obstacle_count");
    }
    if (!s.contains("values")) fail("sweep.values", "required");
    sw.values = get_vector(s.at("values"), "sweep.values", 0);
    if (sw.values.empty()) fail("sweep.values", "must be non-empty");
    for (double v : sw.values) {
      const bool ok = sw.parameter == SweepConfig::Parameter::kBeta    ? v >= 1.0
                      : sw.parameter == SweepConfig::Parameter::kGamma ? v > 0.0
                                                                       : v >= 0.0 && v == std::floor(v);
      if (!ok) fail("sweep.values", "value out of range for the swept parameter");
    }
    c.sweep = std::move(sw);
  }
  if (root.contains("thresholds")) parse_thresholds(root.at("thresholds"), c.thresholds);
  if (root.contains("seed")) c.base_seed = get_count(root, "config", "seed", 0);
  c.train.seed = c.base_seed;
  c.sampler.seed = c.base_seed;
  c.planner.params.seed = c.base_seed;
  if (c.dof() == 0) fail("robot", "robot has no joints");
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace fastron::bench
