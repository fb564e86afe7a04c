// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fastron/bench.hpp"
#include "fastron/geometry.hpp"
#include "fastron/kernel.hpp"
#include "fastron/learner.hpp"
#include "fastron/random.hpp"
#include "test_util.hpp"

using namespace fastron;
using namespace fastron::bench;
using namespace fastron::testing;
namespace fs = std::filesystem;

namespace {

int g_failed = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ScenarioConfig config(const char* name) { return load_config(fs::path(FASTRON_CONFIG_DIR) / name); }

std::vector<std::uint64_t> seeds(const ScenarioConfig& c, std::size_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = c.base_seed + i;
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<MetricsRecord>& rs, std::optional<double> MetricsRecord::*field) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& r : rs) {
    if (r.*field) {
      s += *(r.*field);
      ++n;
    }
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

double speed_ratio(const std::vector<MetricsRecord>& rs) {
  std::vector<double> p, o;
  for (const auto& r : rs) {
    p.push_back(static_cast<double>(*r.query_time_proxy_ns));
    o.push_back(static_cast<double>(*r.query_time_oracle_ns));
  }
  return median(o) / median(p);
}

// Criteria 1 and 2 share their training runs.
void convergence_and_descent() {
  Rng rng(20240601);
  const std::size_t sizes[] = {50, 200, 500};
  std::size_t converged = 0, within_bound = 0, steps = 0, short_steps = 0;
  double worst_drop = 1e300;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 2 + static_cast<std::size_t>(t % 3);
    const std::size_t n = sizes[(t / 3) % 3];
    const double beta = (t / 9) % 2 ? 100.0 : 1.0;
    const PointSet ps = random_points(n, d, rng);
    const auto y = random_labels(n, rng);
    TrainParams p;
    p.gamma = d == 4 ? 10.0 : 30.0;
    p.beta = beta;
    p.iter_max = 10000000;
    p.max_support = n;
    p.record_loss = true;
    FastronModel m(d, p);
    m.set_data(ps, y);
    const TrainReport r = m.train();

    bool ok = r.final_misclassified == 0;
    for (std::size_t i = 0; i < n; ++i) ok = ok && m.margin(i) > 0.0;
    converged += ok;
    within_bound += static_cast<double>(r.corrections) <= iteration_bound(ps, y, p.gamma, beta);

    for (std::size_t k = 0; k < r.steps.size(); ++k) {
      if (r.steps[k] != StepKind::kCorrection) continue;
      const double drop = r.loss_trace[k] - r.loss_trace[k + 1];
      worst_drop = std::min(worst_drop, drop);
      ++steps;
      short_steps += drop < 0.5 - 1e-9;
    }
  }
  report(1, converged == 100 && within_bound == 100,
         "training converges within the y^T B K^-1 B y correction bound",
         fmt("%.0f/100 converged, %.0f/100 within bound", static_cast<double>(converged),
             static_cast<double>(within_bound)));
  report(2, short_steps == 0 && steps > 0, "every correction lowers the loss by at least 1/2",
         fmt("%.0f corrections, smallest drop %.6f", static_cast<double>(steps), worst_drop));
}

void optimality_anchor() {
  Rng rng(77);
  double margin_err = 0.0, loss_err = 0.0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 19);
    const std::size_t d = 2 + static_cast<std::size_t>(t % 3);
    const double beta = t % 2 ? 100.0 : 1.0;
    const PointSet ps = random_points(n, d, rng);
    const auto y = random_labels(n, rng);
    TrainParams p;
    p.beta = beta;
    FastronModel m(d, p);
    m.set_data(ps, y);
    const Eigen::VectorXd by = biased_targets(y, beta);
    const Eigen::VectorXd a = eager_gram(ps, p.gamma).ldlt().solve(by);
    m.set_weights(std::vector<double>(a.data(), a.data() + a.size()));
    for (std::size_t i = 0; i < n; ++i) margin_err = std::max(margin_err, std::abs(m.margin(i) - m.bias(i)));
    loss_err = std::max(loss_err, std::abs(m.loss() + 0.5 * by.dot(a)));
  }
  report(3, margin_err <= 1e-9 && loss_err <= 1e-9, "alpha = K^-1 B y gives margins b_i and the loss lower bound",
         fmt("max margin error %.3g, max loss error %.3g", margin_err, loss_err));
}

void kernel_bound() {
  std::size_t bad = 0;
  for (int k = 0; k < 10000; ++k) {
    const double u = 100.0 * k / 9999.0;
    // u = gamma r^2 with gamma = 1, r^2 = u
    const std::vector<double> a{0.0}, b{std::sqrt(u)};
    bad += rq_kernel(a, b, 1.0) < gaussian_kernel(a, b, 1.0);
    bad += std::pow(1.0 + u / 2.0, -2.0) < std::exp(-u);
  }
  const std::vector<double> x{0.25, -0.5, 0.75};
  const bool ones = rq_kernel(x, x, 30.0) == 1.0 && gaussian_kernel(x, x, 30.0) == 1.0;
  report(4, bad == 0 && ones, "(1+u/2)^-2 >= exp(-u) on [0, 100] and both kernels are 1 at u = 0",
         fmt("%.0f violations on 10^4 grid points", static_cast<double>(bad)));
}

double sat_gap(const ConvexBody& a, const ConvexBody& b) {
  std::vector<Vec3> axes;
  for (int i = 0; i < 3; ++i) axes.push_back(a.rotation.col(i));
  for (int i = 0; i < 3; ++i) axes.push_back(b.rotation.col(i));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec3 c = a.rotation.col(i).cross(b.rotation.col(j));
      if (c.norm() > 1e-9) axes.push_back(c.normalized());
    }
  double best = -1e300;
  const Vec3 t = b.center - a.center;
  for (const Vec3& n : axes) {
    double ra = 0.0, rb = 0.0;
    for (int i = 0; i < 3; ++i) {
      ra += a.half_extents[i] * std::abs(a.rotation.col(i).dot(n));
      rb += b.half_extents[i] * std::abs(b.rotation.col(i).dot(n));
    }
    best = std::max(best, std::abs(t.dot(n)) - ra - rb);
  }
  return best;
}

void gjk_vs_sat() {
  Rng rng(5150);
  auto random_box = [&rng] {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    const Vec3 c(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5));
    const Vec3 h(rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0));
    return ConvexBody::box(c, h, q.normalized().toRotationMatrix());
  };
  std::size_t checked = 0, disagree = 0, hits = 0;
  while (checked < 100000) {
    const ConvexBody a = random_box();
    const ConvexBody b = random_box();
    const double gap = sat_gap(a, b);
    if (std::abs(gap) < 1e-6) continue;
    ++checked;
    hits += gap < 0.0;
    disagree += gjk_intersect(a, b) != (gap < 0.0);
  }
  report(5, disagree == 0, "GJK agrees with the separating axis test on oriented boxes",
         fmt("%.0f pairs, %.0f overlapping, %.0f disagreements", static_cast<double>(checked),
             static_cast<double>(hits), static_cast<double>(disagree)));
}

// Criteria 6, 7 and 8 (4 obstacles) share the 20-seed static runs.
void static_criteria() {
  ScenarioConfig c = config("static_2dof.json");
  RunOptions opts;
  opts.seeds = seeds(c, 20);
  const auto base = run_static_eval(c, opts);
  std::size_t max_s = 0;
  for (const auto& r : base) max_s = std::max(max_s, *r.support_count);
  const double acc = mean_of(base, &MetricsRecord::accuracy);
  report(6, acc >= 0.93 && max_s <= 400, "2 DOF static accuracy >= 0.93 and |S| <= 400 over 20 seeds",
         fmt("mean accuracy %.4f, max |S| %.0f", acc, static_cast<double>(max_s)));

  c.train.beta = 100.0;
  const auto biased = run_static_eval(c, opts);
  const double tpr1 = mean_of(base, &MetricsRecord::tpr), tpr100 = mean_of(biased, &MetricsRecord::tpr);
  const double tnr1 = mean_of(base, &MetricsRecord::tnr), tnr100 = mean_of(biased, &MetricsRecord::tnr);
  report(7, tpr100 - tpr1 >= 0.02 && tnr100 <= tnr1,
         "beta = 100 raises mean TPR by >= 2 points without raising TNR",
         fmt("TPR %.4f -> %.4f", tpr1, tpr100) + fmt(", TNR %.4f -> %.4f", tnr1, tnr100));

  const double r4 = speed_ratio(base);
  const ScenarioConfig c50 = config("static_2dof_50.json");
  RunOptions o50;
  o50.seeds = seeds(c50, 20);
  const double r50 = speed_ratio(run_static_eval(c50, o50));
  report(8, r4 >= 5.0 && r50 >= 10.0, "oracle/proxy median query time >= 5 at 4 obstacles and >= 10 at 50",
         fmt("ratio %.2f at 4 obstacles, %.2f at 50", r4, r50));
}

void update_accounting() {
  const ScenarioConfig c = config("dynamic_2dof.json");
  RunOptions opts;
  opts.seeds = {c.base_seed};
  const auto rs = run_dynamic_eval(c, opts);
  std::size_t steps = 0, exact = 0;
  for (std::size_t k = 1; k < rs.size(); ++k) {
    ++steps;
    exact += *rs[k].oracle_calls == *rs[k - 1].support_count + c.sampler.active_max;
  }
  report(9, steps == c.obstacles.motion.steps && steps >= 50 && exact == steps,
         "each dynamic step makes exactly |S| + A_max oracle calls",
         fmt("%.0f/%.0f steps exact", static_cast<double>(exact), static_cast<double>(steps)));
}

void sparsify_exactness() {
  const ScenarioConfig c = config("static_2dof.json");
  const Scenario sc = build_scenario(c, c.base_seed);
  CollisionOracle oracle(sc.chain, sc.workspace);
  Rng rng(99);
  const PointSet train = random_points(2000, 2, rng);
  FastronModel m(2, c.train);
  m.set_data(train, oracle.label_all(train));
  m.train();
  const PointSet qs = random_points(1000, 2, rng);
  std::vector<Label> before;
  std::vector<double> fb;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    before.push_back(m.predict(qs[i]));
    fb.push_back(m.hypothesis(qs[i]));
  }
  const std::size_t dropped = m.sparsify();
  std::size_t diff = 0;
  for (std::size_t i = 0; i < qs.size(); ++i)
    diff += m.predict(qs[i]) != before[i] || m.hypothesis(qs[i]) != fb[i];
  report(10, diff == 0 && dropped > 0, "predict is unchanged by sparsify on 10^3 queries",
         fmt("%.0f points dropped, %.0f differences", static_cast<double>(dropped), static_cast<double>(diff)));
}

void planning_certification() {
  const ScenarioConfig c = config("plan_gap_2dof.json");
  RunOptions opts;
  opts.seeds = seeds(c, 50);
  std::vector<PlanningTrial> trials;
  const auto rs = run_planning_eval(c, opts, &trials);

  std::size_t certified = 0, confirmed = 0;
  for (const auto& t : trials) {
    Scenario sc = build_scenario(c, t.seed);
    CollisionOracle oracle(sc.chain, sc.workspace);
    OracleChecker check(oracle);
    for (const MotionPlan* p : {&t.proxy_plan, &t.oracle_plan}) {
      if (!p->certified) continue;
      ++certified;
      confirmed += verify_plan(*p, check, c.planner.params.edge_resolution / 2).empty();
    }
  }
  std::vector<double> proxy_t, oracle_t;
  for (const auto& r : rs) {
    if (!r.plan_time_ns) continue;
    const double total = static_cast<double>(*r.plan_time_ns + r.verify_time_ns.value_or(0) +
                                             r.repair_time_ns.value_or(0));
    (r.method == "proxy" ? proxy_t : oracle_t).push_back(total);
  }
  const double mp = median(proxy_t) / 1e6, mo = median(oracle_t) / 1e6;
  report(11, certified > 0 && confirmed == certified && proxy_t.size() == 50 && mp <= mo,
         "certified plans pass oracle checks at half resolution and the proxy pipeline is not slower",
         fmt("%.0f/%.0f certified plans confirmed", static_cast<double>(confirmed),
             static_cast<double>(certified)) +
             fmt(", median proxy %.3f ms vs oracle %.3f ms", mp, mo));
}

std::vector<std::string> strip_timing(const fs::path& csv) {
  std::ifstream in(csv);
  std::vector<std::string> rows;
  std::string line;
  std::vector<bool> timing;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (timing.empty())
      for (const auto& h : cells) timing.push_back(is_timing_column(h));
    std::string kept;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (i >= timing.size() || !timing[i]) kept += cells[i] + ",";
    rows.push_back(kept);
  }
  return rows;
}

void reproducibility() {
  struct Run {
    const char* cmd;
    const char* cfg;
    int seeds;
  };
  const Run runs[] = {{"static", "static_2dof.json", 3},
                      {"sweep", "sweep_beta.json", 2},
                      {"dynamic", "dynamic_2dof.json", 1},
                      {"plan", "plan_gap_2dof.json", 4}};
  const fs::path dir = fs::temp_directory_path() / "fastron_repro";
  fs::create_directories(dir);
  std::string detail;
  bool ok = true;
  for (const auto& r : runs) {
    std::vector<std::string> outs[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path csv = dir / (std::string(r.cmd) + std::to_string(k) + ".csv");
      const std::string cmd = std::string("\"") + FASTRON_BENCH_EXE + "\" " + r.cmd + " --config \"" +
                              (fs::path(FASTRON_CONFIG_DIR) / r.cfg).string() + "\" --out \"" +
                              csv.string() + "\" --seeds " + std::to_string(r.seeds) + " 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) ok = false;
      outs[k] = strip_timing(csv);
    }
    const bool same = outs[0] == outs[1] && outs[0].size() > 1;
    ok = ok && same;
    detail += std::string(detail.empty() ? "" : ", ") + r.cmd + (same ? " identical" : " differs");
  }
  fs::remove_all(dir);
  report(12, ok, "repeated runs give identical CSVs apart from timing columns", detail);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  convergence_and_descent();
  optimality_anchor();
  kernel_bound();
  gjk_vs_sat();
  static_criteria();
  update_accounting();
  sparsify_exactness();
  planning_certification();
  reproducibility();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of 12 criteria failed, %.1f s\n", g_failed, secs);
  return g_failed == 0 ? 0 : 1;
}
