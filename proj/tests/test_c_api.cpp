#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <doctest.h>

#include "fastron/fastron.h"

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("model lifecycle through the C API") {
  fastron_model* m = nullptr;
  REQUIRE(fastron_model_create(2, nullptr, &m) == FASTRON_OK);
  CHECK(fastron_model_dim(m) == 2);

  std::vector<double> pts;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double x = -0.95 + 0.1 * i, y = -0.95 + 0.1 * j;
      pts.push_back(x);
      pts.push_back(y);
      labels.push_back(x * x + y * y < 0.3 ? 1 : -1);
    }
  }
  REQUIRE(fastron_model_set_data(m, pts.data(), labels.data(), labels.size()) == FASTRON_OK);
  fastron_train_report rep{};
  REQUIRE(fastron_model_train(m, &rep) == FASTRON_OK);
  CHECK(rep.misclassified == 0);
  size_t removed = 0;
  REQUIRE(fastron_model_sparsify(m, &removed) == FASTRON_OK);
  CHECK(fastron_model_size(m) == fastron_model_support_count(m));
  CHECK(removed == 400 - fastron_model_size(m));

  int label = 0;
  const double centre[2] = {0.0, 0.0};
  const double corner[2] = {0.9, 0.9};
  CHECK(fastron_model_predict(m, centre, 2, &label) == FASTRON_OK);
  CHECK(label == 1);
  CHECK(fastron_model_predict(m, corner, 2, &label) == FASTRON_OK);
  CHECK(label == -1);

  CHECK(fastron_model_predict(m, centre, 3, &label) == FASTRON_INVALID_ARGUMENT);
  CHECK(std::string(fastron_last_error()).size() > 0);

  const std::string path = temp_path("fastron_capi_model.txt");
  REQUIRE(fastron_model_save(m, path.c_str()) == FASTRON_OK);
  fastron_model* back = nullptr;
  REQUIRE(fastron_model_load(path.c_str(), &back) == FASTRON_OK);
  double f1 = 0.0, f2 = 0.0;
  fastron_model_hypothesis(m, corner, 2, &f1);
  fastron_model_hypothesis(back, corner, 2, &f2);
  CHECK(f1 == f2);
  fastron_model_destroy(back);
  std::remove(path.c_str());

  const std::vector<int> dup_labels{1, 1};
  const double dup[4] = {0.1, 0.1, 0.1, 0.1};
  CHECK(fastron_model_set_data(m, dup, dup_labels.data(), 2) == FASTRON_DUPLICATE_POINT);
  const int bad_label = 0;
  CHECK(fastron_model_set_data(m, dup, &bad_label, 1) == FASTRON_INVALID_ARGUMENT);
  fastron_model_destroy(m);

  fastron_train_params p;
  fastron_train_params_default(&p);
  CHECK(p.gamma == 30.0);
  p.beta = 0.0;
  CHECK(fastron_model_create(2, &p, &m) == FASTRON_INVALID_ARGUMENT);
  CHECK(fastron_model_load("/nonexistent/model.txt", &m) == FASTRON_IO_ERROR);
}

TEST_CASE("scenario and update cycles through the C API") {
  const char* cfg = R"({"obstacles": {"count": 1, "motion": {"mode": "translate", "steps": 5}},
                        "fastron": {"initial_samples": 500, "active_max": 200}})";
  fastron_scenario* s = nullptr;
  REQUIRE(fastron_scenario_create(cfg, 4, &s) == FASTRON_OK);
  CHECK(fastron_scenario_dof(s) == 2);
  CHECK(fastron_scenario_obstacle_count(s) == 1);
  CHECK(fastron_scenario_create("{\"nope\": 1}", 4, &s) == FASTRON_CONFIG_ERROR);

  fastron_model* m = nullptr;
  REQUIRE(fastron_model_create(2, nullptr, &m) == FASTRON_OK);
  uint64_t calls = 0;
  REQUIRE(fastron_model_update(m, s, 0, &calls) == FASTRON_OK);
  CHECK(calls == 500);
  for (uint64_t c = 1; c <= 3; ++c) {
    const size_t support = fastron_model_support_count(m);
    REQUIRE(fastron_scenario_advance(s, c) == FASTRON_OK);
    REQUIRE(fastron_model_update(m, s, c, &calls) == FASTRON_OK);
    CHECK(calls == support + 200);
  }
  int label = 0;
  const double q[2] = {0.0, 0.0};
  CHECK(fastron_scenario_label(s, q, 2, &label) == FASTRON_OK);
  CHECK((label == 1 || label == -1));
  fastron_model_destroy(m);
  fastron_scenario_destroy(s);
}

TEST_CASE("bench run through the C API") {
  fastron_bench_options o{};
  o.command = FASTRON_CMD_STATIC;
  o.config_path = "/nonexistent.json";
  CHECK(fastron_bench_run(&o, nullptr) == FASTRON_CONFIG_ERROR);
  CHECK(fastron_bench_run(nullptr, nullptr) == FASTRON_INVALID_ARGUMENT);
  CHECK(std::string(fastron_status_string(FASTRON_THRESHOLD_FAILED)).size() > 0);
}
