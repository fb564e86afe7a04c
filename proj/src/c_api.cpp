#include "fastron/fastron.h"

#include <fstream>
#include <memory>
#include <string>

#include "fastron/bench.hpp"

struct fastron_model {
  fastron::FastronModel impl;
};

struct fastron_scenario {
  fastron::bench::ScenarioConfig config;
  fastron::bench::Scenario scenario;
  std::uint64_t seed;
  fastron::CollisionOracle oracle;

  fastron_scenario(fastron::bench::ScenarioConfig c, std::uint64_t s)
      : config(std::move(c)),
        scenario(fastron::bench::build_scenario(config, s)),
        seed(s),
        oracle(scenario.chain, scenario.workspace) {}
};

namespace {

thread_local std::string g_last_error;

fastron_status fail(fastron_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Maps exceptions from the core onto status codes.
template <class Fn>
fastron_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const fastron::DuplicatePointError& e) {
    return fail(FASTRON_DUPLICATE_POINT, e.what());
  } catch (const fastron::ContractViolation& e) {
    return fail(FASTRON_INVALID_ARGUMENT, e.what());
  } catch (const fastron::ConfigError& e) {
    return fail(FASTRON_CONFIG_ERROR, e.what());
  } catch (const fastron::IoError& e) {
    return fail(FASTRON_IO_ERROR, e.what());
  } catch (const fastron::PlanningError& e) {
    return fail(FASTRON_PLANNING_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FASTRON_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(FASTRON_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(FASTRON_INTERNAL_ERROR, "unknown error");
  }
}

#define FASTRON_CHECK_ARG(cond, msg) \
  if (!(cond)) return fail(FASTRON_INVALID_ARGUMENT, msg)

fastron::TrainParams to_params(const fastron_train_params* p) {
  fastron::TrainParams out;
  if (p != nullptr) {
    out.gamma = p->gamma;
    out.beta = p->beta;
    out.iter_max = p->iter_max;
    out.max_support = p->max_support;
    out.seed = p->seed;
  }
  return out;
}

int to_int(fastron::Label y) { return static_cast<int>(y); }

}  // namespace

extern "C" {

const char* fastron_last_error(void) { return g_last_error.c_str(); }

const char* fastron_status_string(fastron_status status) {
  switch (status) {
    case FASTRON_OK: return "ok";
    case FASTRON_INVALID_ARGUMENT: return "invalid argument";
    case FASTRON_DUPLICATE_POINT: return "duplicate point";
    case FASTRON_IO_ERROR: return "i/o error";
    case FASTRON_CONFIG_ERROR: return "config error";
    case FASTRON_THRESHOLD_FAILED: return "threshold failed";
    case FASTRON_PLANNING_ERROR: return "planning error";
    case FASTRON_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

void fastron_train_params_default(fastron_train_params* params) {
  if (params == nullptr) return;
  const fastron::TrainParams d;
  *params = {d.gamma, d.beta, d.iter_max, d.max_support, d.seed};
}

fastron_status fastron_model_create(size_t dim, const fastron_train_params* params,
                                    fastron_model** out) {
  FASTRON_CHECK_ARG(out != nullptr, "out is NULL");
  return guarded([&] {
    *out = new fastron_model{fastron::FastronModel(dim, to_params(params))};
    return FASTRON_OK;
  });
}

void fastron_model_destroy(fastron_model* model) { delete model; }

fastron_status fastron_model_set_data(fastron_model* model, const double* points,
                                      const int* labels, size_t n) {
  FASTRON_CHECK_ARG(model != nullptr, "model is NULL");
  FASTRON_CHECK_ARG(n == 0 || (points != nullptr && labels != nullptr), "points or labels is NULL");
  return guarded([&] {
    const std::size_t d = model->impl.dim();
    fastron::PointSet pts(d);
    pts.reserve(n);
    std::vector<fastron::Label> ys;
    ys.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      if (labels[i] != 1 && labels[i] != -1) {
        return fail(FASTRON_INVALID_ARGUMENT, "label " + std::to_string(i) + " is not +1 or -1");
      }
      pts.push_back({points + i * d, d});
      ys.push_back(static_cast<fastron::Label>(labels[i]));
    }
    model->impl.set_data(pts, ys);
    return FASTRON_OK;
  });
}

fastron_status fastron_model_train(fastron_model* model, fastron_train_report* report) {
  FASTRON_CHECK_ARG(model != nullptr, "model is NULL");
  return guarded([&] {
    const auto r = model->impl.train();
    if (report != nullptr) {
      *report = {r.iterations_used, r.corrections, r.removals, r.final_misclassified,
                 r.reverted ? 1 : 0, r.cap_terminated ? 1 : 0};
    }
    return FASTRON_OK;
  });
}

fastron_status fastron_model_predict(const fastron_model* model, const double* q, size_t dim,
                                     int* label) {
  FASTRON_CHECK_ARG(model != nullptr && q != nullptr && label != nullptr, "NULL argument");
  return guarded([&] {
    *label = to_int(model->impl.predict({q, dim}));
    return FASTRON_OK;
  });
}

fastron_status fastron_model_hypothesis(const fastron_model* model, const double* q, size_t dim,
                                        double* value) {
  FASTRON_CHECK_ARG(model != nullptr && q != nullptr && value != nullptr, "NULL argument");
  return guarded([&] {
    *value = model->impl.hypothesis({q, dim});
    return FASTRON_OK;
  });
}

fastron_status fastron_model_sparsify(fastron_model* model, size_t* removed) {
  FASTRON_CHECK_ARG(model != nullptr, "model is NULL");
  return guarded([&] {
    const std::size_t n = model->impl.sparsify();
    if (removed != nullptr) *removed = n;
    return FASTRON_OK;
  });
}

size_t fastron_model_dim(const fastron_model* model) { return model ? model->impl.dim() : 0; }
size_t fastron_model_size(const fastron_model* model) { return model ? model->impl.size() : 0; }
size_t fastron_model_support_count(const fastron_model* model) {
  return model ? model->impl.support_count() : 0;
}

fastron_status fastron_model_save(const fastron_model* model, const char* path) {
  FASTRON_CHECK_ARG(model != nullptr && path != nullptr, "NULL argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) return fail(FASTRON_IO_ERROR, std::string("cannot open ") + path + " for writing");
    fastron::save_model(model->impl, out);
    out.flush();
    if (!out) return fail(FASTRON_IO_ERROR, std::string("failed writing ") + path);
    return FASTRON_OK;
  });
}

fastron_status fastron_model_load(const char* path, fastron_model** out) {
  FASTRON_CHECK_ARG(path != nullptr && out != nullptr, "NULL argument");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) return fail(FASTRON_IO_ERROR, std::string("cannot open ") + path);
    *out = new fastron_model{fastron::load_model(in)};
    return FASTRON_OK;
  });
}

fastron_status fastron_model_update(fastron_model* model, fastron_scenario* scenario,
                                    uint64_t cycle, uint64_t* oracle_calls) {
  FASTRON_CHECK_ARG(model != nullptr && scenario != nullptr, "NULL argument");
  FASTRON_CHECK_ARG(model->impl.dim() == scenario->scenario.chain.dof(),
                    "model and scenario dimensions differ");
  return guarded([&] {
    auto& oracle = scenario->oracle;
    const fastron::Labeler labeler = [&oracle](std::span<const double> q) {
      return oracle.label(q);
    };
    fastron::SamplerParams sp = scenario->config.sampler;
    sp.seed = fastron::bench::stream_seed(scenario->seed, fastron::bench::Stream::kSampler);
    const std::uint64_t before = oracle.calls();
    fastron::update_cycle(model->impl, labeler, sp, cycle);
    if (oracle_calls != nullptr) *oracle_calls = oracle.calls() - before;
    return FASTRON_OK;
  });
}

fastron_status fastron_scenario_create(const char* config_json, uint64_t seed,
                                       fastron_scenario** out) {
  FASTRON_CHECK_ARG(config_json != nullptr && out != nullptr, "NULL argument");
  return guarded([&] {
    *out = new fastron_scenario(fastron::bench::parse_config(config_json), seed);
    return FASTRON_OK;
  });
}

fastron_status fastron_scenario_load(const char* config_path, uint64_t seed,
                                     fastron_scenario** out) {
  FASTRON_CHECK_ARG(config_path != nullptr && out != nullptr, "NULL argument");
  return guarded([&] {
    *out = new fastron_scenario(fastron::bench::load_config(config_path), seed);
    return FASTRON_OK;
  });
}

void fastron_scenario_destroy(fastron_scenario* scenario) { delete scenario; }

size_t fastron_scenario_dof(const fastron_scenario* scenario) {
  return scenario ? scenario->scenario.chain.dof() : 0;
}

size_t fastron_scenario_obstacle_count(const fastron_scenario* scenario) {
  return scenario ? scenario->scenario.workspace.obstacles.size() : 0;
}

fastron_status fastron_scenario_label(fastron_scenario* scenario, const double* q, size_t dim,
                                      int* label) {
  FASTRON_CHECK_ARG(scenario != nullptr && q != nullptr && label != nullptr, "NULL argument");
  return guarded([&] {
    *label = to_int(scenario->oracle.label({q, dim}));
    return FASTRON_OK;
  });
}

fastron_status fastron_scenario_advance(fastron_scenario* scenario, size_t step) {
  FASTRON_CHECK_ARG(scenario != nullptr, "scenario is NULL");
  return guarded([&] {
    fastron::bench::advance_obstacles(scenario->config, scenario->scenario, step, scenario->seed);
    return FASTRON_OK;
  });
}

fastron_status fastron_bench_run(const fastron_bench_options* options,
                                 fastron_bench_summary* summary) {
  FASTRON_CHECK_ARG(options != nullptr && options->config_path != nullptr,
                    "options and config_path are required");
  namespace fb = fastron::bench;
  return guarded([&] {
    const fb::ScenarioConfig config = fb::load_config(options->config_path);

    std::optional<fastron::FastronModel> loaded;
    if (options->load_model != nullptr) {
      std::ifstream in(options->load_model);
      if (!in) return fail(FASTRON_IO_ERROR, std::string("cannot open ") + options->load_model);
      loaded.emplace(fastron::load_model(in));
    }
    fastron::FastronModel trained(config.dof(), config.train);

    fb::RunOptions ro;
    const std::size_t count = options->seeds == 0 ? 1 : options->seeds;
    for (std::size_t i = 0; i < count; ++i) {
      ro.seeds.push_back(config.base_seed + options->seed_offset + i);
    }
    ro.preloaded = loaded ? &*loaded : nullptr;
    ro.trained_out = options->save_model != nullptr ? &trained : nullptr;

    std::vector<fb::MetricsRecord> records;
    std::string run;
    switch (options->command) {
      case FASTRON_CMD_STATIC: records = fb::run_static_eval(config, ro); run = "static"; break;
      case FASTRON_CMD_SWEEP: records = fb::run_sweep(config, ro); run = "sweep"; break;
      case FASTRON_CMD_DYNAMIC: records = fb::run_dynamic_eval(config, ro); run = "dynamic"; break;
      case FASTRON_CMD_PLAN: records = fb::run_planning_eval(config, ro); run = "plan"; break;
      default: return fail(FASTRON_INVALID_ARGUMENT, "unknown command");
    }

    if (options->out_path != nullptr) fb::emit_report(records, options->out_path);
    if (options->save_model != nullptr) {
      if (loaded) trained = *loaded;
      std::ofstream out(options->save_model);
      if (!out) return fail(FASTRON_IO_ERROR, std::string("cannot open ") + options->save_model);
      fastron::save_model(trained, out);
      out.flush();
      if (!out) return fail(FASTRON_IO_ERROR, std::string("failed writing ") + options->save_model);
    }

    const auto failures = options->check_thresholds != 0
                              ? fb::check_thresholds(config, records, run)
                              : std::vector<std::string>{};
    if (summary != nullptr) *summary = {records.size(), failures.size()};
    if (!failures.empty()) {
      std::string msg;
      for (const auto& f : failures) msg += (msg.empty() ? "" : "\n") + f;
      return fail(FASTRON_THRESHOLD_FAILED, std::move(msg));
    }
    return FASTRON_OK;
  });
}

}  // extern "C"
