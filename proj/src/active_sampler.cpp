#include "fastron/active_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace fastron {

double SamplerParams::sigma_for(double gamma) const {
  return sigma > 0.0 ? sigma : std::sqrt(1.0 / (2.0 * gamma));
}

PointSet generate_active_set(const PointSet& support, std::size_t active_max, std::size_t kappa,
                             double sigma, Rng& rng) {
  const std::size_t d = support.dim();
  PointSet out(d);
  out.reserve(active_max);
  std::vector<double> p(d);

  for (std::size_t k = 0; k < kappa && out.size() < active_max; ++k) {
    for (std::size_t s = 0; s < support.size(); ++s) {
      if (out.size() == active_max) break;
      const auto mean = support[s];
      for (int attempt = 0; attempt <= 10; ++attempt) {
        for (std::size_t c = 0; c < d; ++c) p[c] = mean[c] + sigma * rng.normal();
        if (in_unit_box(p)) break;
      }
      for (double& v : p) v = std::clamp(v, -1.0, 1.0);
      out.push_back(p);
    }
  }
  while (out.size() < active_max) {
    rng.fill_uniform(p, -1.0, 1.0);
    out.push_back(p);
  }
  return out;
}

namespace {

// Replaces points that repeat an earlier point (or one of `taken`) with fresh
// uniform samples.
void replace_duplicates(PointSet& pts, const PointSet& taken, Rng& rng) {
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < taken.size(); ++i) {
    seen.emplace(taken[i].begin(), taken[i].end());
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto row = pts[i];
    while (!seen.emplace(row.begin(), row.end()).second) {
      rng.fill_uniform(row, -1.0, 1.0);
    }
  }
}

}  // namespace

CycleReport update_cycle(FastronModel& model, const Labeler& oracle, const SamplerParams& params,
                         std::uint64_t cycle) {
  CycleReport report;
  Rng rng(mix_seed(params.seed, cycle));
  const std::size_t d = model.dim();

  if (model.size() == 0) {
    report.initial = true;
    PointSet init(d);
    std::vector<double> p(d);
    for (std::size_t i = 0; i < params.initial_samples; ++i) {
      rng.fill_uniform(p, -1.0, 1.0);
      init.push_back(p);
    }
    replace_duplicates(init, PointSet(d), rng);
    std::vector<Label> labels;
    labels.reserve(init.size());
    for (std::size_t i = 0; i < init.size(); ++i) labels.push_back(oracle(init[i]));
    report.oracle_calls = init.size();
    model.set_data(init, labels);
  } else {
    model.sparsify();
    PointSet active = generate_active_set(model.points(), params.active_max, params.kappa,
                                          params.sigma_for(model.params().gamma), rng);
    replace_duplicates(active, model.points(), rng);

    std::vector<Label> retained;
    retained.reserve(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) retained.push_back(oracle(model.points()[i]));
    std::vector<Label> fresh;
    fresh.reserve(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) fresh.push_back(oracle(active[i]));
    report.oracle_calls = retained.size() + fresh.size();
    report.active_added = active.size();

    model.relabel(retained);
    model.append_points(active, fresh);
  }

  report.train = model.train();
  model.sparsify();
  report.support_count = model.support_count();
  return report;
}

}  // namespace fastron
