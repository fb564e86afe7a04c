#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

#include "fastron/bench.hpp"

namespace fastron::bench {
namespace {

std::string proportion(const std::optional<double>& v) {
  if (!v) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

template <class T>
std::string integer(const std::optional<T>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string flag(const std::optional<bool>& v) { return v ? (*v ? "1" : "0") : ""; }

std::vector<std::string> fields(const MetricsRecord& r) {
  return {r.run,
          r.method,
          r.param,
          r.value ? shortest(*r.value) : "",
          std::to_string(r.seed),
          std::to_string(r.step),
          proportion(r.accuracy),
          proportion(r.tpr),
          proportion(r.tnr),
          integer(r.support_count),
          integer(r.oracle_calls),
          integer(r.train_iterations),
          integer(r.query_time_proxy_ns),
          integer(r.query_time_oracle_ns),
          integer(r.update_time_ns),
          integer(r.plan_time_ns),
          integer(r.verify_time_ns),
          integer(r.repair_time_ns),
          flag(r.plan_found),
          flag(r.certified),
          flag(r.repaired),
          integer(r.waypoints)};
}

void write_row(std::ostream& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << row[i];
  }
  out << '\n';
}

struct Stat {
  double sum = 0.0;
  double sq = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sq += v * v;
    ++n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : NAN; }
  double sd() const {
    if (n < 2) return n ? 0.0 : NAN;
    const double m = mean();
    return std::sqrt(std::max(0.0, (sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)));
  }
};

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "run",          "method",        "param",          "value",
      "seed",         "step",          "accuracy",       "tpr",
      "tnr",          "support_count", "oracle_calls",   "train_iterations",
      "query_time_proxy_ns", "query_time_oracle_ns", "update_time_ns", "plan_time_ns",
      "verify_time_ns", "repair_time_ns", "plan_found",  "certified",
      "repaired",     "waypoints"};
  return cols;
}

bool is_timing_column(std::string_view column) {
  return column.size() > 3 && column.substr(column.size() - 3) == "_ns";
}

void write_csv(const std::vector<MetricsRecord>& records, std::ostream& out) {
  write_row(out, csv_columns());
  for (const auto& r : records) write_row(out, fields(r));
}

void write_sweep_summary(const std::vector<MetricsRecord>& records, std::ostream& out) {
  // (param, value) in first-seen order.
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, std::array<Stat, 6>> stats;
  for (const auto& r : records) {
    if (!r.value) continue;
    const auto key = std::make_pair(r.param, *r.value);
    auto [it, fresh] = stats.try_emplace(key);
    if (fresh) order.push_back(key);
    auto& s = it->second;
    if (r.accuracy) s[0].add(*r.accuracy);
    if (r.tpr) s[1].add(*r.tpr);
    if (r.tnr) s[2].add(*r.tnr);
    if (r.support_count) s[3].add(static_cast<double>(*r.support_count));
    if (r.query_time_proxy_ns) s[4].add(static_cast<double>(*r.query_time_proxy_ns));
    if (r.query_time_oracle_ns) s[5].add(static_cast<double>(*r.query_time_oracle_ns));
  }
  out << "# param value n accuracy_mean accuracy_sd tpr_mean tpr_sd tnr_mean tnr_sd"
         " support_mean support_sd proxy_ns_mean proxy_ns_sd oracle_ns_mean oracle_ns_sd\n";
  for (const auto& key : order) {
    const auto& s = stats.at(key);
    out << key.first << ' ' << shortest(key.second) << ' ' << s[0].n;
    for (const auto& st : s) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %.6g %.6g", st.mean(), st.sd());
      out << buf;
    }
    out << '\n';
  }
}

void emit_report(const std::vector<MetricsRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());

  const bool sweep = std::any_of(records.begin(), records.end(),
                                 [](const MetricsRecord& r) { return r.value.has_value(); });
  if (!sweep) return;
  const auto summary = std::filesystem::path(path.string() + ".summary.dat");
  std::ofstream sout(summary);
  if (!sout) throw IoError("cannot open " + summary.string() + " for writing");
  write_sweep_summary(records, sout);
  sout.flush();
  if (!sout) throw IoError("failed writing " + summary.string());
}

}  // namespace fastron::bench
