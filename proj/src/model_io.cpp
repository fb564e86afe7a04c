#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fastron/learner.hpp"

namespace fastron {
namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw IoError("malformed number '" + token + "' in " + context);
  }
  return v;
}

std::string header_value(const std::string& token, const std::string& key) {
  if (token.rfind(key + "=", 0) != 0) throw IoError("expected '" + key + "=' in model header");
  return token.substr(key.size() + 1);
}

}  // namespace

void save_model(const FastronModel& model, std::ostream& out) {
  const auto& p = model.params();
  out << "fastron v1 d=" << model.dim() << " n=" << model.support_count()
      << " gamma=" << shortest(p.gamma) << " beta=" << shortest(p.beta) << '\n';
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model.weights()[i] == 0.0) continue;
    for (double c : model.points()[i]) out << shortest(c) << ' ';
    out << static_cast<int>(model.labels()[i]) << ' ' << shortest(model.weights()[i]) << '\n';
  }
  if (!out) throw IoError("failed writing model");
}

FastronModel load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty model file");
  std::istringstream head(line);
  std::string magic, version, d_tok, n_tok, g_tok, b_tok;
  head >> magic >> version >> d_tok >> n_tok >> g_tok >> b_tok;
  if (magic != "fastron" || version != "v1") throw IoError("not a fastron v1 model");

  const auto dim = static_cast<std::size_t>(parse_double(header_value(d_tok, "d"), "header"));
  const auto count = static_cast<std::size_t>(parse_double(header_value(n_tok, "n"), "header"));
  TrainParams params;
  params.gamma = parse_double(header_value(g_tok, "gamma"), "header");
  params.beta = parse_double(header_value(b_tok, "beta"), "header");
  if (dim == 0 || !(params.gamma > 0.0) || !(params.beta >= 1.0)) {
    throw IoError("invalid model header: " + line);
  }

  PointSet pts(dim);
  std::vector<Label> labels;
  std::vector<double> weights;
  std::vector<double> coords(dim);
  for (std::size_t r = 0; r < count; ++r) {
    if (!std::getline(in, line)) throw IoError("model file truncated");
    std::istringstream row(line);
    std::string tok;
    const std::string ctx = "support line " + std::to_string(r + 1);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!(row >> tok)) throw IoError("too few values on " + ctx);
      coords[k] = parse_double(tok, ctx);
    }
    if (!(row >> tok)) throw IoError("missing label on " + ctx);
    const double y = parse_double(tok, ctx);
    if (y != 1.0 && y != -1.0) throw IoError("label must be +1 or -1 on " + ctx);
    if (!(row >> tok)) throw IoError("missing weight on " + ctx);
    weights.push_back(parse_double(tok, ctx));
    labels.push_back(y > 0 ? Label::kCollision : Label::kFree);
    pts.push_back(coords);
  }

  params.max_support = std::max(params.max_support, count);
  FastronModel model(dim, params);
  model.set_data(pts, labels);
  model.set_weights(weights);
  return model;
}

}  // namespace fastron
