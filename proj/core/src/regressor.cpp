#include "posauth/regressor.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "posauth/error.hpp"
#include "posauth/parallel.hpp"

namespace posauth {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "posauth-regressor";

std::string_view kernel_name(KernelType k) { return k == KernelType::linear ? "linear" : "rbf"; }

KernelType parse_kernel(std::string_view s) {
  if (s == "linear") return KernelType::linear;
  if (s == "rbf") return KernelType::rbf;
  throw InvalidArgument("unknown SVR kernel '" + std::string(s) + "'");
}

json tree_to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf()) {
      nodes.push_back({{"value", n.value}, {"samples", n.samples}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value},
                       {"samples", n.samples}});
    }
  }
  return {{"feature_count", tree.feature_count()}, {"nodes", nodes}};
}

RegressionTree tree_from_json(const json& j) {
  std::vector<RegressionTree::Node> nodes;
  for (const auto& jn : j.at("nodes")) {
    RegressionTree::Node n;
    n.value = jn.at("value").get<double>();
    n.samples = jn.at("samples").get<std::size_t>();
    if (jn.contains("feature")) {
      n.feature = jn.at("feature").get<int>();
      n.threshold = jn.at("threshold").get<double>();
      n.left = jn.at("left").get<int>();
      n.right = jn.at("right").get<int>();
    }
    nodes.push_back(n);
  }
  return RegressionTree(std::move(nodes), j.at("feature_count").get<std::size_t>());
}

json svr_to_json(const SvrModel& m) {
  json j = {{"kernel", kernel_name(m.kernel())}, {"bias", m.bias()}};
  if (m.kernel() == KernelType::linear) {
    j["weights"] = m.weights();
  } else {
    j["gamma"] = m.gamma();
    j["coefficients"] = m.coefficients();
    const FeatureMatrix& sv = m.support_vectors();
    json rows = json::array();
    for (Eigen::Index r = 0; r < sv.rows(); ++r) {
      rows.push_back(std::vector<double>(sv.row(r).begin(), sv.row(r).end()));
    }
    j["support_vectors"] = rows;
  }
  return j;
}

SvrModel svr_from_json(const json& j) {
  const KernelType kernel = parse_kernel(j.at("kernel").get<std::string>());
  const double bias = j.at("bias").get<double>();
  if (kernel == KernelType::linear) {
    return SvrModel(j.at("weights").get<std::vector<double>>(), bias);
  }
  const auto coef = j.at("coefficients").get<std::vector<double>>();
  const auto rows = j.at("support_vectors").get<std::vector<std::vector<double>>>();
  const auto cols = rows.empty() ? kFeatureCount : rows.front().size();
  FeatureMatrix sv(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw InvalidArgument("ragged support vector matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      sv(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return SvrModel(kernel, j.at("gamma").get<double>(), std::move(sv), coef, bias);
}

}  // namespace

std::string_view to_string(RegressorKind kind) {
  return kind == RegressorKind::decision_tree ? "dt" : "svr";
}

RegressorKind parse_regressor_kind(std::string_view text) {
  if (text == "dt" || text == "tree" || text == "decision_tree") return RegressorKind::decision_tree;
  if (text == "svr") return RegressorKind::svr;
  throw InvalidArgument("unknown model kind '" + std::string(text) + "' (expected dt or svr)");
}

Regressor::Regressor(Trees trees, TreeParams params, Normalization feature_scaling)
    : models_(std::move(trees)), feature_scaling_(feature_scaling), tree_params_(params) {}

Regressor::Regressor(Svrs svrs, SvrParams params, Normalization feature_scaling,
                     LabelScaling labels)
    : models_(std::move(svrs)),
      feature_scaling_(feature_scaling),
      label_scaling_(labels),
      svr_params_(params) {}

RegressorKind Regressor::kind() const {
  return std::holds_alternative<Trees>(models_) ? RegressorKind::decision_tree
                                                : RegressorKind::svr;
}

Vec2 Regressor::predict(std::span<const double> features) const {
  if (features.size() != kFeatureCount) {
    throw InvalidArgument("model expects " + std::to_string(kFeatureCount) + " features, got " +
                          std::to_string(features.size()));
  }
  if (const Trees* t = trees()) {
    return Vec2((*t)[0].predict(features), (*t)[1].predict(features));
  }
  const Svrs& s = std::get<Svrs>(models_);
  const FeatureVector z = feature_scaling_.apply(features);
  Vec2 out;
  for (int c = 0; c < 2; ++c) {
    const auto k = static_cast<std::size_t>(c);
    out(c) = s[k].predict(z) * label_scaling_.stddev[k] + label_scaling_.mean[k];
  }
  return out;
}

std::string Regressor::to_json() const {
  json j;
  j["format"] = kFormatTag;
  j["version"] = kModelFormatVersion;
  j["kind"] = to_string(kind());
  j["feature_names"] = {"lq_db", "toa1", "toa2", "toa3", "dtoa1", "dtoa2", "dtoa3", "x", "y"};
  j["feature_scaling"] = {{"mean", feature_scaling_.mean}, {"stddev", feature_scaling_.stddev}};
  if (const Trees* t = trees()) {
    j["hyperparameters"] = {{"max_depth", tree_params_.max_depth},
                            {"min_leaf", tree_params_.min_leaf}};
    j["submodels"] = {tree_to_json((*t)[0]), tree_to_json((*t)[1])};
  } else {
    const Svrs& s = std::get<Svrs>(models_);
    j["hyperparameters"] = {{"c", svr_params_.c},
                            {"epsilon", svr_params_.epsilon},
                            {"kernel", kernel_name(svr_params_.kernel)},
                            {"gamma", svr_params_.gamma},
                            {"tolerance", svr_params_.tolerance},
                            {"max_iterations", svr_params_.max_iterations}};
    j["label_scaling"] = {{"mean", label_scaling_.mean}, {"stddev", label_scaling_.stddev}};
    j["submodels"] = {svr_to_json(s[0]), svr_to_json(s[1])};
  }
  return j.dump(1);
}

Regressor Regressor::from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormatTag) {
      throw IoError("not a posauth model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw IoError("unsupported model file version " + std::to_string(version));
    }
    Normalization norm;
    norm.mean = j.at("feature_scaling").at("mean").get<FeatureVector>();
    norm.stddev = j.at("feature_scaling").at("stddev").get<FeatureVector>();
    const auto& hp = j.at("hyperparameters");
    const auto& subs = j.at("submodels");
    if (subs.size() != 2) throw IoError("model file must hold exactly two submodels");

    if (parse_regressor_kind(j.at("kind").get<std::string>()) == RegressorKind::decision_tree) {
      TreeParams p;
      p.max_depth = hp.at("max_depth").get<int>();
      p.min_leaf = hp.at("min_leaf").get<std::size_t>();
      return Regressor(Trees{tree_from_json(subs[0]), tree_from_json(subs[1])}, p, norm);
    }
    SvrParams p;
    p.c = hp.at("c").get<double>();
    p.epsilon = hp.at("epsilon").get<double>();
    p.kernel = parse_kernel(hp.at("kernel").get<std::string>());
    p.gamma = hp.at("gamma").get<double>();
    p.tolerance = hp.at("tolerance").get<double>();
    p.max_iterations = hp.at("max_iterations").get<std::size_t>();
    LabelScaling labels;
    labels.mean = j.at("label_scaling").at("mean").get<std::array<double, 2>>();
    labels.stddev = j.at("label_scaling").at("stddev").get<std::array<double, 2>>();
    return Regressor(Svrs{svr_from_json(subs[0]), svr_from_json(subs[1])}, p, norm, labels);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
}

void Regressor::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << to_json() << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Regressor Regressor::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

FeatureMatrix feature_matrix(const Dataset& data, bool normalized) {
  FeatureMatrix x(static_cast<Eigen::Index>(data.rows.size()),
                  static_cast<Eigen::Index>(kFeatureCount));
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const FeatureVector raw = data.rows[i].features();
    const FeatureVector f = normalized ? data.normalization.apply(raw) : raw;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = f[k];
    }
  }
  return x;
}

Regressor fit_decision_tree(const Dataset& train, const TreeParams& params) {
  if (train.rows.empty()) throw InvalidArgument("cannot train on an empty dataset");
  const FeatureMatrix x = feature_matrix(train, false);
  Regressor::Trees trees;
  for (int c = 0; c < 2; ++c) {
    std::vector<double> y;
    y.reserve(train.rows.size());
    for (const FeatureRow& r : train.rows) y.push_back(r.label_next_position(c));
    trees[static_cast<std::size_t>(c)] = RegressionTree::fit(x, y, params);
  }
  return Regressor(std::move(trees), params, train.normalization);
}

Regressor fit_svr(const Dataset& train, const SvrParams& params, std::array<SvrFitInfo, 2>* info) {
  if (train.rows.empty()) throw InvalidArgument("cannot train on an empty dataset");
  const FeatureMatrix x = feature_matrix(train, true);
  const double n = static_cast<double>(train.rows.size());

  LabelScaling labels;
  std::array<std::vector<double>, 2> z;
  for (std::size_t c = 0; c < 2; ++c) {
    double sum = 0.0;
    for (const FeatureRow& r : train.rows) sum += r.label_next_position(static_cast<int>(c));
    const double mean = sum / n;
    double sq = 0.0;
    for (const FeatureRow& r : train.rows) {
      const double d = r.label_next_position(static_cast<int>(c)) - mean;
      sq += d * d;
    }
    const double sd = std::sqrt(sq / n);
    labels.mean[c] = mean;
    labels.stddev[c] = sd > 0.0 ? sd : 1.0;
    z[c].reserve(train.rows.size());
    for (const FeatureRow& r : train.rows) {
      z[c].push_back((r.label_next_position(static_cast<int>(c)) - mean) / labels.stddev[c]);
    }
  }

  Regressor::Svrs models;
  std::array<SvrFitInfo, 2> fit_info;
  parallel_for(2, [&](std::size_t c) { models[c] = SvrModel::fit(x, z[c], params, &fit_info[c]); });
  if (info != nullptr) *info = std::move(fit_info);
  return Regressor(std::move(models), params, train.normalization, labels);
}

Vec2 predict(const Regressor& model, std::span<const double> features) {
  return model.predict(features);
}

}  // namespace posauth
