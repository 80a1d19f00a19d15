#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "posauth/dataset.hpp"
#include "posauth/decision_tree.hpp"
#include "posauth/svr.hpp"

namespace posauth {

enum class RegressorKind { decision_tree, svr };

std::string_view to_string(RegressorKind kind);
RegressorKind parse_regressor_kind(std::string_view text);

/// Per-coordinate affine label transform, z = (label - mean) / stddev.
struct LabelScaling {
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> stddev{1.0, 1.0};
};

/// Next-position predictor: one submodel for x, one for y.
///
/// Trees consume raw features. SVR submodels see z-scored features and
/// z-scored labels; predict() undoes both transforms.
class Regressor {
 public:
  using Trees = std::array<RegressionTree, 2>;
  using Svrs = std::array<SvrModel, 2>;

  Regressor(Trees trees, TreeParams params, Normalization feature_scaling);
  Regressor(Svrs svrs, SvrParams params, Normalization feature_scaling, LabelScaling labels);

  RegressorKind kind() const;
  Vec2 predict(std::span<const double> features) const;

  const Normalization& feature_scaling() const { return feature_scaling_; }
  const LabelScaling& label_scaling() const { return label_scaling_; }
  const TreeParams& tree_params() const { return tree_params_; }
  const SvrParams& svr_params() const { return svr_params_; }
  const Trees* trees() const { return std::get_if<Trees>(&models_); }
  const Svrs* svrs() const { return std::get_if<Svrs>(&models_); }

  /// Self-describing JSON document with a format tag and version.
  std::string to_json() const;
  static Regressor from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Regressor load(const std::filesystem::path& path);

 private:
  std::variant<Trees, Svrs> models_;
  Normalization feature_scaling_;
  LabelScaling label_scaling_;
  TreeParams tree_params_;
  SvrParams svr_params_;
};

inline constexpr int kModelFormatVersion = 1;

FeatureMatrix feature_matrix(const Dataset& data, bool normalized);

Regressor fit_decision_tree(const Dataset& train, const TreeParams& params);

/// Trains the two coordinate SVRs (concurrently when cores allow). Feature
/// scaling is taken from train.normalization.
Regressor fit_svr(const Dataset& train, const SvrParams& params,
                  std::array<SvrFitInfo, 2>* info = nullptr);

Vec2 predict(const Regressor& model, std::span<const double> features);

}  // namespace posauth
