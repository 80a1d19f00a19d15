#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace posauth {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TreeParams {
  int max_depth = 20;
  std::size_t min_leaf = 5;
};

/// Binary least-squares regression tree (CART). Internal nodes send a sample
/// left when feature <= threshold; leaves hold the mean of the training
/// labels that reached them.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    std::size_t samples = 0;

    bool is_leaf() const { return feature < 0; }
  };

  RegressionTree() = default;
  RegressionTree(std::vector<Node> nodes, std::size_t feature_count);

  /// Grows the tree greedily: each split minimizes the summed squared
  /// deviation of the two children. Growth stops at max_depth, when a child
  /// would hold fewer than min_leaf samples, or when no split lowers the
  /// squared error.
  static RegressionTree fit(const FeatureMatrix& x, std::span<const double> y,
                            const TreeParams& params);

  double predict(std::span<const double> features) const;
  /// Index into nodes() of the leaf a sample lands in.
  std::size_t leaf_index(std::span<const double> features) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t feature_count() const { return feature_count_; }
  std::size_t depth() const;

 private:
  std::vector<Node> nodes_;
  std::size_t feature_count_ = 0;
};

}  // namespace posauth
