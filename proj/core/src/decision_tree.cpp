#include "posauth/decision_tree.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "posauth/error.hpp"

namespace posauth {

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const double> y, const TreeParams& params)
      : x_(x), y_(y), params_(params) {}

  std::vector<RegressionTree::Node> build() {
    std::vector<std::size_t> idx(y_.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    grow(std::move(idx), 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  int grow(std::vector<std::size_t> idx, int depth) {
    const auto id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    double sum = 0.0;
    for (std::size_t i : idx) sum += y_[i];
    const auto n = static_cast<double>(idx.size());
    const double mean = sum / n;
    double sse = 0.0;
    for (std::size_t i : idx) sse += (y_[i] - mean) * (y_[i] - mean);

    nodes_[id].value = mean;
    nodes_[id].samples = idx.size();

    if (depth >= params_.max_depth || idx.size() < 2 * params_.min_leaf || sse <= 0.0) {
      return id;
    }
    const Split best = find_split(idx, sum, sse);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : idx) {
      (x_(static_cast<Eigen::Index>(i), best.feature) <= best.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();

    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    const int l = grow(std::move(left), depth + 1);
    nodes_[id].left = l;
    const int r = grow(std::move(right), depth + 1);
    nodes_[id].right = r;
    return id;
  }

  Split find_split(const std::vector<std::size_t>& idx, double total, double sse) const {
    const std::size_t n = idx.size();
    const double base = total * total / static_cast<double>(n);
    Split best;
    // Gains below this are rounding noise.
    const double min_gain = 1e-12 * sse;
    std::vector<std::pair<double, double>> column(n);
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      for (std::size_t k = 0; k < n; ++k) {
        column[k] = {x_(static_cast<Eigen::Index>(idx[k]), f), y_[idx[k]]};
      }
      std::sort(column.begin(), column.end());
      double left_sum = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left_sum += column[k].second;
        const std::size_t n_left = k + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < params_.min_leaf) continue;
        if (n_right < params_.min_leaf) break;
        const double lo = column[k].first;
        const double hi = column[k + 1].first;
        if (!(lo < hi)) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                            right_sum * right_sum / static_cast<double>(n_right) - base;
        if (gain > best.gain && gain > min_gain) {
          double mid = 0.5 * (lo + hi);
          if (!(mid < hi)) mid = lo;
          best = Split{static_cast<int>(f), mid, gain};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& x_;
  std::span<const double> y_;
  TreeParams params_;
  std::vector<RegressionTree::Node> nodes_;
};

}  // namespace

RegressionTree::RegressionTree(std::vector<Node> nodes, std::size_t feature_count)
    : nodes_(std::move(nodes)), feature_count_(feature_count) {
  if (nodes_.empty()) throw InvalidArgument("a regression tree needs at least one node");
  const auto count = static_cast<int>(nodes_.size());
  for (const Node& node : nodes_) {
    if (node.is_leaf()) continue;
    if (node.feature >= static_cast<int>(feature_count_) || node.left <= 0 || node.right <= 0 ||
        node.left >= count || node.right >= count) {
      throw InvalidArgument("malformed regression tree node");
    }
  }
}

RegressionTree RegressionTree::fit(const FeatureMatrix& x, std::span<const double> y,
                                   const TreeParams& params) {
  if (y.empty() || static_cast<std::size_t>(x.rows()) != y.size()) {
    throw InvalidArgument("tree training needs a non-empty feature matrix matching the labels");
  }
  if (params.max_depth < 0 || params.min_leaf == 0) {
    throw InvalidArgument("tree max_depth must be >= 0 and min_leaf >= 1");
  }
  TreeBuilder builder(x, y, params);
  return RegressionTree(builder.build(), static_cast<std::size_t>(x.cols()));
}

std::size_t RegressionTree::leaf_index(std::span<const double> features) const {
  if (features.size() != feature_count_) {
    throw InvalidArgument("tree expects " + std::to_string(feature_count_) + " features, got " +
                          std::to_string(features.size()));
  }
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const Node& node = nodes_[i];
    i = static_cast<std::size_t>(features[static_cast<std::size_t>(node.feature)] <= node.threshold
                                     ? node.left
                                     : node.right);
  }
  return i;
}

double RegressionTree::predict(std::span<const double> features) const {
  return nodes_[leaf_index(features)].value;
}

std::size_t RegressionTree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  // Children are always created after their parent.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

}  // namespace posauth
