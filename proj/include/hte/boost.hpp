#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hte/frame.hpp"

namespace hte {

enum class Loss { squared_error, logistic };

struct BoostConfig {
  int n_rounds = 100;
  int max_depth = 4;
  double lambda = 1.0;            // L2 penalty on leaf values
  double gamma = 0.0;             // per-leaf complexity penalty
  double min_child_weight = 1.0;  // minimum hessian sum per child
  double learning_rate = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Binary regression tree. Routing rule: go left iff x[feature] <= threshold.
// Leaves have feature == -1 and carry the leaf value.
struct SplitNode {
  int feature = -1;
  double threshold = 0.0;
  double leaf_value = 0.0;
  std::unique_ptr<SplitNode> left;
  std::unique_ptr<SplitNode> right;

  bool is_leaf() const { return feature < 0; }
  double eval(std::span<const double> x) const {
    const SplitNode* node = this;
    while (!node->is_leaf()) {
      node = x[static_cast<std::size_t>(node->feature)] <= node->threshold
                 ? node->left.get()
                 : node->right.get();
    }
    return node->leaf_value;
  }
  int depth() const;
  std::unique_ptr<SplitNode> clone() const;
};

struct Gradients {
  std::vector<double> g;
  std::vector<double> h;
};

// First/second-order gradients of the loss at the current raw predictions.
// squared_error: g = yhat - y, h = 1. logistic: p = sigmoid(yhat),
// g = p - y, h = p(1-p); requires y in {0,1}.
Gradients gradients(Loss loss, const std::vector<double>& y,
                    const std::vector<double>& yhat);

// One tree fitted to (g, h) by exact greedy split search. Candidate
// thresholds sit at midpoints between consecutive distinct sorted values;
// the split maximizing
//   1/2 [G_L^2/(H_L+lambda) + G_R^2/(H_R+lambda) - G^2/(H+lambda)] - gamma
// is accepted when the gain is positive and both children reach
// min_child_weight. Equal gains resolve to the lowest feature index, then
// the lowest threshold. Leaf value is -G/(H+lambda).
std::unique_ptr<SplitNode> fit_tree(const Matrix& X, std::span<const double> g,
                                    std::span<const double> h,
                                    const BoostConfig& config);

struct BoostedEnsemble {
  Loss loss = Loss::squared_error;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<std::unique_ptr<SplitNode>> trees;
  std::vector<std::string> feature_names;
  std::vector<double> round_loss;  // training loss after each round

  BoostedEnsemble() = default;
  BoostedEnsemble(BoostedEnsemble&&) = default;
  BoostedEnsemble& operator=(BoostedEnsemble&&) = default;
  BoostedEnsemble(const BoostedEnsemble& other);
  BoostedEnsemble& operator=(const BoostedEnsemble& other);

  std::size_t n_features() const { return feature_names.size(); }

  // Raw margin: base_score + learning_rate * sum of tree outputs.
  double predict_raw_row(std::span<const double> x) const;
  std::vector<double> predict_raw(const Matrix& X) const;
  // Probability scale for logistic loss, identity otherwise.
  std::vector<double> predict(const Matrix& X) const;
  std::vector<double> predict(const FrameTable& table) const;

  std::string to_json_string() const;
  static BoostedEnsemble from_json_string(const std::string& text);
  void save(const std::string& path) const;
  static BoostedEnsemble load(const std::string& path);
};

// Features are taken from the table's feature-role columns minus the target.
BoostedEnsemble fit_boosted(const FrameTable& table, const std::string& target,
                            Loss loss, const BoostConfig& config);

// Core fit over an explicit matrix; `names` labels the columns of X.
BoostedEnsemble fit_boosted(const Matrix& X, std::vector<std::string> names,
                            const std::vector<double>& y, Loss loss,
                            const BoostConfig& config);

double sigmoid(double z);

}  // namespace hte
